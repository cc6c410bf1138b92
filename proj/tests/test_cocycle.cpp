#include "doctest.h"
#include "cocyclelab/cocycle.hpp"
#include "cocyclelab/error.hpp"
#include "support.hpp"

using namespace cocyclelab;
using support::make;
using support::mat2;

TEST_CASE("evolve on constant generators") {
  const auto base = BaseSystem::rotation();
  const BasePoint w = BasePoint::at_angle(0.2);
  CHECK(evolve(*make("shear"), base, w, 2).value.isApprox(mat2(1, 2, 0, 1)));
  const auto p = evolve(*make("diagonal", {2, 0.5}), base, w, 3);
  CHECK(p.value.isApprox(mat2(8, 0, 0, 0.125)));
  CHECK(evolve(*make("diagonal", {2, 0.5}), base, w, 0).value == Mat::Identity(2, 2));
}

TEST_CASE("evolve_back on constant generators") {
  const auto base = BaseSystem::rotation();
  const BasePoint w = BasePoint::at_angle(0.2);
  CHECK(evolve_back(*make("diagonal", {2, 0.5}), base, w, 1).value.isApprox(mat2(0.5, 0, 0, 2)));
  CHECK(evolve_back(*make("shear"), base, w, 3).value.isApprox(mat2(1, -3, 0, 1)));
  CHECK(evolve_back(*make("shear"), base, w, 0).value == Mat::Identity(2, 2));
}

TEST_CASE("evolve flags overflow") {
  const auto base = BaseSystem::rotation();
  const auto p = evolve(*make("diagonal", {1e10, 1.0}), base, BasePoint{}, 40);
  CHECK(p.overflow);
}

TEST_CASE("evolve_back refuses singular generators") {
  const auto c = constant_cocycle(mat2(1, 0, 0, 0));
  try {
    evolve_back(*c, BaseSystem::rotation(), BasePoint{}, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK((e.code() == ErrorCode::SingularGenerator || e.code() == ErrorCode::NotInvertible));
  }
}

TEST_CASE("cocycle law on random splits") {
  Rng rng(41);
  const auto bern = BaseSystem::bernoulli({0.5, 0.5});
  const auto rot = BaseSystem::rotation();
  struct Case {
    CocyclePtr c;
    BaseSystem base;
  };
  const std::vector<Case> cases{{make("random_sl2", {}, &bern), bern},
                                {make("nonuniform_rotation", {0.5, 0.3}), rot},
                                {make("block_mixed", {0.5, 1.0}), rot},
                                {make("shear"), rot}};
  for (const auto& [c, base] : cases) {
    for (int t = 0; t < 20; ++t) {
      const BasePoint w = base.sample(rng);
      const auto n = static_cast<std::int64_t>(1 + rng.below(40));
      const auto a = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n + 1)));
      const Mat whole = evolve(*c, base, w, n).value;
      const Mat split = evolve(*c, base, base.step(w, a), n - a).value * evolve(*c, base, w, a).value;
      CHECK((whole - split).norm() <= 1e-10 * whole.norm());
    }
  }
}

TEST_CASE("backward products invert forward products") {
  Rng rng(43);
  const auto bern = BaseSystem::bernoulli({0.5, 0.5});
  const auto rot = BaseSystem::rotation();
  const auto c1 = make("random_sl2", {}, &bern);
  const auto c2 = make("nonuniform_rotation", {0.5, 0.3});
  for (int t = 0; t < 10; ++t) {
    for (std::int64_t n : {1, 7, 30}) {
      BasePoint w = bern.sample(rng);
      // rounding in the product scales with |F| |B|, which is huge for random_sl2 at n = 30
      auto gap = [n](const Mat& f, const Mat& b) {
        return std::pair{(f * b - Mat::Identity(2, 2)).norm(), 1e-8 + 64.0 * static_cast<double>(n) * 2.3e-16 * f.norm() * b.norm()};
      };
      auto [e1, tol1] = gap(evolve(*c1, bern, bern.step(w, -n), n).value, evolve_back(*c1, bern, w, n).value);
      CHECK(e1 <= tol1);
      w = rot.sample(rng);
      const double e2 = gap(evolve(*c2, rot, rot.step(w, -n), n).value, evolve_back(*c2, rot, w, n).value).first;
      CHECK(e2 <= 1e-8);
    }
  }
}

TEST_CASE("scaled products track the log norm") {
  const auto base = BaseSystem::rotation();
  const auto s = evolve_scaled(*make("diagonal", {2, 0.5}), base, BasePoint{}, 2000);
  CHECK(s.log_scale + std::log(spectral_norm(s.direction)) == doctest::Approx(2000 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("mather operator") {
  const auto base = BaseSystem::rotation();
  const BasePoint w = BasePoint::at_angle(0.1);
  Rng rng(47);
  SUBCASE("zero maps to zero and window shrinks") {
    const auto f = OrbitFunction::zeros(w, -3, 3, 2);
    const auto g = mather_apply(*make("shear"), base, f);
    CHECK(g.first == -2);
    CHECK(g.last() == 3);
    for (const auto& v : g.values) CHECK(v.norm() == 0.0);
  }
  SUBCASE("identity generator shifts") {
    const auto f = OrbitFunction::tabulate(w, -3, 3, [](std::int64_t k) { return Vec::Constant(2, double(k)); });
    const auto g = mather_apply(*make("diagonal", {1, 1}), base, f);
    for (std::int64_t k = -2; k <= 3; ++k) CHECK(g.at(k) == f.at(k - 1));
  }
  SUBCASE("scalar one half") {
    const auto f = OrbitFunction::tabulate(w, 0, 4, [](std::int64_t) { return Vec::Ones(1); });
    const auto g = mather_apply(*support::scalar(0.5), base, f);
    for (const auto& v : g.values) CHECK(v(0) == 0.5);
  }
  SUBCASE("linearity") {
    const auto c = make("nonuniform_rotation", {0.5, 0.3});
    const auto f1 = OrbitFunction::tabulate(w, -5, 5, [&](std::int64_t) { return Vec(rng.unit_vector(2)); });
    const auto f2 = OrbitFunction::tabulate(w, -5, 5, [&](std::int64_t) { return Vec(rng.unit_vector(2)); });
    const auto mix = OrbitFunction::tabulate(w, -5, 5, [&](std::int64_t k) -> Vec { return 2.5 * f1.at(k) - 0.75 * f2.at(k); });
    const auto a = mather_apply(*c, base, f1), b = mather_apply(*c, base, f2), m = mather_apply(*c, base, mix);
    for (std::int64_t k = -4; k <= 5; ++k) CHECK((m.at(k) - (2.5 * a.at(k) - 0.75 * b.at(k))).norm() <= 1e-12);
  }
  SUBCASE("single point window underflows") {
    const auto f = OrbitFunction::zeros(w, 0, 0, 2);
    try {
      mather_apply(*make("shear"), base, f);
      FAIL("expected WindowUnderflow");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::WindowUnderflow);
    }
  }
}

TEST_CASE("builtins") {
  CHECK_THROWS_AS(make("nonexistent"), Error);
  const auto bern = BaseSystem::bernoulli({0.5, 0.5});
  CHECK(make("block_mixed", {0.5, 1.0})->dimension() == 4);
  CHECK(make("diagonal", {1, 2, 3})->dimension() == 3);
  // random_sl2 needs a Bernoulli base
  CHECK_THROWS_AS(make("random_sl2"), Error);
  const auto c = make("random_sl2", {}, &bern);
  Rng rng(3);
  const BasePoint w = bern.sample(rng);
  CHECK(std::abs(c->generator(w).determinant() - 1.0) < 1e-12);
}

TEST_CASE("symbol tables") {
  const auto per = BaseSystem::periodic(2);
  const auto c = symbol_table(per, {mat2(3, 0, 0, 1.0 / 3), mat2(1.0 / 3, 0, 0, 3)});
  CHECK(c->generator(PeriodicPoint{1}).isApprox(mat2(1.0 / 3, 0, 0, 3)));
  CHECK_THROWS_AS(symbol_table(per, {mat2(1, 0, 0, 1)}), Error);
}
