#include <cmath>
#include <numbers>

#include "doctest.h"
#include "cocyclelab/admissibility.hpp"
#include "cocyclelab/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cocyclelab;
using support::make;
using support::mat2;

namespace {

DichotomyCertificate certify(const CocyclePtr& c, const BaseSystem& base, const BasePoint& w,
                             std::optional<double> rate = std::nullopt) {
  CertificateOptions o;
  o.rate = rate;
  return build_certificate(c, base, lyapunov_exponents(*c, base, w, {10000, 10, 0.02}), {w}, o);
}

OrbitFunction constant_g(const BasePoint& w, std::int64_t lo, std::int64_t hi, const Vec& v) {
  return OrbitFunction::tabulate(w, lo, hi, [&](std::int64_t) { return v; });
}

}  // namespace

TEST_CASE("weighted norms") {
  const auto base = BaseSystem::rotation();
  const BasePoint w{};
  CHECK(sup_norm(OrbitFunction::zeros(w, -3, 3, 2)) == 0.0);
  const auto e1 = constant_g(w, -3, 3, Vec::Unit(2, 0));
  CHECK(weighted_norm(e1, WeightModel::constant(3.0), base) == 3.0);
  const auto decay = OrbitFunction::tabulate(w, -5, 5, [](std::int64_t k) -> Vec {
    return std::exp(-std::abs(double(k))) * Vec::Unit(2, 0);
  });
  CHECK(weighted_norm(decay, WeightModel::unit(), base) == 1.0);
  CHECK_THROWS_AS(WeightModel::constant(0.0), Error);
}

TEST_CASE("scalar green series") {
  const auto base = BaseSystem::rotation();
  const BasePoint w{};
  for (double a : {0.5, 2.0}) {
    const auto c = support::scalar(a);
    const auto cert = certify(c, base, w);
    const auto sol = green_solve(cert, constant_g(w, -80, 80, Vec::Ones(1)), 60);
    for (const auto& v : sol.f.values) CHECK(v(0) == doctest::Approx(oracles::scalar_green(a)).epsilon(1e-15));
    CHECK(sol.f.first == -20);
    CHECK(sol.f.last() == 20);
  }
}

TEST_CASE("residual") {
  const auto base = BaseSystem::rotation();
  const BasePoint w{};
  CHECK(residual(*make("shear"), base, OrbitFunction::zeros(w, -3, 3, 2), OrbitFunction::zeros(w, -3, 3, 2)) == 0.0);
  CHECK(residual(*make("diagonal", {1, 1}), base, constant_g(w, -3, 3, Vec::Unit(2, 0)),
                 OrbitFunction::zeros(w, -3, 3, 2)) == 0.0);
}

TEST_CASE("green solve agrees with periodic oracles") {
  const auto base = BaseSystem::periodic(3);
  Rng rng(83);
  const auto c = make("diagonal", {2, 0.5});
  const BasePoint w = PeriodicPoint{0};
  const auto cert = certify(c, base, w);
  std::vector<Vec> g{rng.unit_vector(2), rng.unit_vector(2), rng.unit_vector(2)};
  const auto lib = oracle_solve_periodic(*c, base, g);
  const auto ref = oracles::floquet_solve({c->generator(PeriodicPoint{0}), c->generator(PeriodicPoint{1}),
                                           c->generator(PeriodicPoint{2})},
                                          g);
  const auto gf = OrbitFunction::tabulate(w, -90, 90, [&](std::int64_t k) { return g[((k % 3) + 3) % 3]; });
  const auto sol = green_solve(cert, gf, 60);
  for (std::int64_t k = sol.f.first; k <= sol.f.last(); ++k) {
    const auto s = static_cast<std::size_t>(((k % 3) + 3) % 3);
    CHECK((sol.f.at(k) - lib[s]).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK((lib[s] - ref[s]).norm() <= 1e-12);
  }
}

TEST_CASE("periodic oracle edge cases") {
  SUBCASE("p = 1 scalar") {
    const auto base = BaseSystem::periodic(1);
    const auto f = oracle_solve_periodic(*support::scalar(0.5), base, {Vec::Ones(1)});
    CHECK(f[0](0) == doctest::Approx(2.0));
  }
  SUBCASE("shear is singular") {
    const auto base = BaseSystem::periodic(1);
    try {
      oracle_solve_periodic(*make("shear"), base, {Vec::Unit(2, 1)});
      FAIL("expected SingularSystem");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularSystem);
    }
  }
  SUBCASE("p = 2 non-constant generator") {
    const auto base = BaseSystem::periodic(2);
    const std::vector<Mat> a{mat2(3, 0, 0, 1.0 / 3), mat2(2, 1, 0, 0.5)};
    const auto c = symbol_table(base, a);
    const std::vector<Vec> g{Vec::Unit(2, 0), Vec::Ones(2)};
    const auto lib = oracle_solve_periodic(*c, base, g);
    const auto ref = oracles::floquet_solve(a, g);
    const BasePoint w = PeriodicPoint{0};
    const auto cert = certify(c, base, w);
    const auto sol = green_solve(cert, OrbitFunction::tabulate(w, -80, 80, [&](std::int64_t k) { return g[((k % 2) + 2) % 2]; }), 60);
    for (int s = 0; s < 2; ++s) {
      CHECK((lib[s] - ref[s]).norm() <= 1e-12);
      CHECK((sol.f.at(s) - ref[s]).norm() <= 1e-8);
    }
  }
}

TEST_CASE("solver correctness, linearity and tail accounting") {
  Rng rng(89);
  const auto rot = BaseSystem::rotation();
  const auto bern = BaseSystem::bernoulli({0.5, 0.5});
  struct Case {
    CocyclePtr c;
    BaseSystem base;
  };
  for (const auto& [c, base] : std::vector<Case>{{make("diagonal", {2, 0.5}), rot},
                                                  {make("nonuniform_rotation", {0.5, 0.3}), rot},
                                                  {make("random_sl2", {}, &bern), bern}}) {
    const BasePoint w = base.sample(rng);
    const auto cert = certify(c, base, w);
    const GreenSolver solver(cert, w, -90, 90, 60);
    for (int t = 0; t < 50; ++t) {
      const auto g = OrbitFunction::tabulate(w, -90, 90, [&](std::int64_t) { return Vec(rng.unit_vector(2)); });
      const auto sol = solver.solve(g);
      CHECK(residual(*c, base, sol.f, g) <= sol.tail_bound + 1e-12);
    }
    const auto g1 = OrbitFunction::tabulate(w, -90, 90, [&](std::int64_t) { return Vec(rng.unit_vector(2)); });
    const auto g2 = OrbitFunction::tabulate(w, -90, 90, [&](std::int64_t) { return Vec(rng.unit_vector(2)); });
    const auto mix = OrbitFunction::tabulate(w, -90, 90, [&](std::int64_t k) -> Vec { return 1.5 * g1.at(k) - 2.0 * g2.at(k); });
    const auto f1 = solver.solve(g1).f, f2 = solver.solve(g2).f, fm = solver.solve(mix).f;
    for (std::int64_t k = fm.first; k <= fm.last(); ++k)
      CHECK((fm.at(k) - (1.5 * f1.at(k) - 2.0 * f2.at(k))).norm() <= 1e-10);
  }
}

TEST_CASE("tail tolerance is enforced") {
  const auto base = BaseSystem::rotation();
  const auto c = make("diagonal", {1.1, 0.9});
  const auto cert = certify(c, base, BasePoint{});
  const auto g = constant_g(BasePoint{}, -15, 15, Vec::Ones(2));
  try {
    green_solve(cert, g, 5, 1e-12);
    FAIL("expected TailTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TailTooLarge);
  }
}

TEST_CASE("bound probe") {
  const auto base = BaseSystem::rotation();
  SUBCASE("scalar one half") {
    const auto cert = certify(support::scalar(0.5), base, BasePoint{}, std::numbers::ln2);
    Rng rng(97);
    const auto r = bound_probe(cert, PairOrientation::WeightedInput, BasePoint{}, 10, 20, 60, rng);
    CHECK(r.analytic == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.empirical == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.empirical <= r.analytic);
  }
  SUBCASE("diagonal with 100 trials") {
    const auto cert = certify(make("diagonal", {2, 0.5}), base, BasePoint{}, std::numbers::ln2);
    Rng rng(101);
    const auto r = bound_probe(cert, PairOrientation::WeightedInput, BasePoint{}, 100, 20, 60, rng);
    CHECK(r.trials_used == 100);
    CHECK(r.empirical <= 3.0 + 1e-9);
  }
  SUBCASE("zero input is excluded") {
    const auto cert = certify(make("diagonal", {2, 0.5}), base, BasePoint{});
    const GreenSolver solver(cert, BasePoint{}, -30, 30, 10);
    CHECK_FALSE(bound_ratio(solver, PairOrientation::WeightedInput, OrbitFunction::zeros(BasePoint{}, -30, 30, 2)));
  }
}

TEST_CASE("pair asymmetry on the nonuniform example") {
  const auto base = BaseSystem::rotation();
  const auto c = make("nonuniform_rotation", {0.5, 0.3});
  const auto cert = certify(c, base, BasePoint{});
  Rng rng(103);
  for (auto o : {PairOrientation::WeightedInput, PairOrientation::WeightedOutput}) {
    const auto r = bound_probe(cert, o, BasePoint{}, 20, 30, 60, rng);
    CHECK(r.empirical <= r.analytic);
  }
}

TEST_CASE("uniqueness probe") {
  const auto base = BaseSystem::rotation();
  SUBCASE("diagonal") {
    const auto cert = certify(make("diagonal", {2, 0.5}), base, BasePoint{});
    const auto r = uniqueness_probe(cert, BasePoint{}, 60);
    CHECK(r.stable_decay.back() <= std::ldexp(1.0, -60) * (1 + 1e-9));
    CHECK(r.unstable_decay.back() <= std::ldexp(1.0, -60) * (1 + 1e-9));
  }
  SUBCASE("nonuniform rotation") {
    const auto cert = certify(make("nonuniform_rotation", {0.5, 0.3}), base, BasePoint{});
    const auto r = uniqueness_probe(cert, BasePoint::at_angle(0.6), 120);
    CHECK(r.decay_step >= 1);
    CHECK(r.decay_step <= 80);
  }
  SUBCASE("no decay inside a short window") {
    const auto cert = certify(make("diagonal", {1.1, 0.9}), base, BasePoint{});
    try {
      uniqueness_probe(cert, BasePoint{}, 10);
      FAIL("expected NoDecay");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoDecay);
    }
  }
}
