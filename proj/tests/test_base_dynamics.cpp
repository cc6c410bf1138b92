#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "cocyclelab/base_dynamics.hpp"
#include "cocyclelab/error.hpp"
#include "oracles.hpp"

using namespace cocyclelab;

TEST_CASE("rotation step adds gamma mod 1") {
  const auto base = BaseSystem::rotation();
  const BasePoint w = BasePoint::at_angle(0.5);
  const double t = base.step(w, 1).rotation()->angle();
  CHECK(t == doctest::Approx(0.5 + BaseSystem::kGoldenGamma - 1.0).epsilon(1e-15));
  CHECK(base.step(w, 0) == w);
}

TEST_CASE("periodic step wraps backwards") {
  const auto base = BaseSystem::periodic(4);
  const BasePoint w = PeriodicPoint{0};
  CHECK(base.step(w, -1).periodic()->state == 3);
  CHECK(base.step(w, 9).periodic()->state == 1);
  CHECK_FALSE(base.aperiodic());
}

TEST_CASE("group law is exact on every base") {
  Rng rng(11);
  const std::vector<BaseSystem> bases{BaseSystem::rotation(), BaseSystem::bernoulli({0.3, 0.7}),
                                      BaseSystem::bernoulli({0.2, 0.5, 0.3}), BaseSystem::periodic(5)};
  for (const auto& base : bases) {
    for (int trial = 0; trial < 50; ++trial) {
      const BasePoint w = base.sample(rng);
      const auto a = static_cast<std::int64_t>(rng.below(101)) - 50;
      const auto b = static_cast<std::int64_t>(rng.below(101)) - 50;
      CHECK(base.step(w, a + b) == base.step(base.step(w, a), b));
      CHECK(base.step(base.step(w, a), -a) == w);
    }
  }
}

TEST_CASE("bernoulli symbols are stable under re-query and shift") {
  const auto base = BaseSystem::bernoulli({0.5, 0.5});
  Rng rng(3);
  const BasePoint w = base.sample(rng);
  for (std::int64_t i = -20; i <= 20; ++i) {
    CHECK(base.symbol(w, i) == base.symbol(w, i));
    CHECK(base.symbol(base.step(w, 7), i) == base.symbol(w, i + 7));
  }
}

TEST_CASE("bernoulli probabilities are validated") {
  CHECK_THROWS_AS(BaseSystem::bernoulli({0.5, 0.6}), Error);
  CHECK_THROWS_AS(BaseSystem::bernoulli({1.0, 0.0}), Error);
}

TEST_CASE("symbol frequencies follow the probability vector") {
  const auto base = BaseSystem::bernoulli({0.2, 0.8});
  Rng rng(5);
  const BasePoint w = base.sample(rng);
  int zeros = 0;
  for (std::int64_t i = 0; i < 20000; ++i) zeros += base.symbol(w, i) == 0 ? 1 : 0;
  CHECK(zeros / 20000.0 == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("birkhoff sums") {
  const auto base = BaseSystem::rotation();
  const BasePoint w = BasePoint::at_angle(0.0);
  CHECK(birkhoff_sum(base, Observable::constant(0.0), w, 50) == 0.0);
  CHECK(birkhoff_sum(base, Observable::constant(1.0), w, 7) == 7.0);
  CHECK(birkhoff_sum(base, Observable::constant(1.0), w, 0) == 0.0);
  CHECK(birkhoff_sum(base, Observable::cosine(), w, 100) == doctest::Approx(oracles::kCosineS100).epsilon(1e-12));
}

TEST_CASE("birkhoff averages converge to the declared mean") {
  const auto base = BaseSystem::rotation();
  Rng rng(17);
  int good = 0;
  for (int i = 0; i < 100; ++i) {
    const BasePoint w = base.sample(rng);
    good += std::abs(birkhoff_sum(base, Observable::cosine(), w, 100000) / 1e5) <= 0.05 ? 1 : 0;
  }
  CHECK(good >= 95);
}

TEST_CASE("return times") {
  SUBCASE("whole space returns every step") {
    const auto base = BaseSystem::rotation();
    const auto t = return_times(base, SetIndicator::whole(), BasePoint::at_angle(0.3), 4, 100);
    CHECK(t == std::vector<std::int64_t>{0, 1, 2, 3, 4});
  }
  SUBCASE("periodic state") {
    const auto base = BaseSystem::periodic(4);
    const auto t = return_times(base, SetIndicator::periodic_states({0}), PeriodicPoint{0}, 2, 100);
    CHECK(t == std::vector<std::int64_t>{0, 4, 8});
  }
  SUBCASE("rotation arc matches an orbit scan") {
    const auto base = BaseSystem::rotation();
    const auto t = return_times(base, SetIndicator::arc(0.0, 0.5), BasePoint::at_angle(0.1), 3, 100);
    const auto ref = oracles::rotation_visits(0.1L, (std::sqrt(5.0L) - 1) / 2, 0.0L, 0.5L, 3);
    CHECK(t == ref);
  }
  SUBCASE("horizon exhausted") {
    const auto base = BaseSystem::rotation();
    try {
      return_times(base, SetIndicator::arc(0.0, 1e-6), BasePoint::at_angle(0.0), 3, 10);
      FAIL("expected HorizonExhausted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::HorizonExhausted);
    }
  }
}

TEST_CASE("rokhlin base is a disjoint tower") {
  const auto base = BaseSystem::bernoulli({0.5, 0.5});
  const auto F = SetIndicator::cylinder(base, 0, {0});
  Rng rng(23);
  const std::int64_t N = 2;
  const auto tower = rokhlin_base(base, F, N, 2000, rng);
  REQUIRE_FALSE(tower.sample_points.empty());
  CHECK(tower.empirical_measure > 0.0);
  for (const auto& w : tower.sample_points) {
    CHECK(F(w));
    CHECK(tower.base(w));
    for (std::int64_t k = 1; k <= N + 1; ++k) CHECK_FALSE(tower.base(base.step(w, k)));
  }
  // Unrefined B is {w in F : tau_F(w) > N + 1}: symbols 1..3 are all 1.
  if (!tower.refined)
    for (const auto& w : tower.sample_points)
      for (std::int64_t k = 1; k <= N + 1; ++k) CHECK(base.symbol(w, k) == 1);
}

TEST_CASE("rokhlin base with N = 0") {
  const auto base = BaseSystem::rotation();
  const auto F = SetIndicator::arc(0.0, 0.5);
  Rng rng(29);
  const auto tower = rokhlin_base(base, F, 0, 1000, rng);
  for (const auto& w : tower.sample_points) CHECK_FALSE(tower.base(base.step(w, 1)));
}

TEST_CASE("rokhlin base rejects periodic bases") {
  const auto base = BaseSystem::periodic(3);
  Rng rng(1);
  CHECK_THROWS_AS(rokhlin_base(base, SetIndicator::periodic_states({0}), 1, 100, rng), Error);
}

TEST_CASE("small sets contain their anchor and are small") {
  Rng rng(31);
  for (const auto& base : {BaseSystem::rotation(), BaseSystem::bernoulli({0.4, 0.6})}) {
    const BasePoint w = base.sample(rng);
    const auto S = base.small_set(w, 0.01);
    CHECK(S(w));
    CHECK(empirical_measure(base, S, 20000, rng) <= 0.015);
  }
}
