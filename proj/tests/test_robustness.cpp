#include <cmath>
#include <numbers>

#include "doctest.h"
#include "cocyclelab/robustness.hpp"
#include "support.hpp"

using namespace cocyclelab;
using support::make;

namespace {

DichotomyCertificate certify(const CocyclePtr& c, const BaseSystem& base, std::optional<double> rate) {
  CertificateOptions o;
  o.rate = rate;
  return build_certificate(c, base, lyapunov_exponents(*c, base, BasePoint{}, {10000, 10, 0.02}), {BasePoint{}}, o);
}

OrbitFunction ones(std::int64_t lo, std::int64_t hi, std::size_t d) {
  return OrbitFunction::tabulate(BasePoint{}, lo, hi, [d](std::int64_t) { return Vec(Vec::Ones(static_cast<Eigen::Index>(d))); });
}

}  // namespace

TEST_CASE("budget constants") {
  const auto base = BaseSystem::rotation();
  const auto cert = certify(make("diagonal", {2, 0.5}), base, std::numbers::ln2);
  const auto b = budget(cert, 0.5);
  CHECK(b.factor == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(b.d == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(b.q == doctest::Approx(0.5).epsilon(1e-12));
  // K = 1 makes the allowance constant.
  CHECK(b.allowance(cert, BasePoint::at_angle(0.3)) == doctest::Approx(b.d).epsilon(1e-12));
  CHECK_THROWS_AS(budget(cert, 1.0), Error);
  CHECK_THROWS_AS(budget(cert, 0.0), Error);
}

TEST_CASE("scalar fixed point") {
  const auto base = BaseSystem::rotation();
  const auto a = support::scalar(0.5);
  const auto cert = certify(a, base, std::numbers::ln2);
  const auto b = budget(cert, 0.5);
  const auto r = contraction_solve(*a, *support::scalar(0.55), cert, b, ones(-200, 200, 1), 1e-12);
  CHECK(r.f.at(0)(0) == doctest::Approx(1.0 / 0.45).epsilon(1e-10));
  CHECK(r.max_ratio <= b.q + 0.05);
  CHECK(r.residual <= 1e-10);
  // geometric convergence: successive steps shrink
  for (double q : r.ratios) CHECK(q <= 0.55);
}

TEST_CASE("zero perturbation reproduces the Green series") {
  const auto base = BaseSystem::rotation();
  const auto c = make("nonuniform_rotation", {0.5, 0.3});
  const auto cert = certify(c, base, std::nullopt);
  const auto b = budget(cert, 0.5);
  Rng rng(5);
  const auto g = OrbitFunction::tabulate(BasePoint{}, -160, 160, [&](std::int64_t) { return Vec(rng.unit_vector(2)); });
  const auto r = contraction_solve(*c, *c, cert, b, g);
  CHECK(r.iterations <= 2);
  const auto ref = green_solve(cert, g, 60);
  for (std::int64_t k = ref.f.first; k <= ref.f.last(); ++k) CHECK((r.f.at(k) - ref.f.at(k)).norm() <= 1e-9);
}

TEST_CASE("random in-budget perturbations of the diagonal") {
  const auto base = BaseSystem::rotation();
  const auto a = make("diagonal", {2, 0.5});
  const auto cert = certify(a, base, std::numbers::ln2);
  const auto b = budget(cert, 0.5);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const PerturbationField field{seed};
    const auto bc = perturbed_cocycle(cert, b, field);
    Rng rng(seed);
    const auto g = OrbitFunction::tabulate(BasePoint{}, -100, 100, [&](std::int64_t) { return Vec(rng.unit_vector(2)); });
    const double tol = 1e-10;
    const auto r = contraction_solve(*a, *bc, cert, b, g, tol);
    CHECK(r.budget_use <= 1.0);
    CHECK(r.budget_use >= 1.0 - 1e-5);
    CHECK(r.max_ratio <= b.q + 0.05);
    CHECK(r.residual <= 10 * tol);
    CHECK(static_cast<double>(r.iterations) <= std::log(tol) / std::log(b.q) + 2);
    const auto rep = perturbed_check(perturbed_steps(cert, b, field, BasePoint{}), 2, {10000, 10, 0.02});
    CHECK(rep.hyperbolic);
    CHECK(rep.margin >= 0.2);
  }
}

TEST_CASE("perturbed steps match the perturbed cocycle") {
  const auto base = BaseSystem::rotation();
  const auto c = make("nonuniform_rotation", {0.5, 0.3});
  const auto cert = certify(c, base, std::nullopt);
  const auto b = budget(cert, 0.5);
  const PerturbationField field{42};
  const auto bc = perturbed_cocycle(cert, b, field);
  auto steps = perturbed_steps(cert, b, field, BasePoint{}, 7);
  for (std::int64_t n = 0; n < 20; ++n) {
    const Mat m = steps();
    CHECK((m - bc->generator(base.step(BasePoint{}, n))).norm() <= 1e-9);
  }
}

TEST_CASE("zero perturbation keeps the spectrum") {
  const auto base = BaseSystem::rotation();
  const auto c = make("diagonal", {2, 0.5});
  const auto rep = perturbed_check(*c, base, BasePoint{}, {5000, 10, 0.02});
  const auto s = lyapunov_exponents(*c, base, BasePoint{}, {5000, 10, 0.02});
  CHECK(rep.spectrum.exponents == s.exponents);
  CHECK(rep.hyperbolic);
}

TEST_CASE("out-of-budget perturbations are rejected") {
  const auto base = BaseSystem::rotation();
  const auto a = make("diagonal", {2, 0.5});
  const auto cert = certify(a, base, std::numbers::ln2);
  const auto b = budget(cert, 0.5);
  PerturbationField field{3};
  field.scale = 2.0;
  const auto bc = perturbed_cocycle(cert, b, field);
  try {
    contraction_solve(*a, *bc, cert, b, ones(-20, 20, 2));
    FAIL("expected BudgetViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetViolated);
  }
}

TEST_CASE("budget inherits temperedness from K") {
  const auto base = BaseSystem::rotation();
  const auto cert = certify(make("nonuniform_rotation", {0.5, 0.3}), base, std::nullopt);
  const auto b = budget(cert, 0.5);
  const auto k = cert.k_along_orbit(BasePoint{}, -2001, 2001);
  const auto c = allowance_along(b, k, -2000, 2000);
  OrbitSamples inv{c.first, {}};
  for (double v : c.values) inv.values.push_back(1.0 / v);
  const auto r = temperedness_diagnostic(inv, {100, 1000, 2000}, 0.01);
  CHECK(std::abs(r.slopes.back()) <= 0.01);
}
