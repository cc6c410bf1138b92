#include <cmath>
#include <numbers>

#include "doctest.h"
#include "cocyclelab/dichotomy.hpp"
#include "cocyclelab/error.hpp"
#include "support.hpp"

using namespace cocyclelab;
using support::make;

namespace {

LyapunovSpectrum spectrum_of(const CocyclePtr& c, const BaseSystem& base, std::int64_t n = 10000) {
  return lyapunov_exponents(*c, base, BasePoint{}, {n, 10, 0.02});
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("classification") {
  const auto ln2 = std::numbers::ln2;
  CHECK(classify(merge_exponents({ln2, -ln2}, {0, 0}, 1000, 0.02)) == Classification::Hyperbolic);
  CHECK(classify(merge_exponents({0.5, -0.5}, {0, 0}, 1000, 0.02)) == Classification::Hyperbolic);
  CHECK(classify(spectrum_of(make("shear"), BaseSystem::rotation())) == Classification::HasZeroExponent);
  CHECK(code_of([] { classify(merge_exponents({0.015, -0.5}, {0, 0}, 1000, 0.001)); }) == ErrorCode::Inconclusive);
  CHECK(code_of([] { classify(merge_exponents({0.5, -0.5}, {0.05, 0.05}, 1000, 0.02)); }) == ErrorCode::Inconclusive);
}

TEST_CASE("diagonal certificate") {
  const auto base = BaseSystem::rotation();
  const auto c = make("diagonal", {2, 0.5});
  const auto cert = build_certificate(c, base, spectrum_of(c, base), {BasePoint{}, BasePoint::at_angle(0.4)});
  CHECK(cert.rate == doctest::Approx(0.75 * std::numbers::ln2));
  CHECK(cert.stable_dim == 1);
  Mat ps(2, 2);
  ps << 0, 0, 0, 1;
  CHECK((cert.projection_s(BasePoint::at_angle(0.3)) - ps).norm() <= 1e-12);
  for (double k : cert.k_samples) CHECK(k == doctest::Approx(1.0).epsilon(1e-12));
  const auto rep = verify_certificate(cert, {BasePoint::at_angle(0.9)}, 200, 1 + 1e-9);
  CHECK(rep.worst_ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rate override") {
  const auto base = BaseSystem::rotation();
  const auto c = make("diagonal", {2, 0.5});
  CertificateOptions o;
  o.rate = std::numbers::ln2;
  const auto cert = build_certificate(c, base, spectrum_of(c, base), {BasePoint{}}, o);
  CHECK(cert.k_rate() == doctest::Approx(std::numbers::ln2));
  CHECK(cert.k_samples[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("doubling the rate is caught") {
  const auto base = BaseSystem::rotation();
  const auto c = make("diagonal", {2, 0.5});
  auto cert = build_certificate(c, base, spectrum_of(c, base), {BasePoint{}});
  cert.rate *= 2.0;
  const auto rep = check_certificate(cert, {BasePoint::at_angle(0.2)}, 50, 1.05);
  CHECK_FALSE(rep.passed);
  // already visible on the first few steps
  CHECK_FALSE(check_certificate(cert, {BasePoint::at_angle(0.2)}, 5, 1.05).passed);
  CHECK(code_of([&] { verify_certificate(cert, {BasePoint::at_angle(0.2)}, 50, 1.05); }) == ErrorCode::Violation);
}

TEST_CASE("shear has no certificate") {
  const auto base = BaseSystem::rotation();
  const auto c = make("shear");
  CHECK(code_of([&] { build_certificate(c, base, spectrum_of(c, base), {}); }) == ErrorCode::NotHyperbolic);
}

TEST_CASE("nonuniform rotation certificate") {
  const auto base = BaseSystem::rotation();
  const auto c = make("nonuniform_rotation", {0.5, 0.3});
  Rng rng(61);
  std::vector<BasePoint> pts;
  for (int i = 0; i < 6; ++i) pts.push_back(base.sample(rng));
  const auto cert = build_certificate(c, base, spectrum_of(c, base, 20000), pts);
  double lo = 1e300, hi = 0;
  for (double k : cert.k_samples) {
    CHECK(k >= 1.0);
    CHECK(std::isfinite(k));
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  CHECK(hi > lo * 1.01);  // K genuinely varies with theta

  std::vector<BasePoint> fresh;
  for (int i = 0; i < 6; ++i) fresh.push_back(base.sample(rng));
  const auto rep = check_certificate(cert, fresh, 200, 1.01);
  CHECK(rep.passed);
}

TEST_CASE("projection algebra and commutation") {
  const auto bern = BaseSystem::bernoulli({0.5, 0.5});
  const auto c = make("random_sl2", {}, &bern);
  Rng rng(67);
  const BasePoint w = bern.sample(rng);
  const auto cert = build_certificate(c, bern, lyapunov_exponents(*c, bern, w, {20000, 10, 0.02}), {w});
  const auto fr = cert.frames(w, -5, 5);
  for (std::int64_t k = -5; k <= 5; ++k) {
    const Mat& ps = fr.projection_s(k);
    const Mat pu = fr.projection_u(k);
    CHECK((ps * ps - ps).norm() <= 1e-8);
    CHECK((ps + pu - Mat::Identity(2, 2)).norm() == 0.0);
    CHECK((ps * pu).norm() <= 1e-8);
    if (k < 5) CHECK((fr.projection_s(k + 1) * fr.generator(k) - fr.generator(k) * ps).norm() <= 1e-6);
  }
}

TEST_CASE("certificate soundness on fresh samples for builtin hyperbolic examples") {
  Rng rng(71);
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
    const auto cert = build_certificate(c, base, lyapunov_exponents(*c, base, w, {20000, 10, 0.02}), {w});
    std::vector<BasePoint> fresh;
    for (int i = 0; i < 4; ++i) fresh.push_back(base.sample(rng));
    CHECK(check_certificate(cert, fresh, 200, 1.05).passed);
  }
}

TEST_CASE("temperedness diagnostic") {
  SUBCASE("constant") {
    OrbitSamples k{-100, std::vector<double>(201, 3.0)};
    // log 3 / n is not zero; a constant K > 1 has slopes log K / |n| -> 0.
    const auto r = temperedness_diagnostic(k, {10, 100}, 0.05);
    CHECK(r.passed);
    OrbitSamples one{-100, std::vector<double>(201, 1.0)};
    for (double s : temperedness_diagnostic(one, {10, 50, 100}, 0.05).slopes) CHECK(s == 0.0);
  }
  SUBCASE("planted growth") {
    OrbitSamples k{-200, {}};
    for (std::int64_t j = -200; j <= 200; ++j) k.values.push_back(std::exp(0.1 * std::abs(double(j))));
    const auto r = temperedness_diagnostic(k, {50, 200}, 0.05);
    CHECK_FALSE(r.passed);
    CHECK(r.worst_at_max_horizon == doctest::Approx(0.1));
  }
}

TEST_CASE("nonuniform rotation K is tempered") {
  const auto base = BaseSystem::rotation();
  const auto c = make("nonuniform_rotation", {0.5, 0.3});
  const auto cert = build_certificate(c, base, spectrum_of(c, base, 20000), {});
  const auto k = cert.k_along_orbit(BasePoint{}, -10000, 10000);
  const auto r = temperedness_diagnostic(k, {100, 1000, 10000}, 0.01);
  CHECK(r.passed);
  CHECK(std::abs(r.slopes.back()) <= 1e-3);
}

TEST_CASE("tempered envelope") {
  SUBCASE("constant") {
    const auto e = tempered_envelope({-20, std::vector<double>(41, 5.0)}, 0.1, 10);
    for (double v : e.values.values) CHECK(v == 5.0);
  }
  SUBCASE("spike") {
    OrbitSamples k{-40, std::vector<double>(81, 1.0)};
    k.values[40] = 100.0;
    const double eps = 0.5;
    const auto e = tempered_envelope(k, eps, 20);
    for (std::int64_t j = -20; j <= 20; ++j)
      CHECK(e.values.at(j) == doctest::Approx(std::max(1.0, 100.0 * std::exp(-eps * std::abs(double(j))))));
  }
  SUBCASE("window too small") {
    CHECK(code_of([] { tempered_envelope({-5, std::vector<double>(11, 1.0)}, 0.1, 10); }) ==
          ErrorCode::WindowTooSmall);
  }
  SUBCASE("laws on the nonuniform example") {
    const auto base = BaseSystem::rotation();
    const auto c = make("nonuniform_rotation", {0.5, 0.3});
    const auto cert = build_certificate(c, base, spectrum_of(c, base, 20000), {});
    const std::int64_t W = 150;
    const auto k = cert.k_along_orbit(BasePoint::at_angle(0.21), -2 * W, 2 * W);
    const double eps = cert.rate / 3.0;
    const auto e = tempered_envelope(k, eps, W);
    for (std::int64_t j = -W; j <= W; ++j) {
      CHECK(k.at(j) <= e.values.at(j));
      for (std::int64_t n : {-7, -1, 1, 3, 20})
        if (e.values.contains(j + n))
          CHECK(e.values.at(j + n) <= e.values.at(j) * std::exp(eps * std::abs(double(n))) * (1 + 1e-12));
    }
  }
}
