#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cocyclelab/cocycle.hpp"
#include "cocyclelab/met.hpp"

namespace cocyclelab {

enum class Classification { Hyperbolic, HasZeroExponent };

std::string_view classification_name(Classification c);

/// Hyperbolic iff every exponent satisfies |lambda_i| > zero_tol. Throws
/// Inconclusive when the estimate is not converged (stderr >= zero_tol / 2)
/// or some |lambda_i| falls in [zero_tol / 2, zero_tol].
Classification classify(const LyapunovSpectrum& spectrum, double zero_tol = 0.02);

/// Real-valued samples along an orbit, indexed by k for sigma^k w.
struct OrbitSamples {
  std::int64_t first = 0;
  std::vector<double> values;

  std::int64_t last() const noexcept { return first + static_cast<std::int64_t>(values.size()) - 1; }
  bool contains(std::int64_t k) const noexcept { return k >= first && k <= last(); }
  double at(std::int64_t k) const { return values.at(static_cast<std::size_t>(k - first)); }
  double max() const;
};

/// Equivariant stable/unstable frames on the orbit window lo <= k <= hi.
/// E^u(k) comes from a forward QR run warmed up for `warmup` steps before lo;
/// E^s(k) from the adjoint QR run warmed up past hi. Both families are
/// invariant under the generator by construction.
class OrbitFrames {
 public:
  OrbitFrames(const Cocycle& c, const BaseSystem& base, const BasePoint& anchor, std::int64_t lo, std::int64_t hi,
              std::size_t stable_dim, std::int64_t warmup);

  std::int64_t lo() const noexcept { return lo_; }
  std::int64_t hi() const noexcept { return hi_; }
  std::size_t dimension() const noexcept { return d_; }
  std::size_t stable_dim() const noexcept { return s_; }
  std::size_t unstable_dim() const noexcept { return d_ - s_; }
  const BasePoint& anchor() const noexcept { return anchor_; }

  /// A(sigma^k w), lo <= k < hi.
  const Mat& generator(std::int64_t k) const { return gen_.at(idx(k)); }
  /// Orthonormal bases, lo <= k <= hi.
  const Mat& unstable(std::int64_t k) const { return unstable_.at(idx(k)); }
  const Mat& stable(std::int64_t k) const { return stable_.at(idx(k)); }
  /// Pi^s(sigma^k w), projection onto E^s along E^u.
  const Mat& projection_s(std::int64_t k) const { return proj_s_.at(idx(k)); }
  Mat projection_u(std::int64_t k) const;
  /// T_k with A(sigma^k w) U_k = U_{k+1} T_k, lo <= k < hi.
  const Mat& unstable_block(std::int64_t k) const { return t_.at(idx(k)); }
  /// Inverse of A(sigma^{k-1} w) restricted to E^u, mapping E^u(k) onto
  /// E^u(k-1), as a d x d matrix vanishing on E^u(k)^perp. lo < k <= hi.
  Mat unstable_inverse(std::int64_t k) const;

 private:
  std::size_t idx(std::int64_t k) const;

  BasePoint anchor_;
  std::int64_t lo_, hi_;
  std::size_t d_, s_;
  std::vector<Mat> gen_, unstable_, stable_, proj_s_, t_, t_inv_;
};

struct CertificateOptions {
  double safety = 0.25;
  std::optional<double> rate;  ///< overrides (1 - safety) min |lambda_i|
  std::int64_t n_max = 200;
  std::int64_t warmup = 0;     ///< 0 selects clamp(ceil(36 / gap), 20, 5000)
  double zero_tol = 0.02;
};

/// Tempered dichotomy data for a hyperbolic cocycle. The projections and the
/// K(w) rule are evaluated on demand along orbits; K uses the rate captured
/// at build time even if `rate` is later changed.
class DichotomyCertificate {
 public:
  CocyclePtr cocycle;
  BaseSystem base;
  LyapunovSpectrum spectrum;
  double rate = 0.0;
  std::size_t stable_dim = 0;
  std::int64_t n_max = 200;
  std::int64_t warmup = 20;
  std::vector<BasePoint> sample_points;
  std::vector<double> k_samples;

  DichotomyCertificate(CocyclePtr c, BaseSystem b, LyapunovSpectrum s, double rate, std::size_t stable_dim,
                       std::int64_t n_max, std::int64_t warmup);

  double k_rate() const noexcept { return k_rate_; }

  OrbitFrames frames(const BasePoint& w, std::int64_t lo, std::int64_t hi) const;
  Mat projection_s(const BasePoint& w) const;

  /// K(w) by direct evaluation of the defining max.
  double k_value(const BasePoint& w) const;
  /// K(sigma^k w) for lo <= k <= hi, sharing one frame computation.
  OrbitSamples k_along_orbit(const BasePoint& w, std::int64_t lo, std::int64_t hi) const;
  /// Same, from frames that cover [lo - n_max, hi + n_max].
  OrbitSamples k_along_orbit(const OrbitFrames& frames, std::int64_t lo, std::int64_t hi) const;

 private:
  double k_rate_;
};

std::int64_t default_warmup(const LyapunovSpectrum& spectrum);

/// Builds the certificate and evaluates K on `samples`. Throws NotHyperbolic
/// (or Inconclusive) unless classify() reports Hyperbolic, and
/// UnstableNotInvertible if the generator is singular on E^u.
DichotomyCertificate build_certificate(CocyclePtr c, const BaseSystem& base, const LyapunovSpectrum& spectrum,
                                       const std::vector<BasePoint>& samples, const CertificateOptions& opts = {});

struct CertificateReport {
  bool passed = true;
  double worst_ratio = 0.0;       ///< max ||.|| / (K e^{-lambda n}) over both inequalities
  BasePoint witness_point;
  std::int64_t witness_n = 0;
  bool witness_unstable = false;  ///< which inequality produced the worst ratio
  std::size_t points_checked = 0;
};

/// Checks both dichotomy inequalities for n <= n_max at each point, using
/// products and least-squares inverses computed independently of the frames.
CertificateReport check_certificate(const DichotomyCertificate& cert, const std::vector<BasePoint>& samples,
                                    std::int64_t n_max, double slack);

/// As check_certificate, throwing Violation with the witness on failure.
CertificateReport verify_certificate(const DichotomyCertificate& cert, const std::vector<BasePoint>& samples,
                                     std::int64_t n_max, double slack);

struct TemperednessReport {
  std::vector<std::int64_t> horizons;  ///< signed n
  std::vector<double> slopes;          ///< (1/|n|) log K(sigma^n w)
  double worst_at_max_horizon = 0.0;
  bool passed = true;
};

TemperednessReport temperedness_diagnostic(const OrbitSamples& k, const std::vector<std::int64_t>& horizons,
                                           double tolerance);

struct TemperedEnvelope {
  double epsilon = 0.0;
  std::int64_t window = 0;
  OrbitSamples values;  ///< K_eps(sigma^k w), |k| <= window
};

/// K_eps(k) = max over available samples m of K(m) e^{-eps |m - k|}; needs
/// samples on |k| <= 2 window (WindowTooSmall otherwise).
TemperedEnvelope tempered_envelope(const OrbitSamples& k, double epsilon, std::int64_t window);

/// Inf-convolution of arbitrary samples with e^{-eps |.|}, same indexing.
OrbitSamples envelope_of(const OrbitSamples& k, double epsilon);

}  // namespace cocyclelab
