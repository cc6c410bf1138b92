#pragma once

#include <cstdint>
#include <vector>

#include "cocyclelab/cocycle.hpp"

namespace cocyclelab {

/// Exponents at or below this value (nats per step) are reported as
/// effectively minus infinity.
inline constexpr double kMinusInfinityThreshold = -20.0;

struct LyapunovSpectrum {
  std::vector<double> exponents;            ///< distinct, strictly decreasing
  std::vector<std::size_t> multiplicities;  ///< sums to the dimension
  std::vector<double> standard_errors;      ///< per distinct exponent
  std::int64_t steps = 0;
  std::vector<double> raw;  ///< unmerged per-direction estimates, decreasing
  std::vector<double> raw_standard_errors;

  std::size_t dimension() const;
  std::size_t count() const noexcept { return exponents.size(); }
  bool minus_infinity(std::size_t i) const { return exponents.at(i) <= kMinusInfinityThreshold; }
  /// Smallest positive exponent minus largest negative exponent; 0 if either side is empty.
  double hyperbolic_gap() const;
  /// Smallest gap between consecutive distinct exponents (inf for one exponent).
  double min_gap() const;
  double max_standard_error() const;
};

struct LyapunovOptions {
  std::int64_t steps = 10000;
  std::int64_t reorth = 10;
  double gap_tol = 0.02;
};

/// Benettin QR estimates along the forward orbit of w.
LyapunovSpectrum lyapunov_exponents(const Cocycle& c, const BaseSystem& base, const BasePoint& w,
                                    const LyapunovOptions& opts = {});

/// Same estimator over an arbitrary step source of dimension d.
LyapunovSpectrum lyapunov_exponents(StepSource source, std::size_t d, const LyapunovOptions& opts = {});

/// Merges sorted raw estimates closer than gap_tol (chained) into blocks.
LyapunovSpectrum merge_exponents(std::vector<double> raw, std::vector<double> raw_standard_errors,
                                 std::int64_t steps, double gap_tol);

/// Running raw estimates recorded every `every` steps (for convergence plots).
struct TracePoint {
  std::int64_t step = 0;
  std::vector<double> raw;
};
std::vector<TracePoint> lyapunov_trace(StepSource source, std::size_t d, std::int64_t steps, std::int64_t every,
                                       std::int64_t reorth = 10);

/// (1/n) log ||A(w, n) v||, renormalizing every step.
double vector_exponent(const Cocycle& c, const BaseSystem& base, const BasePoint& w, const Vec& v, std::int64_t n);

struct OseledetsSplitting {
  BasePoint point;
  std::int64_t window = 0;
  std::vector<double> exponents;
  std::vector<std::size_t> multiplicities;
  std::vector<Mat> spaces;  ///< E_i(w), orthonormal columns
  std::vector<Mat> fast;    ///< E_1 + ... + E_i (leading filtration)
  std::vector<Mat> slow;    ///< E_i + ... + E_k (trailing filtration)
  double min_cosine = 1.0;  ///< worst principal cosine used to form an intersection
  double rcond = 1.0;       ///< sigma_min / sigma_max of [E_1 | ... | E_k]
  double equivariance_defect = 0.0;  ///< max_i dist(A(w) E_i(w), E_i(sigma w))
};

struct SplittingOptions {
  std::int64_t window = 400;
  double cosine_tol = 1e-6;
  double rcond_tol = 1e-8;
  bool compute_defect = true;
};

/// E_i(w) as intersections of the slow filtration of A(w, W) and the fast
/// filtration of A(sigma^{-W} w, W).
OseledetsSplitting oseledets_splitting(const Cocycle& c, const BaseSystem& base, const BasePoint& w,
                                       const LyapunovSpectrum& spectrum, const SplittingOptions& opts = {});

/// Slow filtration V_1 = R^d > V_2 > ... > V_k at w; V_i collects vectors
/// growing at rate at most lambda_i. Works for non-invertible generators.
std::vector<Mat> forward_filtration(const Cocycle& c, const BaseSystem& base, const BasePoint& w,
                                    const LyapunovSpectrum& spectrum, std::int64_t window);

/// Fast filtration U_1 < U_2 < ... < U_k = R^d at w, from a forward QR run
/// started at sigma^{-window} w.
std::vector<Mat> backward_fast_filtration(const Cocycle& c, const BaseSystem& base, const BasePoint& w,
                                          const LyapunovSpectrum& spectrum, std::int64_t window);

}  // namespace cocyclelab
