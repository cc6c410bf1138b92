#pragma once

#include <cstdint>
#include <vector>

#include "cocyclelab/admissibility.hpp"
#include "cocyclelab/dichotomy.hpp"
#include "cocyclelab/error.hpp"
#include "cocyclelab/met.hpp"

namespace cocyclelab {

/// Admissible perturbation size c(w) = d / K(sigma w) with contraction factor
/// q = d (1 + e^{-lambda}) / (1 - e^{-lambda}) < 1.
struct PerturbationBudget {
  double rate = 0.0;    ///< lambda of the K rule
  double factor = 0.0;  ///< (1 + e^{-lambda}) / (1 - e^{-lambda})
  double d = 0.0;
  double q = 0.0;

  /// c(w) given K(sigma w).
  double allowance(double k_next) const { return d / k_next; }
  /// c(w) evaluated through the certificate (one K evaluation at sigma w).
  double allowance(const DichotomyCertificate& cert, const BasePoint& w) const;
};

/// d = safety / factor, so q = safety. Throws InvalidArgument unless 0 < safety < 1.
PerturbationBudget budget(const DichotomyCertificate& cert, double safety = 0.5);

/// c(sigma^k w) for lo <= k <= hi from K samples covering [lo + 1, hi + 1].
OrbitSamples allowance_along(const PerturbationBudget& b, const OrbitSamples& k, std::int64_t lo, std::int64_t hi);

/// Random perturbation directions R(w) / ||R(w)||, a deterministic function
/// of (point, seed).
struct PerturbationField {
  std::uint64_t seed = 0;
  double scale = 1.0 - 1e-6;  ///< fraction of c(w) used

  Mat direction(const BasePoint& w, std::size_t d) const;
};

/// B(w) = A(w) + scale c(w) R(w) / ||R(w)||. Each evaluation computes K(sigma w).
CocyclePtr perturbed_cocycle(const DichotomyCertificate& cert, const PerturbationBudget& b,
                             const PerturbationField& field);

/// Generators of the same perturbed cocycle along the forward orbit of w,
/// with K evaluated in blocks of `block` points to share frame work.
StepSource perturbed_steps(const DichotomyCertificate& cert, const PerturbationBudget& b,
                           const PerturbationField& field, const BasePoint& w, std::int64_t block = 1000);

struct ContractionResult {
  OrbitFunction f;
  std::int64_t iterations = 0;
  std::vector<double> steps;   ///< sup ||f_{k+1} - f_k|| per iteration
  std::vector<double> ratios;  ///< steps[k] / steps[k-1]
  double max_ratio = 0.0;      ///< over iterations whose step is above 1e3 eps
  double residual = 0.0;       ///< against the perturbed cocycle
  double budget_use = 0.0;     ///< max ||B - A|| / c over the window
};

/// Fixed-point iteration f <- T f, where T f solves f - A f(sigma^{-1}) =
/// (B - A) f(sigma^{-1}) + g with the dichotomy series. Throws BudgetViolated
/// if ||B - A|| > c somewhere in the window and NoConvergence after max_iters.
ContractionResult contraction_solve(const Cocycle& a, const Cocycle& b, const DichotomyCertificate& cert,
                                    const PerturbationBudget& budget, const OrbitFunction& g, double tol = 1e-10,
                                    std::int64_t max_iters = 200);

struct PerturbedReport {
  LyapunovSpectrum spectrum;
  bool hyperbolic = false;
  bool inconclusive = false;  ///< classify could not decide
  double margin = 0.0;  ///< min |lambda_i| over finite exponents
};

PerturbedReport perturbed_check(StepSource steps, std::size_t d, const LyapunovOptions& opts = {},
                                double zero_tol = 0.02);
PerturbedReport perturbed_check(const Cocycle& b, const BaseSystem& base, const BasePoint& w,
                                const LyapunovOptions& opts = {}, double zero_tol = 0.02);

}  // namespace cocyclelab
