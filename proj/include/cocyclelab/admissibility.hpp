#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cocyclelab/cocycle.hpp"
#include "cocyclelab/dichotomy.hpp"

namespace cocyclelab {

/// Positive weight C(w) for weighted sup norms.
struct WeightModel {
  std::function<double(const BasePoint&)> eval;
  bool tempered = true;
  std::string descriptor;

  double operator()(const BasePoint& w) const { return eval(w); }

  static WeightModel unit();
  static WeightModel constant(double c);
  /// C = K from the certificate.
  static WeightModel certificate_k(const DichotomyCertificate& cert);
  /// C = 1 / K_eps, with K_eps evaluated on a window of half-width `window`.
  static WeightModel inverse_envelope(const DichotomyCertificate& cert, double epsilon, std::int64_t window);
};

/// C(sigma^k w) on lo <= k <= hi. Throws InvalidArgument on non-positive values.
OrbitSamples sample_weight(const WeightModel& c, const BaseSystem& base, const BasePoint& anchor, std::int64_t lo,
                           std::int64_t hi);

/// max_k ||f(sigma^k w)||
double sup_norm(const OrbitFunction& f);
/// max_k C(sigma^k w) ||f(sigma^k w)||; the weight must cover f's window.
double weighted_norm(const OrbitFunction& f, const OrbitSamples& weight);
double weighted_norm(const OrbitFunction& f, const WeightModel& c, const BaseSystem& base);

struct GreenSolution {
  OrbitFunction f;
  double tail_bound = 0.0;
  double k_hat = 0.0;  ///< max of the lambda/3 envelope over the output window
  std::int64_t n_tail = 0;
};

/// Truncated Green series for f - A f(sigma^{-1} .) = g on an orbit window.
/// Frames and K samples for the g window are computed once so that many
/// right-hand sides can be solved cheaply.
class GreenSolver {
 public:
  GreenSolver(const DichotomyCertificate& cert, const BasePoint& anchor, std::int64_t g_first, std::int64_t g_last,
              std::int64_t n_tail = 60);

  std::int64_t g_first() const noexcept { return g_first_; }
  std::int64_t g_last() const noexcept { return g_last_; }
  std::int64_t out_first() const noexcept { return g_first_ + n_tail_; }
  std::int64_t out_last() const noexcept { return g_last_ - n_tail_; }
  std::int64_t n_tail() const noexcept { return n_tail_; }
  const BasePoint& anchor() const noexcept { return anchor_; }
  const OrbitFrames& frames() const noexcept { return frames_; }
  const DichotomyCertificate& certificate() const noexcept { return *cert_; }
  /// K(sigma^k w) on the g window.
  const OrbitSamples& k_samples() const noexcept { return k_; }
  /// Windowed K_eps on the g window.
  OrbitSamples k_envelope(double epsilon) const { return envelope_of(k_, epsilon); }

  /// Throws TailTooLarge when tail_tol is set and the bound exceeds it.
  GreenSolution solve(const OrbitFunction& g, std::optional<double> tail_tol = std::nullopt) const;

  /// Applies the truncated series to h, treating h as zero outside its
  /// window; the output lives on h's window. Used by the perturbation solver.
  OrbitFunction apply_series(const OrbitFunction& h) const;

 private:
  const DichotomyCertificate* cert_;
  BasePoint anchor_;
  std::int64_t g_first_, g_last_, n_tail_;
  OrbitFrames frames_;
  OrbitSamples k_;
};

GreenSolution green_solve(const DichotomyCertificate& cert, const OrbitFunction& g, std::int64_t n_tail = 60,
                          std::optional<double> tail_tol = std::nullopt);

/// max over the common window (minus its left edge) of
/// ||f(k) - A(sigma^{k-1} w) f(k-1) - g(k)||.
double residual(const Cocycle& c, const BaseSystem& base, const OrbitFunction& f, const OrbitFunction& g);

/// Dense solve of f_k - A(state k-1) f_{k-1} = g_k over the p states of a
/// periodic base. Throws SingularSystem when Id - Mather is singular.
std::vector<Vec> oracle_solve_periodic(const Cocycle& c, const BaseSystem& base, const std::vector<Vec>& g);

enum class PairOrientation {
  WeightedInput,   ///< (L^inf, L^inf_C) with C = K
  WeightedOutput,  ///< (L^inf_C, L^inf) with C = 1 / K_{lambda/3}
};

/// Analytic constant of the orientation at rate lambda.
double analytic_bound(PairOrientation o, double lambda);

/// Output-norm / input-norm for one right-hand side, nullopt for g = 0.
std::optional<double> bound_ratio(const GreenSolver& solver, PairOrientation o, const OrbitFunction& g);

struct BoundProbeReport {
  double empirical = 0.0;
  double analytic = 0.0;
  std::size_t trials_used = 0;
  std::int64_t window = 0;
};

/// Random g trials (alternately coherent and i.i.d. unit directions, scaled
/// so the input norm is 1) on the output window |k| <= window.
BoundProbeReport bound_probe(const DichotomyCertificate& cert, PairOrientation o, const BasePoint& anchor,
                             std::size_t trials, std::int64_t window, std::int64_t n_tail, Rng& rng);

struct UniquenessReport {
  std::vector<double> stable_decay;    ///< ||A(sigma^{-n} w, n) Pi^s(sigma^{-n} w)||, n = 1..window
  std::vector<double> unstable_decay;  ///< ||A(sigma^n w, -n) Pi^u(sigma^n w)||
  std::int64_t decay_step = -1;        ///< first n with both below tolerance
  double tolerance = 1e-6;
};

/// Throws NoDecay (with a witness direction) if the homogeneous propagation
/// does not drop below `tolerance` within the window.
UniquenessReport uniqueness_probe(const DichotomyCertificate& cert, const BasePoint& w, std::int64_t window,
                                  double tolerance = 1e-6);

}  // namespace cocyclelab
