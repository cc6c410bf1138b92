#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cocyclelab/admissibility.hpp"
#include "cocyclelab/cocycle.hpp"
#include "cocyclelab/error.hpp"
#include "cocyclelab/met.hpp"

namespace cocyclelab {

struct BirkhoffExtrema {
  double min = 0.0;  ///< min over 1 <= n <= horizon of S_n phi(w)
  double max = 0.0;
  std::int64_t horizon = 0;
  bool straddles_zero() const noexcept { return min <= 0.0 && max >= 0.0; }
};

/// Needs an observable with declared mean 0.
BirkhoffExtrema birkhoff_extrema(const BaseSystem& base, const Observable& phi, const BasePoint& w,
                                 std::int64_t horizon);

inline constexpr std::size_t kRandomDirections = 10000;

struct RecurrentVector {
  Vec v;
  double defect = 0.0;
  double min_norm = 0.0;  ///< min over 1 <= n <= horizon of ||A(w, n) v||
  double max_norm = 0.0;
  std::int64_t horizon = 0;
  std::size_t candidates = 0;
};

/// Grid search over unit vectors of span(basis) for the smallest defect
/// max(0, min_n ||A^n v|| - 1) + max(0, 1 - max_n ||A^n v||), n = 1..steps.size().
/// Two-dimensional spans use `grid` equally spaced angles in [0, pi); higher
/// dimensions use kRandomDirections directions drawn from `rng`. Ties keep the
/// first candidate. Throws NoCandidate if the best defect exceeds 0.5.
RecurrentVector recurrent_vector_search(const std::vector<Mat>& steps, const Mat& basis, std::size_t grid,
                                        Rng& rng);
RecurrentVector recurrent_vector_search(const Cocycle& c, const BaseSystem& base, const BasePoint& w,
                                        const Mat& basis, std::int64_t horizon, std::size_t grid = 720);

/// Index of the distinct exponent closest to zero.
std::size_t zero_block_index(const LyapunovSpectrum& spectrum);

/// Orthonormal basis of that block's space at w: the Oseledets space for
/// invertible cocycles, the slow filtration space otherwise, R^d when the
/// spectrum has a single exponent.
Mat zero_block_basis(const Cocycle& c, const BaseSystem& base, const BasePoint& w, const LyapunovSpectrum& spectrum,
                     std::int64_t window = 400);

struct ManeSequencePair {
  BasePoint anchor;
  Vec v;
  double target = 0.0;
  std::int64_t n_star = 0;  ///< N*
  std::int64_t n_end = 0;   ///< N
  std::vector<Vec> x;       ///< n = 0..N
  std::vector<Vec> y;
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> growth;  ///< ||A(w, n) v||
  std::vector<Mat> steps;      ///< generators used, n = 0..N-1

  Vec x_at(std::int64_t n) const;  ///< zero for n > N
  Vec y_at(std::int64_t n) const;
  double max_x_norm() const;
  double max_y_norm() const;
};

/// Builds the pair along successive generators from `source`. Throws
/// HorizonExhausted if N* or N is not reached within `horizon` steps.
ManeSequencePair mane_sequences(StepSource source, const BasePoint& anchor, const Vec& v, double target,
                                std::int64_t horizon);
ManeSequencePair mane_sequences(const Cocycle& c, const BaseSystem& base, const BasePoint& w, const Vec& v,
                                double target, std::int64_t horizon = 100000);

struct ManeCheck {
  double recurrence = 0.0;  ///< max_n ||x(n+1) - A_n x(n) - y(n+1)||, n < N
  double initial = 0.0;     ///< ||x(0) - y(0)||
  double telescoping = 0.0; ///< max_n | ||x(n)|| - |alpha(n)| ||A^n v|| |
  double alpha_end = 0.0;   ///< |alpha(N)|
  double max_abs_beta = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};
ManeCheck check_mane(const ManeSequencePair& pair);

class InducedCocycle {
 public:
  struct Step {
    Mat value;               ///< A(w, tau_F(w))
    std::int64_t return_time = 0;
    BasePoint next;          ///< sigma^{tau_F(w)} w
  };

  InducedCocycle(CocyclePtr parent, BaseSystem base, SetIndicator F, double measure, double log_norm_mean,
                 std::size_t samples, std::int64_t horizon);

  const CocyclePtr& parent() const noexcept { return parent_; }
  const BaseSystem& base() const noexcept { return base_; }
  const SetIndicator& set() const noexcept { return F_; }
  double measure() const noexcept { return measure_; }
  double log_norm_mean() const noexcept { return log_norm_mean_; }
  std::size_t samples() const noexcept { return samples_; }
  std::int64_t horizon() const noexcept { return horizon_; }
  std::size_t dimension() const noexcept { return parent_->dimension(); }

  /// w must lie in F.
  Step evaluate(const BasePoint& w) const;
  StepSource steps(const BasePoint& w) const;
  /// First `count` generators of the induced orbit of w with cumulative visit
  /// times tau_F(w, m), m = 0..count.
  std::vector<Mat> orbit(const BasePoint& w, std::size_t count, std::vector<std::int64_t>* visits = nullptr) const;

 private:
  CocyclePtr parent_;
  BaseSystem base_;
  SetIndicator F_;
  double measure_;
  double log_norm_mean_;
  std::size_t samples_;
  std::int64_t horizon_;
};

/// Induced cocycle over the first return map to F, with empirical P(F) and
/// the sample mean of log+ ||A-bar|| from `samples` draws.
InducedCocycle induce(CocyclePtr c, const BaseSystem& base, SetIndicator F, std::size_t samples, Rng& rng,
                      std::int64_t horizon = 1000000);

LyapunovSpectrum induced_exponents(const InducedCocycle& ind, const BasePoint& w, const LyapunovOptions& opts = {});

struct InterpolatedSequences {
  BasePoint anchor;
  std::vector<std::int64_t> visits;  ///< tau_F(w, m), m = 0..N
  std::vector<Vec> x;                ///< parent time n = 0..tau_F(w, N)
  std::vector<Vec> y;

  std::int64_t length() const noexcept { return visits.empty() ? 0 : visits.back(); }
  Vec x_at(std::int64_t n) const;
  Vec y_at(std::int64_t n) const;
};

/// Spreads an induced pair over parent time: x evolves freely between visits
/// and y is the induced y at visit times, zero elsewhere.
InterpolatedSequences interpolate_sequences(const InducedCocycle& ind, const ManeSequencePair& pair);

struct InterpolationCheck {
  double recurrence = 0.0;  ///< max ||x(n+1) - A(sigma^n w) x(n) - y(n+1)||
  double initial = 0.0;
  bool y_on_F = true;       ///< y(n) != 0 only when sigma^n w in F
  double max_x = 0.0;
  double max_y = 0.0;
};
InterpolationCheck check_interpolation(const InducedCocycle& ind, const InterpolatedSequences& s);

struct WitnessBudgets {
  std::size_t weight_samples = 2000;
  double level_quantile = 0.5;        ///< M is this quantile of sampled C
  std::size_t height_samples = 40;    ///< F points used to pick the tower height
  double height_quantile = 0.25;
  std::size_t rokhlin_samples = 2000;
  std::size_t offtower_checks = 32;
  std::int64_t search_horizon = 200;
  std::size_t grid = 720;
  std::int64_t mane_horizon = 100000;
  std::int64_t return_horizon = 1000000;
  std::int64_t splitting_window = 400;
  LyapunovOptions spectrum{};
  double zero_tol = 0.02;
  bool weighted_output = false;  ///< weight on f (C >= M on F, target (L+1)/M)
};

struct ViolationWitness {
  TowerBase tower;
  std::int64_t height = 0;
  BasePoint base_point;  ///< w_B in B
  double level = 0.0;    ///< M
  double target = 0.0;   ///< Mane target
  double ratio_goal = 0.0;  ///< L
  double set_measure = 0.0; ///< empirical P(F)
  std::vector<std::int64_t> visits;  ///< visit times of w_B to F
  std::vector<Vec> f_values;  ///< f(sigma^j w_B), j = 0..N+1
  std::vector<Vec> g_values;
  std::vector<double> weights;
  /// ||f||_inf (or ||f||_{inf,C} with weighted_output) observed on the
  /// column over w_B, a lower bound for the global norm.
  double f_norm = 0.0;
  /// Upper bound for ||g||_{inf,C} (M, since g lives on F and ||y|| <= 1),
  /// or for ||g||_inf (1) with weighted_output.
  double g_norm = 0.0;
  double g_column_norm = 0.0;  ///< the same norm of g observed on the column
  double ratio = 0.0;
  double residual = 0.0;           ///< over sigma^j w_B, j = -1..N+2
  double offtower_residual = 0.0;  ///< over random points
  std::size_t offtower_points = 0;
  bool g_supported_on_F = true;
  double defect = 0.0;  ///< recurrence defect of v(w_B)
};

/// End-to-end construction of an admissible pair (f, g) violating the bound
/// ||f|| <= L ||g|| for a cocycle with a zero exponent. Throws NotDegenerate
/// for hyperbolic input and RatioNotAchieved if the budgets are insufficient.
ViolationWitness violation_witness(CocyclePtr c, const BaseSystem& base, const WeightModel& weight, double L,
                                   const WitnessBudgets& budgets, Rng& rng);

}  // namespace cocyclelab
