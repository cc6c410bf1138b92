#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cocyclelab/random.hpp"

namespace cocyclelab {

/// Point on the circle stored as a 64-bit fixed-point fraction of a turn, so
/// rotation steps are exact integer additions mod 2^64.
struct RotationPoint {
  std::uint64_t phase = 0;
  double angle() const noexcept { return unit_interval(phase); }
  friend bool operator==(const RotationPoint&, const RotationPoint&) = default;
};

/// Two-sided Bernoulli sequence: symbols are a deterministic hash of
/// (seed, absolute index); the cursor marks the coordinate at index 0.
struct BernoulliPoint {
  std::uint64_t seed = 0;
  std::int64_t cursor = 0;
  friend bool operator==(const BernoulliPoint&, const BernoulliPoint&) = default;
};

struct PeriodicPoint {
  std::uint32_t state = 0;
  friend bool operator==(const PeriodicPoint&, const PeriodicPoint&) = default;
};

class BasePoint {
 public:
  using Payload = std::variant<RotationPoint, BernoulliPoint, PeriodicPoint>;

  BasePoint() = default;
  BasePoint(RotationPoint p) : payload_(p) {}
  BasePoint(BernoulliPoint p) : payload_(p) {}
  BasePoint(PeriodicPoint p) : payload_(p) {}

  static BasePoint at_angle(double theta);

  const Payload& payload() const noexcept { return payload_; }
  const RotationPoint* rotation() const noexcept { return std::get_if<RotationPoint>(&payload_); }
  const BernoulliPoint* bernoulli() const noexcept { return std::get_if<BernoulliPoint>(&payload_); }
  const PeriodicPoint* periodic() const noexcept { return std::get_if<PeriodicPoint>(&payload_); }

  /// Stable 64-bit identifier of the point (used to derive point-dependent
  /// randomness, e.g. perturbation fields).
  std::uint64_t hash() const noexcept;
  std::string describe() const;

  friend bool operator==(const BasePoint&, const BasePoint&) = default;

 private:
  Payload payload_ = RotationPoint{};
};

class BaseSystem;

/// Measurable set represented by a membership predicate. `measure` is set
/// when the exact measure is known in closed form.
struct SetIndicator {
  std::function<bool(const BasePoint&)> contains;
  std::string descriptor;
  std::optional<double> measure;

  bool operator()(const BasePoint& w) const { return contains(w); }

  static SetIndicator whole();
  /// Rotation points with angle in [lo, hi) (mod 1 arcs with lo > hi wrap).
  static SetIndicator arc(double lo, double hi);
  /// Bernoulli points whose symbols at indices start, start+1, ... match `word`.
  static SetIndicator cylinder(const BaseSystem& base, std::int64_t start, std::vector<std::size_t> word);
  static SetIndicator periodic_states(std::vector<std::uint32_t> states);
  static SetIndicator intersection(SetIndicator a, SetIndicator b);
};

/// Real-valued observable with an optional declared mean.
struct Observable {
  std::function<double(const BasePoint&)> eval;
  std::optional<double> mean;
  std::string descriptor;

  double operator()(const BasePoint& w) const { return eval(w); }

  static Observable constant(double c, std::optional<double> declared_mean = std::nullopt);
  /// cos(2 pi theta) on rotation points; mean 0.
  static Observable cosine();
};

/// Invertible ergodic base system: irrational rotation, two-sided Bernoulli
/// shift, or a finite cyclic permutation (the latter non-aperiodic and meant
/// for exact linear-algebra oracles only).
class BaseSystem {
 public:
  enum class Kind { Rotation, Bernoulli, Periodic };

  static constexpr double kGoldenGamma = 0.6180339887498948482;

  static BaseSystem rotation(double gamma = kGoldenGamma);
  static BaseSystem bernoulli(std::vector<double> probabilities);
  static BaseSystem periodic(std::uint32_t period);

  Kind kind() const noexcept { return kind_; }
  bool aperiodic() const noexcept { return kind_ != Kind::Periodic; }
  const std::string& descriptor() const noexcept { return descriptor_; }

  double gamma() const noexcept { return gamma_; }
  const std::vector<double>& probabilities() const noexcept { return probabilities_; }
  std::uint32_t period() const noexcept { return period_; }
  std::size_t alphabet_size() const noexcept { return probabilities_.size(); }

  /// sigma^k applied to w. Exact: step(step(w, a), b) == step(w, a + b).
  BasePoint step(const BasePoint& w, std::int64_t k) const;

  /// Draws a point distributed according to the invariant measure.
  BasePoint sample(Rng& rng) const;

  /// Bernoulli: symbol at `index` relative to the cursor. Periodic: the state
  /// (index shifts it). Rotation points have no symbols.
  std::size_t symbol(const BasePoint& w, std::int64_t index = 0) const;

  /// A set of measure at most `target_measure` containing `anchor`
  /// (an arc on the circle or a cylinder on the shift).
  SetIndicator small_set(const BasePoint& anchor, double target_measure) const;

  /// Checks that `w` belongs to this system (variant and ranges).
  void check_point(const BasePoint& w) const;

 private:
  BaseSystem() = default;

  Kind kind_ = Kind::Rotation;
  std::string descriptor_;
  double gamma_ = 0.0;
  std::uint64_t gamma_fixed_ = 0;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
  std::uint32_t period_ = 1;
};

/// S_n phi(w) = sum_{k<n} phi(sigma^k w).
double birkhoff_sum(const BaseSystem& base, const Observable& phi, const BasePoint& w, std::int64_t n);

/// Successive visit times 0 = t_0 < t_1 < ... < t_count of the forward orbit
/// of w (which must lie in F) to F. Throws HorizonExhausted when fewer than
/// `count` returns happen within `horizon` steps.
std::vector<std::int64_t> return_times(const BaseSystem& base, const SetIndicator& F, const BasePoint& w,
                                       std::size_t count, std::int64_t horizon);

/// Fraction of `samples` points drawn from the invariant measure that lie in F.
double empirical_measure(const BaseSystem& base, const SetIndicator& F, std::size_t samples, Rng& rng);

struct TowerBase {
  SetIndicator base;         ///< B
  SetIndicator refined_set;  ///< F' with B = {w in F' : tau_F'(w) > height + 1}
  std::int64_t height = 0;   ///< N: sigma^n B pairwise disjoint for 0 <= n <= N + 1
  double empirical_measure = 0.0;
  bool refined = false;
  std::vector<BasePoint> sample_points;  ///< sampled points found in B
};

/// Rokhlin-tower base B inside F. F is first used unrefined; if no sampled
/// point lands in B, F is intersected with small sets of measure at most
/// 1/(2(N+2)) anchored at sampled points of F.
TowerBase rokhlin_base(const BaseSystem& base, const SetIndicator& F, std::int64_t height, std::size_t samples,
                       Rng& rng);

}  // namespace cocyclelab
