#include "cocyclelab/base_dynamics.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "cocyclelab/error.hpp"

namespace cocyclelab {

namespace {

constexpr long double kTwoTo64 = 18446744073709551616.0L;

std::uint64_t to_fixed(double fraction) {
  long double f = static_cast<long double>(fraction) - std::floor(static_cast<long double>(fraction));
  long double scaled = f * kTwoTo64;
  if (scaled >= kTwoTo64) return 0;  // fraction rounded up to a full turn
  return static_cast<std::uint64_t>(scaled);
}

std::uint64_t symbol_bits(std::uint64_t seed, std::int64_t index) {
  return splitmix64(splitmix64(seed) ^ (static_cast<std::uint64_t>(index) * 0xD1B54A32D192ED03ULL));
}

}  // namespace

BasePoint BasePoint::at_angle(double theta) { return RotationPoint{to_fixed(theta)}; }

std::uint64_t BasePoint::hash() const noexcept {
  return std::visit(
      [](const auto& p) -> std::uint64_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RotationPoint>) {
          return splitmix64(p.phase ^ 0x5851F42D4C957F2DULL);
        } else if constexpr (std::is_same_v<T, BernoulliPoint>) {
          return splitmix64(p.seed ^ splitmix64(static_cast<std::uint64_t>(p.cursor)));
        } else {
          return splitmix64(0x14057B7EF767814FULL + p.state);
        }
      },
      payload_);
}

std::string BasePoint::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (auto* r = rotation()) {
    os << "rotation(theta=" << r->angle() << ")";
  } else if (auto* b = bernoulli()) {
    os << "bernoulli(seed=" << b->seed << ",cursor=" << b->cursor << ")";
  } else if (auto* p = periodic()) {
    os << "periodic(state=" << p->state << ")";
  }
  return os.str();
}

SetIndicator SetIndicator::whole() { return {[](const BasePoint&) { return true; }, "whole", 1.0}; }

SetIndicator SetIndicator::arc(double lo, double hi) {
  if (hi - lo >= 1.0) return whole();
  const std::uint64_t a = to_fixed(lo);
  const std::uint64_t length = to_fixed(hi - lo);
  std::ostringstream os;
  os << "arc[" << lo << "," << hi << ")";
  double measure = hi - lo;
  measure -= std::floor(measure);
  return {[a, length](const BasePoint& w) {
            const auto* r = w.rotation();
            if (r == nullptr) fail(ErrorCode::IncompatibleBase, "arc indicator evaluated on a non-rotation point");
            return r->phase - a < length;
          },
          os.str(), measure};
}

SetIndicator SetIndicator::cylinder(const BaseSystem& base, std::int64_t start, std::vector<std::size_t> word) {
  require(base.kind() == BaseSystem::Kind::Bernoulli, "cylinder sets need a Bernoulli base");
  double measure = 1.0;
  std::ostringstream os;
  os << "cylinder@" << start << "[";
  for (std::size_t i = 0; i < word.size(); ++i) {
    require(word[i] < base.alphabet_size(), "cylinder symbol out of range");
    measure *= base.probabilities()[word[i]];
    os << (i ? "," : "") << word[i];
  }
  os << "]";
  return {[base, start, word = std::move(word)](const BasePoint& w) {
            for (std::size_t i = 0; i < word.size(); ++i)
              if (base.symbol(w, start + static_cast<std::int64_t>(i)) != word[i]) return false;
            return true;
          },
          os.str(), measure};
}

SetIndicator SetIndicator::periodic_states(std::vector<std::uint32_t> states) {
  std::ostringstream os;
  os << "states{";
  for (std::size_t i = 0; i < states.size(); ++i) os << (i ? "," : "") << states[i];
  os << "}";
  return {[states = std::move(states)](const BasePoint& w) {
            const auto* p = w.periodic();
            if (p == nullptr) fail(ErrorCode::IncompatibleBase, "state indicator evaluated on a non-periodic point");
            for (auto s : states)
              if (s == p->state) return true;
            return false;
          },
          os.str(), std::nullopt};
}

SetIndicator SetIndicator::intersection(SetIndicator a, SetIndicator b) {
  std::string descriptor = a.descriptor + "&" + b.descriptor;
  return {[a = std::move(a.contains), b = std::move(b.contains)](const BasePoint& w) { return a(w) && b(w); },
          std::move(descriptor), std::nullopt};
}

Observable Observable::constant(double c, std::optional<double> declared_mean) {
  std::ostringstream os;
  os << "const(" << c << ")";
  return {[c](const BasePoint&) { return c; }, declared_mean, os.str()};
}

Observable Observable::cosine() {
  return {[](const BasePoint& w) {
            const auto* r = w.rotation();
            if (r == nullptr) fail(ErrorCode::IncompatibleBase, "cosine observable needs a rotation point");
            return std::cos(2.0 * std::numbers::pi * r->angle());
          },
          0.0, "cos(2pi theta)"};
}

BaseSystem BaseSystem::rotation(double gamma) {
  BaseSystem b;
  b.kind_ = Kind::Rotation;
  b.gamma_ = gamma - std::floor(gamma);
  b.gamma_fixed_ = to_fixed(gamma);
  require(b.gamma_fixed_ != 0, "rotation constant must not be an integer");
  std::ostringstream os;
  os.precision(17);
  os << "rotation(gamma=" << b.gamma_ << ")";
  b.descriptor_ = os.str();
  return b;
}

BaseSystem BaseSystem::bernoulli(std::vector<double> probabilities) {
  require(probabilities.size() >= 2, "Bernoulli shift needs at least two symbols");
  double total = 0.0;
  for (double p : probabilities) {
    require(p > 0.0, "Bernoulli probabilities must be positive");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "Bernoulli probabilities must sum to 1");
  BaseSystem b;
  b.kind_ = Kind::Bernoulli;
  b.probabilities_ = std::move(probabilities);
  b.cumulative_.resize(b.probabilities_.size());
  std::partial_sum(b.probabilities_.begin(), b.probabilities_.end(), b.cumulative_.begin());
  b.cumulative_.back() = 1.0;
  std::ostringstream os;
  os << "bernoulli(";
  for (std::size_t i = 0; i < b.probabilities_.size(); ++i) os << (i ? "," : "") << b.probabilities_[i];
  os << ")";
  b.descriptor_ = os.str();
  return b;
}

BaseSystem BaseSystem::periodic(std::uint32_t period) {
  require(period >= 1, "period must be positive");
  BaseSystem b;
  b.kind_ = Kind::Periodic;
  b.period_ = period;
  b.descriptor_ = "periodic(p=" + std::to_string(period) + ")";
  return b;
}

void BaseSystem::check_point(const BasePoint& w) const {
  switch (kind_) {
    case Kind::Rotation:
      if (!w.rotation()) fail(ErrorCode::IncompatibleBase, "expected a rotation point, got " + w.describe());
      break;
    case Kind::Bernoulli:
      if (!w.bernoulli()) fail(ErrorCode::IncompatibleBase, "expected a Bernoulli point, got " + w.describe());
      break;
    case Kind::Periodic:
      if (!w.periodic() || w.periodic()->state >= period_)
        fail(ErrorCode::IncompatibleBase, "expected a state of " + descriptor_ + ", got " + w.describe());
      break;
  }
}

BasePoint BaseSystem::step(const BasePoint& w, std::int64_t k) const {
  check_point(w);
  switch (kind_) {
    case Kind::Rotation:
      return RotationPoint{w.rotation()->phase + static_cast<std::uint64_t>(k) * gamma_fixed_};
    case Kind::Bernoulli: {
      auto p = *w.bernoulli();
      p.cursor += k;
      return p;
    }
    case Kind::Periodic: {
      const auto p = static_cast<std::int64_t>(period_);
      std::int64_t s = (static_cast<std::int64_t>(w.periodic()->state) + k % p) % p;
      if (s < 0) s += p;
      return PeriodicPoint{static_cast<std::uint32_t>(s)};
    }
  }
  return w;
}

BasePoint BaseSystem::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::Rotation:
      return RotationPoint{rng.bits()};
    case Kind::Bernoulli:
      return BernoulliPoint{rng.bits(), 0};
    case Kind::Periodic:
      return PeriodicPoint{static_cast<std::uint32_t>(rng.below(period_))};
  }
  return {};
}

std::size_t BaseSystem::symbol(const BasePoint& w, std::int64_t index) const {
  check_point(w);
  if (kind_ == Kind::Periodic) return step(w, index).periodic()->state;
  if (kind_ != Kind::Bernoulli) fail(ErrorCode::IncompatibleBase, "rotation points carry no symbols");
  const auto& p = *w.bernoulli();
  const double u = unit_interval(symbol_bits(p.seed, p.cursor + index));
  for (std::size_t j = 0; j + 1 < cumulative_.size(); ++j)
    if (u < cumulative_[j]) return j;
  return cumulative_.size() - 1;
}

SetIndicator BaseSystem::small_set(const BasePoint& anchor, double target_measure) const {
  require(target_measure > 0.0, "small_set needs a positive target measure");
  check_point(anchor);
  switch (kind_) {
    case Kind::Rotation: {
      const double lo = anchor.rotation()->angle();
      return SetIndicator::arc(lo, lo + std::min(target_measure, 1.0));
    }
    case Kind::Bernoulli: {
      std::vector<std::size_t> word;
      double measure = 1.0;
      while (measure > target_measure) {
        const std::size_t s = symbol(anchor, static_cast<std::int64_t>(word.size()));
        word.push_back(s);
        measure *= probabilities_[s];
      }
      if (word.empty()) word.push_back(symbol(anchor, 0));
      return SetIndicator::cylinder(*this, 0, std::move(word));
    }
    case Kind::Periodic:
      return SetIndicator::periodic_states({anchor.periodic()->state});
  }
  return SetIndicator::whole();
}

double birkhoff_sum(const BaseSystem& base, const Observable& phi, const BasePoint& w, std::int64_t n) {
  require(n >= 0, "birkhoff_sum needs n >= 0");
  double sum = 0.0;
  BasePoint x = w;
  for (std::int64_t k = 0; k < n; ++k) {
    sum += phi(x);
    x = base.step(x, 1);
  }
  return sum;
}

std::vector<std::int64_t> return_times(const BaseSystem& base, const SetIndicator& F, const BasePoint& w,
                                       std::size_t count, std::int64_t horizon) {
  require(count >= 1 && horizon >= 1, "return_times needs positive count and horizon");
  require(F(w), "return_times: starting point " + w.describe() + " is not in " + F.descriptor);
  std::vector<std::int64_t> times{0};
  times.reserve(count + 1);
  BasePoint x = w;
  for (std::int64_t t = 1; t <= horizon && times.size() <= count; ++t) {
    x = base.step(x, 1);
    if (F(x)) times.push_back(t);
  }
  if (times.size() <= count)
    fail(ErrorCode::HorizonExhausted, "only " + std::to_string(times.size() - 1) + " of " + std::to_string(count) +
                                          " returns to " + F.descriptor + " within horizon " +
                                          std::to_string(horizon));
  return times;
}

double empirical_measure(const BaseSystem& base, const SetIndicator& F, std::size_t samples, Rng& rng) {
  require(samples > 0, "empirical_measure needs samples > 0");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i)
    if (F(base.sample(rng))) ++hits;
  return static_cast<double>(hits) / static_cast<double>(samples);
}

namespace {

SetIndicator tower_base_of(const BaseSystem& base, const SetIndicator& refined, std::int64_t height) {
  return {[base, refined, height](const BasePoint& w) {
            if (!refined(w)) return false;
            for (std::int64_t k = 1; k <= height + 1; ++k)
              if (refined(base.step(w, k))) return false;
            return true;
          },
          "tower(" + refined.descriptor + ",N=" + std::to_string(height) + ")", std::nullopt};
}

}  // namespace

TowerBase rokhlin_base(const BaseSystem& base, const SetIndicator& F, std::int64_t height, std::size_t samples,
                       Rng& rng) {
  if (!base.aperiodic()) fail(ErrorCode::NotAperiodic, "Rokhlin towers need an aperiodic base, got " + base.descriptor());
  require(height >= 0 && samples > 0, "rokhlin_base needs height >= 0 and samples > 0");

  std::vector<BasePoint> drawn(samples);
  for (auto& w : drawn) w = base.sample(rng);
  std::vector<BasePoint> in_F;
  for (const auto& w : drawn)
    if (F(w)) in_F.push_back(w);
  if (in_F.empty()) fail(ErrorCode::EmptyTower, "no sampled point lies in " + F.descriptor);

  auto attempt = [&](SetIndicator refined, bool is_refined) -> std::optional<TowerBase> {
    TowerBase t{tower_base_of(base, refined, height), refined, height, 0.0, is_refined, {}};
    for (const auto& w : drawn)
      if (t.base(w)) t.sample_points.push_back(w);
    if (t.sample_points.empty()) return std::nullopt;
    t.empirical_measure = static_cast<double>(t.sample_points.size()) / static_cast<double>(samples);
    return t;
  };

  if (auto t = attempt(F, false)) return *std::move(t);

  const double target = 1.0 / (2.0 * static_cast<double>(height + 2));
  const std::size_t anchors = std::min<std::size_t>(in_F.size(), 16);
  for (std::size_t i = 0; i < anchors; ++i) {
    // Small set first so the (possibly expensive) F predicate runs rarely.
    auto refined = SetIndicator::intersection(base.small_set(in_F[i], target), F);
    if (auto t = attempt(std::move(refined), true)) return *std::move(t);
  }
  fail(ErrorCode::EmptyTower, "no sampled point lands in a tower base of height " + std::to_string(height) +
                                  " over " + F.descriptor + " (increase samples)");
}

}  // namespace cocyclelab
