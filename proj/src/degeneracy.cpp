#include "cocyclelab/degeneracy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "cocyclelab/dichotomy.hpp"
#include "cocyclelab/error.hpp"

namespace cocyclelab {

BirkhoffExtrema birkhoff_extrema(const BaseSystem& base, const Observable& phi, const BasePoint& w,
                                 std::int64_t horizon) {
  require(phi.mean.has_value() && *phi.mean == 0.0, "birkhoff_extrema needs an observable with declared mean 0");
  require(horizon >= 1, "birkhoff_extrema needs horizon >= 1");
  BirkhoffExtrema out;
  out.horizon = horizon;
  out.min = std::numeric_limits<double>::infinity();
  out.max = -std::numeric_limits<double>::infinity();
  double s = 0.0;
  BasePoint x = w;
  for (std::int64_t n = 1; n <= horizon; ++n) {
    s += phi(x);
    x = base.step(x, 1);
    out.min = std::min(out.min, s);
    out.max = std::max(out.max, s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// recurrent vectors

namespace {

struct NormRange {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double defect() const { return std::max(0.0, lo - 1.0) + std::max(0.0, 1.0 - hi); }
};

}  // namespace

RecurrentVector recurrent_vector_search(const std::vector<Mat>& steps, const Mat& basis, std::size_t grid,
                                        Rng& rng) {
  require(!steps.empty(), "recurrent_vector_search needs at least one step");
  require(basis.cols() >= 1 && basis.rows() >= basis.cols(), "recurrent_vector_search needs a non-empty basis");
  require(grid >= 1, "recurrent_vector_search needs grid >= 1");
  const Mat e0 = orthonormal_basis(basis);
  const Eigen::Index k = e0.cols();
  require(k == basis.cols(), "recurrent_vector_search basis is rank deficient");

  // Images of the basis, M_n = A^n E0.
  std::vector<Mat> images;
  images.reserve(steps.size());
  Mat m = e0;
  for (const auto& a : steps) {
    m = a * m;
    images.push_back(m);
  }

  RecurrentVector best;
  best.horizon = static_cast<std::int64_t>(steps.size());
  best.defect = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vec& u, const NormRange& r) {
    ++best.candidates;
    const double d = r.defect();
    if (d < best.defect) {
      best.defect = d;
      best.v = e0 * u;
      best.min_norm = r.lo;
      best.max_norm = r.hi;
    }
  };

  if (k <= 2) {
    // Quadratic forms of the Gram matrices keep the 2-D sweep cheap.
    std::vector<std::array<double, 3>> gram;
    gram.reserve(images.size());
    for (const auto& im : images) {
      const double g00 = im.col(0).squaredNorm();
      const double g01 = k == 2 ? im.col(0).dot(im.col(1)) : 0.0;
      const double g11 = k == 2 ? im.col(1).squaredNorm() : 0.0;
      gram.push_back({g00, g01, g11});
    }
    const std::size_t count = k == 1 ? 1 : grid;
    for (std::size_t j = 0; j < count; ++j) {
      const double th = std::numbers::pi * static_cast<double>(j) / static_cast<double>(count);
      const double c = std::cos(th), s = std::sin(th);
      double lo2 = std::numeric_limits<double>::infinity(), hi2 = 0.0;
      for (const auto& g : gram) {
        const double n2 = g[0] * c * c + 2.0 * g[1] * c * s + g[2] * s * s;
        lo2 = std::min(lo2, n2);
        hi2 = std::max(hi2, n2);
      }
      const NormRange r{std::sqrt(std::max(0.0, lo2)), std::sqrt(std::max(0.0, hi2))};
      Vec u(k);
      u(0) = c;
      if (k == 2) u(1) = s;
      consider(u, r);
    }
  } else {
    for (std::size_t j = 0; j < kRandomDirections; ++j) {
      const Vec u = rng.unit_vector(k);
      NormRange r;
      for (const auto& im : images) {
        const double n = (im * u).norm();
        r.lo = std::min(r.lo, n);
        r.hi = std::max(r.hi, n);
      }
      consider(u, r);
    }
  }

  if (!(best.defect <= 0.5))
    fail(ErrorCode::NoCandidate, "best recurrence defect " + std::to_string(best.defect) + " over horizon " +
                                     std::to_string(best.horizon) + " exceeds 0.5");
  return best;
}

RecurrentVector recurrent_vector_search(const Cocycle& c, const BaseSystem& base, const BasePoint& w,
                                        const Mat& basis, std::int64_t horizon, std::size_t grid) {
  require(horizon >= 1, "recurrent_vector_search needs horizon >= 1");
  std::vector<Mat> steps;
  steps.reserve(static_cast<std::size_t>(horizon));
  BasePoint x = w;
  for (std::int64_t n = 0; n < horizon; ++n) {
    steps.push_back(c.generator(x));
    x = base.step(x, 1);
  }
  Rng rng(w.hash());
  return recurrent_vector_search(steps, basis, grid, rng);
}

std::size_t zero_block_index(const LyapunovSpectrum& spectrum) {
  require(spectrum.count() > 0, "empty spectrum");
  std::size_t best = 0;
  for (std::size_t i = 1; i < spectrum.count(); ++i)
    if (std::abs(spectrum.exponents[i]) < std::abs(spectrum.exponents[best])) best = i;
  return best;
}

Mat zero_block_basis(const Cocycle& c, const BaseSystem& base, const BasePoint& w, const LyapunovSpectrum& spectrum,
                     std::int64_t window) {
  const auto d = static_cast<Eigen::Index>(c.dimension());
  if (spectrum.count() == 1) return Mat::Identity(d, d);
  const std::size_t i = zero_block_index(spectrum);
  if (c.invertible()) {
    SplittingOptions so;
    so.window = window;
    so.compute_defect = false;
    return oseledets_splitting(c, base, w, spectrum, so).spaces.at(i);
  }
  return forward_filtration(c, base, w, spectrum, window).at(i);
}

// ---------------------------------------------------------------------------
// Mane sequences

Vec ManeSequencePair::x_at(std::int64_t n) const {
  if (n < 0 || n > n_end) return Vec::Zero(v.size());
  return x.at(static_cast<std::size_t>(n));
}

Vec ManeSequencePair::y_at(std::int64_t n) const {
  if (n < 0 || n > n_end) return Vec::Zero(v.size());
  return y.at(static_cast<std::size_t>(n));
}

double ManeSequencePair::max_x_norm() const {
  double m = 0.0;
  for (const auto& e : x) m = std::max(m, e.norm());
  return m;
}

double ManeSequencePair::max_y_norm() const {
  double m = 0.0;
  for (const auto& e : y) m = std::max(m, e.norm());
  return m;
}

ManeSequencePair mane_sequences(StepSource source, const BasePoint& anchor, const Vec& v, double target,
                                std::int64_t horizon) {
  require(target >= 0.0 && std::isfinite(target), "mane_sequences needs a finite target >= 0");
  require(std::abs(v.norm() - 1.0) <= 1e-12, "mane_sequences needs a unit vector");
  require(horizon >= 1, "mane_sequences needs horizon >= 1");

  ManeSequencePair p;
  p.anchor = anchor;
  p.v = v;
  p.target = target;

  Vec image = v;  // A^n v
  double alpha = 0.0;
  bool descending = false;
  for (std::int64_t n = 0;; ++n) {
    if (n > 0) {
      if (n > horizon)
        fail(ErrorCode::HorizonExhausted, std::string(descending ? "N" : "N*") + " not reached within " +
                                              std::to_string(horizon) + " steps (target " +
                                              std::to_string(target) + ")");
      p.steps.push_back(source());
      image = p.steps.back() * image;
    }
    const double a = image.norm();
    if (!(a > 0.0) || !std::isfinite(a))
      fail(ErrorCode::Degenerate, "||A(w, n) v|| left (0, inf) at n = " + std::to_string(n));

    double beta = 0.0;
    bool done = false;
    if (!descending) {
      beta = 1.0;
      alpha += 1.0 / a;
      if (alpha * a >= target) {
        descending = true;
        p.n_star = n;
      }
    } else if (alpha <= 1.0 / a) {
      beta = -alpha * a;
      alpha = 0.0;
      done = true;
    } else {
      beta = -1.0;
      alpha -= 1.0 / a;
    }
    p.beta.push_back(beta);
    p.alpha.push_back(alpha);
    p.growth.push_back(a);
    p.x.push_back(alpha * image);
    p.y.push_back((beta / a) * image);
    if (done) {
      p.n_end = n;
      return p;
    }
  }
}

ManeSequencePair mane_sequences(const Cocycle& c, const BaseSystem& base, const BasePoint& w, const Vec& v,
                                double target, std::int64_t horizon) {
  BasePoint x = w;
  StepSource source = [&c, &base, x]() mutable {
    Mat a = c.generator(x);
    x = base.step(x, 1);
    return a;
  };
  return mane_sequences(std::move(source), w, v, target, horizon);
}

ManeCheck check_mane(const ManeSequencePair& p) {
  ManeCheck out;
  out.initial = (p.x.front() - p.y.front()).norm();
  for (std::int64_t n = 0; n < p.n_end; ++n) {
    const auto i = static_cast<std::size_t>(n);
    out.recurrence = std::max(out.recurrence, (p.x[i + 1] - p.steps[i] * p.x[i] - p.y[i + 1]).norm());
  }
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    out.telescoping = std::max(out.telescoping, std::abs(p.x[i].norm() - std::abs(p.alpha[i]) * p.growth[i]));
    out.max_abs_beta = std::max(out.max_abs_beta, std::abs(p.beta[i]));
  }
  out.alpha_end = std::abs(p.alpha.back());
  out.max_x = p.max_x_norm();
  out.max_y = p.max_y_norm();
  return out;
}

// ---------------------------------------------------------------------------
// induced cocycles

InducedCocycle::InducedCocycle(CocyclePtr parent, BaseSystem base, SetIndicator F, double measure,
                               double log_norm_mean, std::size_t samples, std::int64_t horizon)
    : parent_(std::move(parent)),
      base_(std::move(base)),
      F_(std::move(F)),
      measure_(measure),
      log_norm_mean_(log_norm_mean),
      samples_(samples),
      horizon_(horizon) {
  require(parent_ != nullptr, "InducedCocycle needs a parent cocycle");
  require(horizon_ >= 1, "InducedCocycle needs horizon >= 1");
}

InducedCocycle::Step InducedCocycle::evaluate(const BasePoint& w) const {
  require(F_(w), "induced generator evaluated outside " + F_.descriptor);
  Step s;
  s.value = parent_->generator(w);
  BasePoint x = base_.step(w, 1);
  std::int64_t t = 1;
  while (!F_(x)) {
    if (t >= horizon_)
      fail(ErrorCode::HorizonExhausted, "no return to " + F_.descriptor + " within " + std::to_string(horizon_) +
                                            " steps from " + w.describe());
    s.value = parent_->generator(x) * s.value;
    x = base_.step(x, 1);
    ++t;
  }
  s.return_time = t;
  s.next = x;
  return s;
}

StepSource InducedCocycle::steps(const BasePoint& w) const {
  require(F_(w), "induced orbit must start in " + F_.descriptor);
  BasePoint x = w;
  return [this, x]() mutable {
    Step s = evaluate(x);
    x = s.next;
    return std::move(s.value);
  };
}

std::vector<Mat> InducedCocycle::orbit(const BasePoint& w, std::size_t count,
                                       std::vector<std::int64_t>* visits) const {
  std::vector<Mat> out;
  out.reserve(count);
  if (visits) visits->assign(1, 0);
  BasePoint x = w;
  std::int64_t t = 0;
  for (std::size_t m = 0; m < count; ++m) {
    Step s = evaluate(x);
    t += s.return_time;
    if (visits) visits->push_back(t);
    out.push_back(std::move(s.value));
    x = s.next;
  }
  return out;
}

InducedCocycle induce(CocyclePtr c, const BaseSystem& base, SetIndicator F, std::size_t samples, Rng& rng,
                      std::int64_t horizon) {
  require(c != nullptr, "induce needs a cocycle");
  require(samples > 0, "induce needs samples > 0");
  if (!base.aperiodic()) fail(ErrorCode::NotAperiodic, "inducing needs an aperiodic base, got " + base.descriptor());

  std::vector<BasePoint> in_F;
  for (std::size_t i = 0; i < samples; ++i) {
    BasePoint w = base.sample(rng);
    if (F(w)) in_F.push_back(w);
  }
  require(!in_F.empty(), "induce: no sampled point lies in " + F.descriptor);
  const double measure = static_cast<double>(in_F.size()) / static_cast<double>(samples);

  InducedCocycle ind(std::move(c), base, std::move(F), measure, 0.0, samples, horizon);
  double log_sum = 0.0;
  for (const auto& w : in_F) log_sum += std::max(0.0, std::log(spectral_norm(ind.evaluate(w).value)));
  return InducedCocycle(ind.parent(), base, ind.set(), measure, log_sum / static_cast<double>(in_F.size()), samples,
                        horizon);
}

LyapunovSpectrum induced_exponents(const InducedCocycle& ind, const BasePoint& w, const LyapunovOptions& opts) {
  return lyapunov_exponents(ind.steps(w), ind.dimension(), opts);
}

// ---------------------------------------------------------------------------
// interpolation

Vec InterpolatedSequences::x_at(std::int64_t n) const {
  if (n < 0 || n > length() || x.empty()) return Vec::Zero(x.empty() ? 0 : x.front().size());
  return x.at(static_cast<std::size_t>(n));
}

Vec InterpolatedSequences::y_at(std::int64_t n) const {
  if (n < 0 || n > length() || y.empty()) return Vec::Zero(y.empty() ? 0 : y.front().size());
  return y.at(static_cast<std::size_t>(n));
}

InterpolatedSequences interpolate_sequences(const InducedCocycle& ind, const ManeSequencePair& pair) {
  const BaseSystem& base = ind.base();
  const auto d = static_cast<Eigen::Index>(ind.dimension());
  require(pair.v.size() == d, "interpolate_sequences: pair dimension does not match the cocycle");

  InterpolatedSequences s;
  s.anchor = pair.anchor;
  s.visits = return_times(base, ind.set(), pair.anchor, static_cast<std::size_t>(pair.n_end), ind.horizon());
  const std::int64_t len = s.visits.back();
  s.x.assign(static_cast<std::size_t>(len + 1), Vec::Zero(d));
  s.y.assign(static_cast<std::size_t>(len + 1), Vec::Zero(d));

  BasePoint w = pair.anchor;
  std::size_t m = 0;
  for (std::int64_t n = 0; n <= len; ++n) {
    const auto i = static_cast<std::size_t>(n);
    if (n == s.visits[m]) {
      s.x[i] = pair.x[m];
      s.y[i] = pair.y[m];
      if (m + 1 < s.visits.size()) ++m;
    } else {
      s.x[i] = ind.parent()->generator(base.step(w, -1)) * s.x[i - 1];
    }
    w = base.step(w, 1);
  }
  return s;
}

InterpolationCheck check_interpolation(const InducedCocycle& ind, const InterpolatedSequences& s) {
  InterpolationCheck out;
  const BaseSystem& base = ind.base();
  const std::int64_t len = s.length();
  out.initial = (s.x_at(0) - s.y_at(0)).norm();
  BasePoint w = s.anchor;
  // One step past the support so that the vanishing tail is checked too.
  for (std::int64_t n = 0; n <= len; ++n) {
    const Mat a = ind.parent()->generator(w);
    out.recurrence = std::max(out.recurrence, (s.x_at(n + 1) - a * s.x_at(n) - s.y_at(n + 1)).norm());
    if (s.y_at(n).norm() > 0.0 && !ind.set()(w)) out.y_on_F = false;
    out.max_x = std::max(out.max_x, s.x_at(n).norm());
    out.max_y = std::max(out.max_y, s.y_at(n).norm());
    w = base.step(w, 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// violation witness

namespace {

double quantile(std::vector<double> v, double q) {
  require(!v.empty(), "quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = std::ceil(q * static_cast<double>(v.size()));
  const auto i = static_cast<std::size_t>(std::clamp(pos, 1.0, static_cast<double>(v.size()))) - 1;
  return v[i];
}

struct Construction {
  bool ok = false;
  ErrorCode error = ErrorCode::Ok;
  std::string message;
  double defect = 0.0;
  InterpolatedSequences seq;
};

// Per-point constructions along the induced cocycle, cached by point.
class ConstructionCache {
 public:
  ConstructionCache(const InducedCocycle& ind, const LyapunovSpectrum& spectrum, double target,
                    const WitnessBudgets& budgets)
      : ind_(ind), spectrum_(spectrum), target_(target), budgets_(budgets) {}

  const Construction& at(const BasePoint& w) {
    auto& bucket = cache_[w.hash()];
    for (const auto& [p, c] : bucket)
      if (p == w) return *c;
    bucket.emplace_back(w, std::make_unique<Construction>(build(w)));
    return *bucket.back().second;
  }

 private:
  Construction build(const BasePoint& w) const {
    Construction out;
    try {
      const auto steps = ind_.orbit(w, static_cast<std::size_t>(budgets_.search_horizon));
      Rng rng(w.hash());
      const RecurrentVector rv = recurrent_vector_search(
          steps, zero_block_basis(*ind_.parent(), ind_.base(), w, spectrum_, budgets_.splitting_window), budgets_.grid,
          rng);
      const ManeSequencePair pair = mane_sequences(ind_.steps(w), w, rv.v, target_, budgets_.mane_horizon);
      out.seq = interpolate_sequences(ind_, pair);
      out.defect = rv.defect;
      out.ok = true;
    } catch (const Error& e) {
      out.error = e.code();
      out.message = e.what();
    }
    return out;
  }

  const InducedCocycle& ind_;
  const LyapunovSpectrum& spectrum_;
  double target_;
  const WitnessBudgets& budgets_;
  std::unordered_map<std::uint64_t, std::vector<std::pair<BasePoint, std::unique_ptr<Construction>>>> cache_;
};

}  // namespace

ViolationWitness violation_witness(CocyclePtr c, const BaseSystem& base, const WeightModel& weight, double L,
                                   const WitnessBudgets& budgets, Rng& rng) {
  require(c != nullptr, "violation_witness needs a cocycle");
  require(L > 0.0 && std::isfinite(L), "violation_witness needs a finite L > 0");
  require(budgets.level_quantile > 0.0 && budgets.level_quantile <= 1.0, "level_quantile must lie in (0, 1]");
  require(budgets.height_quantile > 0.0 && budgets.height_quantile <= 1.0, "height_quantile must lie in (0, 1]");
  require(budgets.weight_samples > 0 && budgets.height_samples > 0, "witness budgets must be positive");
  if (!base.aperiodic())
    fail(ErrorCode::NotAperiodic, "the witness needs an aperiodic base, got " + base.descriptor());

  Rng spectrum_rng = rng.substream("spectrum");
  const LyapunovSpectrum spectrum = lyapunov_exponents(*c, base, base.sample(spectrum_rng), budgets.spectrum);
  if (classify(spectrum, budgets.zero_tol) == Classification::Hyperbolic)
    fail(ErrorCode::NotDegenerate, c->descriptor() + " is hyperbolic; no violation exists");

  // Level set F = {C <= M} (or {C >= M} when the weight sits on f).
  Rng weight_rng = rng.substream("weight");
  std::vector<double> weights;
  weights.reserve(budgets.weight_samples);
  for (std::size_t i = 0; i < budgets.weight_samples; ++i) {
    const double cw = weight(base.sample(weight_rng));
    require(cw > 0.0 && std::isfinite(cw), "weight must be positive and finite");
    weights.push_back(cw);
  }
  const bool upper = budgets.weighted_output;
  const double M = quantile(weights, upper ? 1.0 - budgets.level_quantile : budgets.level_quantile);
  SetIndicator F{[weight, M, upper](const BasePoint& w) { return upper ? weight(w) >= M : weight(w) <= M; },
                 std::string(upper ? "{C>=" : "{C<=") + std::to_string(M) + "}", std::nullopt};

  Rng induce_rng = rng.substream("induce");
  const InducedCocycle ind = induce(c, base, F, budgets.weight_samples, induce_rng, budgets.return_horizon);
  const double target = upper ? (L + 1.0) / M : (L + 1.0) * M;
  ConstructionCache cache(ind, spectrum, target, budgets);

  // Tower height: smallest N covering the requested share of F points.
  Rng height_rng = rng.substream("height");
  std::vector<double> lengths;
  std::optional<Error> first_error;
  const std::size_t max_draws = 200 * budgets.height_samples;
  std::size_t found = 0;
  for (std::size_t i = 0; i < max_draws && found < budgets.height_samples; ++i) {
    const BasePoint w = base.sample(height_rng);
    if (!F(w)) continue;
    ++found;
    const Construction& k = cache.at(w);
    if (k.ok) {
      lengths.push_back(static_cast<double>(k.seq.length()));
    } else {
      lengths.push_back(std::numeric_limits<double>::infinity());
      if (!first_error) first_error.emplace(k.error, k.message);
    }
  }
  require(found > 0, "no sampled point lies in " + F.descriptor);
  const double n_height = quantile(lengths, budgets.height_quantile);
  if (!std::isfinite(n_height)) {
    if (first_error) throw *first_error;
    fail(ErrorCode::RatioNotAchieved, "no construction succeeded on sampled points of " + F.descriptor);
  }
  const auto N = static_cast<std::int64_t>(n_height);

  SetIndicator F_N{[&cache, F, N](const BasePoint& w) {
                     if (!F(w)) return false;
                     const Construction& k = cache.at(w);
                     return k.ok && k.seq.length() <= N;
                   },
                   "F_" + std::to_string(N), std::nullopt};

  Rng tower_rng = rng.substream("tower");
  ViolationWitness out;
  out.tower = rokhlin_base(base, F_N, N, budgets.rokhlin_samples, tower_rng);
  out.height = N;
  out.base_point = out.tower.sample_points.front();
  out.level = M;
  out.target = target;
  out.ratio_goal = L;
  out.set_measure = ind.measure();

  const SetIndicator& B = out.tower.base;
  const auto d = static_cast<Eigen::Index>(c->dimension());
  // f and g evaluated from their definition as sums over the tower levels.
  auto tower_value = [&](const BasePoint& p, bool want_x) -> Vec {
    for (std::int64_t n = 0; n <= N + 1; ++n) {
      const BasePoint q = base.step(p, -n);
      if (B(q)) {
        const Construction& k = cache.at(q);
        return want_x ? k.seq.x_at(n) : k.seq.y_at(n);
      }
    }
    return Vec::Zero(d);
  };
  auto residual_at = [&](const BasePoint& p) {
    const BasePoint prev = base.step(p, -1);
    return (tower_value(p, true) - c->generator(prev) * tower_value(prev, true) - tower_value(p, false)).norm();
  };

  const BasePoint& wb = out.base_point;
  const Construction& kb = cache.at(wb);
  out.visits = kb.seq.visits;
  out.defect = kb.defect;
  for (std::int64_t j = 0; j <= N + 1; ++j) {
    const BasePoint p = base.step(wb, j);
    out.f_values.push_back(tower_value(p, true));
    out.g_values.push_back(tower_value(p, false));
    out.weights.push_back(weight(p));
    if (out.g_values.back().norm() > 0.0 && !F(p)) out.g_supported_on_F = false;
  }
  for (std::int64_t j = -1; j <= N + 2; ++j) out.residual = std::max(out.residual, residual_at(base.step(wb, j)));

  Rng check_rng = rng.substream("offtower");
  for (std::size_t i = 0; i < budgets.offtower_checks; ++i) {
    out.offtower_residual = std::max(out.offtower_residual, residual_at(base.sample(check_rng)));
    ++out.offtower_points;
  }

  for (std::size_t j = 0; j < out.f_values.size(); ++j) {
    const double fw = upper ? out.weights[j] : 1.0;
    const double gw = upper ? 1.0 : out.weights[j];
    out.f_norm = std::max(out.f_norm, fw * out.f_values[j].norm());
    out.g_column_norm = std::max(out.g_column_norm, gw * out.g_values[j].norm());
  }
  out.g_norm = upper ? 1.0 : M;
  out.ratio = out.f_norm / out.g_norm;
  if (!(out.ratio > L))
    fail(ErrorCode::RatioNotAchieved, "achieved ratio " + std::to_string(out.ratio) + " <= L = " +
                                          std::to_string(L) + " (height " + std::to_string(N) + ", M " +
                                          std::to_string(M) + ")");
  return out;
}

}  // namespace cocyclelab
