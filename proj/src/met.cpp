#include "cocyclelab/met.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cocyclelab/error.hpp"

namespace cocyclelab {

namespace {

constexpr int kBatches = 10;
constexpr double kRankFactor = 64.0 * std::numeric_limits<double>::epsilon();
constexpr double kLogFloor = -700.0;

// Re-orthonormalizes `q` and returns log|R_ii|. A rank collapse inside a
// multi-step block means the period is too long; a collapse within a single
// step comes from the generator itself and is recorded at the floor.
std::vector<double> reorthonormalize(Mat& q, std::int64_t block_steps) {
  if (!q.allFinite()) fail(ErrorCode::Degenerate, "frame overflowed; shorten the re-orthonormalization period");
  ThinQr f = thin_qr(q);
  const Eigen::Index d = f.r.rows();
  const double top = f.r.diagonal().cwiseAbs().maxCoeff();
  std::vector<double> logs(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    const double rii = std::abs(f.r(i, i));
    if (!(rii >= kRankFactor * top) && block_steps > 1)
      fail(ErrorCode::Degenerate, "frame lost numerical rank after " + std::to_string(block_steps) +
                                      " steps; shorten the re-orthonormalization period");
    logs[static_cast<std::size_t>(i)] = rii > 0.0 ? std::max(kLogFloor, std::log(rii)) : kLogFloor;
  }
  q = std::move(f.q);
  return logs;
}

Mat forward_frame(const Cocycle& c, const BaseSystem& base, const BasePoint& start, std::int64_t steps) {
  const auto d = static_cast<Eigen::Index>(c.dimension());
  Mat q = Mat::Identity(d, d);
  BasePoint x = start;
  for (std::int64_t k = 0; k < steps; ++k) {
    q = thin_qr(c.generator(x) * q).q;
    x = base.step(x, 1);
  }
  return q;
}

// Frame for the adjoint product A(w)^T ... A(sigma^{steps-1} w)^T, applied
// from the far end of the orbit segment inwards.
Mat adjoint_frame(const Cocycle& c, const BaseSystem& base, const BasePoint& w, std::int64_t steps) {
  const auto d = static_cast<Eigen::Index>(c.dimension());
  Mat q = Mat::Identity(d, d);
  BasePoint x = base.step(w, steps - 1);
  for (std::int64_t k = steps - 1; k >= 0; --k) {
    q = thin_qr(c.generator(x).transpose() * q).q;
    x = base.step(x, -1);
  }
  return q;
}

std::vector<std::size_t> cumulative(const std::vector<std::size_t>& m) {
  std::vector<std::size_t> out(m.size() + 1, 0);
  std::partial_sum(m.begin(), m.end(), out.begin() + 1);
  return out;
}

void check_spectrum(const Cocycle& c, const LyapunovSpectrum& s) {
  require(!s.exponents.empty(), "empty spectrum");
  require(s.dimension() == c.dimension(), "spectrum dimension does not match the cocycle");
}

struct SplitCore {
  std::vector<Mat> spaces, fast, slow;
  double min_cosine = 1.0;
  double rcond = 1.0;
};

SplitCore split_at(const Cocycle& c, const BaseSystem& base, const BasePoint& w, const LyapunovSpectrum& s,
                   std::int64_t window) {
  const auto d = static_cast<Eigen::Index>(c.dimension());
  const auto cum = cumulative(s.multiplicities);
  const Mat fast_q = forward_frame(c, base, base.step(w, -window), window);
  const Mat slow_q = adjoint_frame(c, base, w, window);
  SplitCore out;
  Mat stacked(d, 0);
  for (std::size_t i = 0; i < s.count(); ++i) {
    const auto lead = static_cast<Eigen::Index>(cum[i + 1]);
    const auto trail = d - static_cast<Eigen::Index>(cum[i]);
    const auto mi = static_cast<Eigen::Index>(s.multiplicities[i]);
    Mat u = fast_q.leftCols(lead);
    Mat v = slow_q.rightCols(trail);
    Eigen::JacobiSVD<Mat> svd(u.transpose() * v, Eigen::ComputeFullU);
    out.min_cosine = std::min(out.min_cosine, std::min(1.0, svd.singularValues()(mi - 1)));
    Mat e = u * svd.matrixU().leftCols(mi);
    Mat grown(d, stacked.cols() + mi);
    grown << stacked, e;
    stacked = std::move(grown);
    out.spaces.push_back(std::move(e));
    out.fast.push_back(std::move(u));
    out.slow.push_back(std::move(v));
  }
  Eigen::JacobiSVD<Mat> svd(stacked);
  const auto& sv = svd.singularValues();
  out.rcond = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
  return out;
}

}  // namespace

std::size_t LyapunovSpectrum::dimension() const {
  return std::accumulate(multiplicities.begin(), multiplicities.end(), std::size_t{0});
}

double LyapunovSpectrum::hyperbolic_gap() const {
  double pos = std::numeric_limits<double>::infinity();
  double neg = -std::numeric_limits<double>::infinity();
  for (double e : exponents) {
    if (e > 0.0) pos = std::min(pos, e);
    if (e < 0.0) neg = std::max(neg, e);
  }
  if (!std::isfinite(pos) || !std::isfinite(neg)) return 0.0;
  return pos - neg;
}

double LyapunovSpectrum::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < exponents.size(); ++i) g = std::min(g, exponents[i - 1] - exponents[i]);
  return g;
}

double LyapunovSpectrum::max_standard_error() const {
  double m = 0.0;
  for (double e : standard_errors) m = std::max(m, e);
  return m;
}

LyapunovSpectrum merge_exponents(std::vector<double> raw, std::vector<double> raw_se, std::int64_t steps,
                                 double gap_tol) {
  require(raw.size() == raw_se.size() && !raw.empty(), "merge_exponents: mismatched inputs");
  require(gap_tol > 0.0, "gap_tol must be positive");
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });
  LyapunovSpectrum s;
  s.steps = steps;
  for (std::size_t i : order) {
    s.raw.push_back(raw[i]);
    s.raw_standard_errors.push_back(raw_se[i]);
  }
  std::size_t start = 0;
  for (std::size_t i = 1; i <= s.raw.size(); ++i) {
    if (i < s.raw.size() && s.raw[i - 1] - s.raw[i] < gap_tol) continue;
    double sum = 0.0;
    double se = 0.0;
    for (std::size_t j = start; j < i; ++j) {
      sum += s.raw[j];
      se = std::max(se, s.raw_standard_errors[j]);
    }
    s.exponents.push_back(sum / static_cast<double>(i - start));
    s.multiplicities.push_back(i - start);
    s.standard_errors.push_back(se);
    start = i;
  }
  return s;
}

LyapunovSpectrum lyapunov_exponents(StepSource source, std::size_t d, const LyapunovOptions& opts) {
  require(opts.steps >= 100, "lyapunov_exponents needs at least 100 steps");
  require(opts.reorth >= 1, "reorth period must be positive");
  require(d >= 1, "dimension must be positive");
  const auto n = opts.steps;
  Mat q = Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::vector<std::vector<double>> batch(kBatches, std::vector<double>(d, 0.0));
  std::int64_t pending = 0;
  int b = 0;
  for (std::int64_t step = 1; step <= n; ++step) {
    q = source() * q;
    ++pending;
    const bool batch_end = step == (b + 1) * n / kBatches;
    if (pending == opts.reorth || batch_end) {
      const auto logs = reorthonormalize(q, pending);
      for (std::size_t i = 0; i < d; ++i) batch[static_cast<std::size_t>(b)][i] += logs[i];
      pending = 0;
    }
    if (batch_end) ++b;
  }
  std::vector<double> raw(d, 0.0), se(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> means(kBatches);
    double total = 0.0;
    for (int k = 0; k < kBatches; ++k) {
      const auto len = static_cast<double>((k + 1) * n / kBatches - k * n / kBatches);
      total += batch[static_cast<std::size_t>(k)][i];
      means[static_cast<std::size_t>(k)] = batch[static_cast<std::size_t>(k)][i] / len;
    }
    raw[i] = total / static_cast<double>(n);
    double mu = std::accumulate(means.begin(), means.end(), 0.0) / kBatches;
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu);
    se[i] = std::sqrt(var / (kBatches - 1) / kBatches);
  }
  return merge_exponents(std::move(raw), std::move(se), n, opts.gap_tol);
}

LyapunovSpectrum lyapunov_exponents(const Cocycle& c, const BaseSystem& base, const BasePoint& w,
                                    const LyapunovOptions& opts) {
  base.check_point(w);
  // Singular generators collapse the frame every step; only per-step QR can record that at the floor.
  LyapunovOptions o = opts;
  if (!c.invertible()) o.reorth = 1;
  return lyapunov_exponents(forward_steps(std::make_shared<const Cocycle>(c), base, w), c.dimension(), o);
}

std::vector<TracePoint> lyapunov_trace(StepSource source, std::size_t d, std::int64_t steps, std::int64_t every,
                                       std::int64_t reorth) {
  require(steps >= 1 && every >= 1 && reorth >= 1, "lyapunov_trace needs positive steps, stride and period");
  Mat q = Mat::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::vector<double> sums(d, 0.0);
  std::vector<TracePoint> out;
  std::int64_t pending = 0;
  for (std::int64_t step = 1; step <= steps; ++step) {
    q = source() * q;
    ++pending;
    const bool record = step % every == 0 || step == steps;
    if (pending == reorth || record) {
      const auto logs = reorthonormalize(q, pending);
      for (std::size_t i = 0; i < d; ++i) sums[i] += logs[i];
      pending = 0;
    }
    if (record) {
      TracePoint p{step, sums};
      for (double& x : p.raw) x /= static_cast<double>(step);
      std::sort(p.raw.begin(), p.raw.end(), std::greater<>());
      out.push_back(std::move(p));
    }
  }
  return out;
}

double vector_exponent(const Cocycle& c, const BaseSystem& base, const BasePoint& w, const Vec& v, std::int64_t n) {
  require(n >= 1, "vector_exponent needs n >= 1");
  require(v.size() == static_cast<Eigen::Index>(c.dimension()), "vector has the wrong dimension");
  const double n0 = v.norm();
  require(n0 > 0.0, "vector_exponent needs a nonzero vector");
  Vec x = v / n0;
  double acc = 0.0;
  BasePoint p = w;
  for (std::int64_t k = 0; k < n; ++k) {
    x = c.generator(p) * x;
    p = base.step(p, 1);
    const double r = x.norm();
    if (r == 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(r);
    x /= r;
  }
  return acc / static_cast<double>(n);
}

std::vector<Mat> forward_filtration(const Cocycle& c, const BaseSystem& base, const BasePoint& w,
                                    const LyapunovSpectrum& spectrum, std::int64_t window) {
  check_spectrum(c, spectrum);
  require(window >= 1, "window must be positive");
  const auto d = static_cast<Eigen::Index>(c.dimension());
  const auto cum = cumulative(spectrum.multiplicities);
  const Mat q = adjoint_frame(c, base, w, window);
  std::vector<Mat> out;
  for (std::size_t i = 0; i < spectrum.count(); ++i) out.push_back(q.rightCols(d - static_cast<Eigen::Index>(cum[i])));
  return out;
}

std::vector<Mat> backward_fast_filtration(const Cocycle& c, const BaseSystem& base, const BasePoint& w,
                                          const LyapunovSpectrum& spectrum, std::int64_t window) {
  check_spectrum(c, spectrum);
  require(window >= 1, "window must be positive");
  const auto cum = cumulative(spectrum.multiplicities);
  const Mat q = forward_frame(c, base, base.step(w, -window), window);
  std::vector<Mat> out;
  for (std::size_t i = 0; i < spectrum.count(); ++i) out.push_back(q.leftCols(static_cast<Eigen::Index>(cum[i + 1])));
  return out;
}

OseledetsSplitting oseledets_splitting(const Cocycle& c, const BaseSystem& base, const BasePoint& w,
                                       const LyapunovSpectrum& spectrum, const SplittingOptions& opts) {
  check_spectrum(c, spectrum);
  base.check_point(w);
  if (!c.invertible()) fail(ErrorCode::NotInvertible, "two-sided splitting needs an invertible generator");
  require(opts.window >= 1, "window must be positive");
  if (spectrum.count() > 1 && spectrum.min_gap() * static_cast<double>(opts.window) < std::log(1e6))
    fail(ErrorCode::IllConditioned, "window " + std::to_string(opts.window) +
                                        " too small for the smallest exponent gap " +
                                        std::to_string(spectrum.min_gap()));
  SplitCore core = split_at(c, base, w, spectrum, opts.window);
  if (core.min_cosine < 1.0 - opts.cosine_tol)
    fail(ErrorCode::IllConditioned, "filtrations do not intersect cleanly (cosine " +
                                        std::to_string(core.min_cosine) + "); enlarge the window");
  if (core.rcond < opts.rcond_tol)
    fail(ErrorCode::IllConditioned, "Oseledets spaces are nearly dependent (rcond " + std::to_string(core.rcond) + ")");
  OseledetsSplitting out;
  out.point = w;
  out.window = opts.window;
  out.exponents = spectrum.exponents;
  out.multiplicities = spectrum.multiplicities;
  out.min_cosine = core.min_cosine;
  out.rcond = core.rcond;
  if (opts.compute_defect) {
    const SplitCore next = split_at(c, base, base.step(w, 1), spectrum, opts.window);
    const Mat a = c.generator(w);
    double defect = 0.0;
    for (std::size_t i = 0; i < core.spaces.size(); ++i) {
      const Mat image = orthonormal_basis(a * core.spaces[i]);
      if (image.cols() != next.spaces[i].cols()) {
        defect = 1.0;
        continue;
      }
      defect = std::max(defect, subspace_distance(image, next.spaces[i]));
    }
    out.equivariance_defect = defect;
  }
  out.spaces = std::move(core.spaces);
  out.fast = std::move(core.fast);
  out.slow = std::move(core.slow);
  return out;
}

}  // namespace cocyclelab
