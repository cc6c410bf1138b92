#include "cocyclelab/dichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cocyclelab/error.hpp"

namespace cocyclelab {

std::string_view classification_name(Classification c) {
  return c == Classification::Hyperbolic ? "Hyperbolic" : "HasZeroExponent";
}

Classification classify(const LyapunovSpectrum& spectrum, double zero_tol) {
  require(zero_tol > 0.0, "zero_tol must be positive");
  require(!spectrum.exponents.empty(), "empty spectrum");
  bool zero = false;
  for (std::size_t i = 0; i < spectrum.count(); ++i) {
    const double a = std::abs(spectrum.exponents[i]);
    if (spectrum.minus_infinity(i)) continue;
    if (spectrum.standard_errors[i] >= zero_tol / 2)
      fail(ErrorCode::Inconclusive, "exponent " + std::to_string(spectrum.exponents[i]) + " has standard error " +
                                        std::to_string(spectrum.standard_errors[i]) + "; run longer");
    if (a >= zero_tol / 2 && a <= zero_tol)
      fail(ErrorCode::Inconclusive, "exponent " + std::to_string(spectrum.exponents[i]) +
                                        " lies in the undecided band; run longer");
    if (a < zero_tol / 2) zero = true;
  }
  return zero ? Classification::HasZeroExponent : Classification::Hyperbolic;
}

double OrbitSamples::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values) m = std::max(m, v);
  return m;
}

OrbitFrames::OrbitFrames(const Cocycle& c, const BaseSystem& base, const BasePoint& anchor, std::int64_t lo,
                         std::int64_t hi, std::size_t stable_dim, std::int64_t warmup)
    : anchor_(anchor), lo_(lo), hi_(hi), d_(c.dimension()), s_(stable_dim) {
  require(hi >= lo, "frame window must be non-empty");
  require(stable_dim <= d_, "stable dimension exceeds the cocycle dimension");
  require(warmup >= 0, "warmup must be nonnegative");
  const auto d = static_cast<Eigen::Index>(d_);
  const auto u = static_cast<Eigen::Index>(d_ - s_);
  const auto count = static_cast<std::size_t>(hi - lo + 1);

  gen_.reserve(count);
  BasePoint x = base.step(anchor, lo);
  for (std::int64_t k = lo; k <= hi; ++k) {
    gen_.push_back(c.generator(x));
    x = base.step(x, 1);
  }

  // Unstable bundle: leading columns of a forward QR run.
  unstable_.reserve(count);
  t_.reserve(count);
  t_inv_.reserve(count);
  Mat q = Mat::Identity(d, u);
  x = base.step(anchor, lo - warmup);
  for (std::int64_t k = 0; k < warmup; ++k) {
    if (u > 0) q = thin_qr(c.generator(x) * q).q;
    x = base.step(x, 1);
  }
  unstable_.push_back(q);
  for (std::int64_t k = lo; k < hi; ++k) {
    const Mat& a = gen_[static_cast<std::size_t>(k - lo)];
    if (u > 0) {
      ThinQr f = thin_qr(a * q);
      const double scale = std::max(spectral_norm(a), std::numeric_limits<double>::min());
      if (f.r.diagonal().minCoeff() <= 1e-12 * scale)
        fail(ErrorCode::UnstableNotInvertible,
             "generator is numerically singular on the unstable bundle at step " + std::to_string(k));
      q = std::move(f.q);
      t_inv_.push_back(f.r.triangularView<Eigen::Upper>().solve(Mat::Identity(u, u)));
      t_.push_back(std::move(f.r));
    } else {
      t_.emplace_back(0, 0);
      t_inv_.emplace_back(0, 0);
    }
    unstable_.push_back(q);
  }

  // Stable bundle: complement of the leading columns of the adjoint QR run,
  // E^s(k) = A(sigma^k w)^{-1} E^s(k+1).
  stable_.assign(count, Mat());
  Mat p = Mat::Identity(d, u);
  x = base.step(anchor, hi + warmup);
  for (std::int64_t k = 0; k < warmup; ++k) {
    if (u > 0) p = thin_qr(c.generator(x).transpose() * p).q;
    x = base.step(x, -1);
  }
  for (std::int64_t k = hi; k >= lo; --k) {
    if (u > 0) p = thin_qr(gen_[static_cast<std::size_t>(k - lo)].transpose() * p).q;
    stable_[static_cast<std::size_t>(k - lo)] = orthogonal_complement(p);
  }

  proj_s_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) proj_s_.push_back(oblique_projection(stable_[i], unstable_[i]));
}

std::size_t OrbitFrames::idx(std::int64_t k) const {
  if (k < lo_ || k > hi_)
    fail(ErrorCode::Internal, "frame index " + std::to_string(k) + " outside [" + std::to_string(lo_) + ", " +
                                  std::to_string(hi_) + "]");
  return static_cast<std::size_t>(k - lo_);
}

Mat OrbitFrames::projection_u(std::int64_t k) const {
  const auto d = static_cast<Eigen::Index>(d_);
  return Mat::Identity(d, d) - projection_s(k);
}

Mat OrbitFrames::unstable_inverse(std::int64_t k) const {
  require(k > lo_ && k <= hi_, "unstable_inverse index out of range");
  return unstable(k - 1) * t_inv_.at(idx(k - 1)) * unstable(k).transpose();
}

DichotomyCertificate::DichotomyCertificate(CocyclePtr c, BaseSystem b, LyapunovSpectrum s, double rate_,
                                           std::size_t stable_dim_, std::int64_t n_max_, std::int64_t warmup_)
    : cocycle(std::move(c)),
      base(std::move(b)),
      spectrum(std::move(s)),
      rate(rate_),
      stable_dim(stable_dim_),
      n_max(n_max_),
      warmup(warmup_),
      k_rate_(rate_) {
  require(cocycle != nullptr, "certificate needs a cocycle");
  require(rate > 0.0, "dichotomy rate must be positive");
  require(n_max >= 1, "n_max must be positive");
}

OrbitFrames DichotomyCertificate::frames(const BasePoint& w, std::int64_t lo, std::int64_t hi) const {
  return OrbitFrames(*cocycle, base, w, lo, hi, stable_dim, warmup);
}

Mat DichotomyCertificate::projection_s(const BasePoint& w) const { return frames(w, 0, 0).projection_s(0); }

OrbitSamples DichotomyCertificate::k_along_orbit(const OrbitFrames& f, std::int64_t lo, std::int64_t hi) const {
  require(f.lo() <= lo - n_max && f.hi() >= hi + n_max, "frames do not cover the K evaluation window");
  const auto s = f.stable_dim();
  const auto u = f.unstable_dim();
  OrbitSamples out{lo, {}};
  out.values.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t k = lo; k <= hi; ++k) {
    double best = 0.0;
    if (s > 0) {
      Mat m = f.projection_s(k);
      best = std::max(best, spectral_norm(m));
      for (std::int64_t n = 1; n <= n_max; ++n) {
        m = f.projection_s(k + n) * (f.generator(k + n - 1) * m);
        best = std::max(best, spectral_norm(m) * std::exp(k_rate_ * static_cast<double>(n)));
      }
    }
    if (u > 0) {
      Mat cpl = f.unstable(k).transpose() * f.projection_u(k);
      best = std::max(best, spectral_norm(cpl));
      for (std::int64_t n = 1; n <= n_max; ++n) {
        cpl = f.unstable_block(k - n).triangularView<Eigen::Upper>().solve(cpl);
        best = std::max(best, spectral_norm(cpl) * std::exp(k_rate_ * static_cast<double>(n)));
      }
    }
    out.values.push_back(best);
  }
  return out;
}

OrbitSamples DichotomyCertificate::k_along_orbit(const BasePoint& w, std::int64_t lo, std::int64_t hi) const {
  return k_along_orbit(frames(w, lo - n_max, hi + n_max), lo, hi);
}

double DichotomyCertificate::k_value(const BasePoint& w) const { return k_along_orbit(w, 0, 0).values.front(); }

std::int64_t default_warmup(const LyapunovSpectrum& spectrum) {
  const double gap = spectrum.hyperbolic_gap();
  if (!(gap > 0.0)) return 20;
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(36.0 / gap)), 20, 5000);
}

DichotomyCertificate build_certificate(CocyclePtr c, const BaseSystem& base, const LyapunovSpectrum& spectrum,
                                       const std::vector<BasePoint>& samples, const CertificateOptions& opts) {
  require(c != nullptr, "null cocycle");
  require(spectrum.dimension() == c->dimension(), "spectrum dimension does not match the cocycle");
  require(opts.safety >= 0.0 && opts.safety < 1.0, "safety must lie in [0, 1)");
  if (classify(spectrum, opts.zero_tol) != Classification::Hyperbolic)
    fail(ErrorCode::NotHyperbolic, c->descriptor() + " has a zero Lyapunov exponent");
  std::size_t stable_dim = 0;
  double min_abs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spectrum.count(); ++i) {
    if (spectrum.exponents[i] < 0.0) stable_dim += spectrum.multiplicities[i];
    min_abs = std::min(min_abs, std::abs(spectrum.exponents[i]));
  }
  const double rate = opts.rate.value_or((1.0 - opts.safety) * min_abs);
  require(rate > 0.0, "dichotomy rate must be positive");
  const std::int64_t warmup = opts.warmup > 0 ? opts.warmup : default_warmup(spectrum);
  DichotomyCertificate cert(std::move(c), base, spectrum, rate, stable_dim, opts.n_max, warmup);
  for (const auto& w : samples) {
    base.check_point(w);
    cert.sample_points.push_back(w);
    cert.k_samples.push_back(cert.k_value(w));
  }
  return cert;
}

CertificateReport check_certificate(const DichotomyCertificate& cert, const std::vector<BasePoint>& samples,
                                    std::int64_t n_max, double slack) {
  require(n_max >= 1 && slack > 0.0, "check_certificate needs n_max >= 1 and slack > 0");
  CertificateReport rep;
  rep.worst_ratio = 0.0;
  const Cocycle& c = *cert.cocycle;
  for (const auto& w : samples) {
    const double k = cert.k_value(w);
    // Frames warmed up independently of those behind the K rule.
    OrbitFrames f(c, cert.base, w, -n_max, n_max, cert.stable_dim, 2 * cert.warmup);
    auto record = [&](double norm, std::int64_t n, bool unstable) {
      const double ratio = norm / (k * std::exp(-cert.rate * static_cast<double>(n)));
      if (ratio > rep.worst_ratio) {
        rep.worst_ratio = ratio;
        rep.witness_point = w;
        rep.witness_n = n;
        rep.witness_unstable = unstable;
      }
    };
    if (f.stable_dim() > 0) {
      Mat m = f.projection_s(0);
      record(spectral_norm(m), 0, false);
      for (std::int64_t n = 1; n <= n_max; ++n) {
        m = f.projection_s(n) * (f.generator(n - 1) * m);
        record(spectral_norm(m), n, false);
      }
    }
    if (f.unstable_dim() > 0) {
      Mat v = f.projection_u(0);
      record(spectral_norm(v), 0, true);
      for (std::int64_t n = 1; n <= n_max; ++n) {
        // Solve A(sigma^{-n} w) U c = v within the unstable frame.
        const Mat& basis = f.unstable(-n);
        const Mat image = f.generator(-n) * basis;
        v = basis * image.colPivHouseholderQr().solve(v);
        record(spectral_norm(v), n, true);
      }
    }
    ++rep.points_checked;
  }
  rep.passed = rep.worst_ratio <= slack;
  return rep;
}

CertificateReport verify_certificate(const DichotomyCertificate& cert, const std::vector<BasePoint>& samples,
                                     std::int64_t n_max, double slack) {
  CertificateReport rep = check_certificate(cert, samples, n_max, slack);
  if (!rep.passed)
    fail(ErrorCode::Violation, std::string(rep.witness_unstable ? "unstable" : "stable") + " bound violated at " +
                                   rep.witness_point.describe() + ", n = " + std::to_string(rep.witness_n) +
                                   ", ratio " + std::to_string(rep.worst_ratio));
  return rep;
}

TemperednessReport temperedness_diagnostic(const OrbitSamples& k, const std::vector<std::int64_t>& horizons,
                                           double tolerance) {
  TemperednessReport rep;
  std::int64_t max_h = 0;
  for (auto n : horizons) max_h = std::max<std::int64_t>(max_h, n < 0 ? -n : n);
  for (auto n : horizons) {
    require(n != 0, "temperedness horizons must be nonzero");
    if (!k.contains(n)) fail(ErrorCode::WindowTooSmall, "no K sample at horizon " + std::to_string(n));
    const double kv = k.at(n);
    require(kv > 0.0, "K samples must be positive");
    const double slope = std::log(kv) / static_cast<double>(n);
    rep.horizons.push_back(n);
    rep.slopes.push_back(slope);
    if ((n < 0 ? -n : n) == max_h) rep.worst_at_max_horizon = std::max(rep.worst_at_max_horizon, std::abs(slope));
  }
  rep.passed = rep.worst_at_max_horizon <= tolerance;
  return rep;
}

OrbitSamples envelope_of(const OrbitSamples& k, double epsilon) {
  require(epsilon > 0.0, "epsilon must be positive");
  const std::size_t n = k.values.size();
  const double decay = std::exp(-epsilon);
  std::vector<double> fwd(n), bwd(n);
  for (std::size_t i = 0; i < n; ++i) fwd[i] = i == 0 ? k.values[0] : std::max(k.values[i], fwd[i - 1] * decay);
  for (std::size_t i = n; i-- > 0;) bwd[i] = i + 1 == n ? k.values[i] : std::max(k.values[i], bwd[i + 1] * decay);
  OrbitSamples out{k.first, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) out.values[i] = std::max(fwd[i], bwd[i]);
  return out;
}

TemperedEnvelope tempered_envelope(const OrbitSamples& k, double epsilon, std::int64_t window) {
  require(epsilon > 0.0, "epsilon must be positive");
  require(window >= 0, "window must be nonnegative");
  if (!k.contains(-2 * window) || !k.contains(2 * window))
    fail(ErrorCode::WindowTooSmall, "envelope on |k| <= " + std::to_string(window) + " needs samples on |k| <= " +
                                        std::to_string(2 * window));
  const OrbitSamples full = envelope_of(k, epsilon);
  TemperedEnvelope env;
  env.epsilon = epsilon;
  env.window = window;
  env.values.first = -window;
  for (std::int64_t i = -window; i <= window; ++i) env.values.values.push_back(full.at(i));
  return env;
}

}  // namespace cocyclelab
