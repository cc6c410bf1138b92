#include "cocyclelab/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cocyclelab/error.hpp"

namespace cocyclelab {

WeightModel WeightModel::unit() {
  return {[](const BasePoint&) { return 1.0; }, true, "unit"};
}

WeightModel WeightModel::constant(double c) {
  require(c > 0.0 && std::isfinite(c), "constant weight must be positive");
  return {[c](const BasePoint&) { return c; }, true, "constant(" + std::to_string(c) + ")"};
}

WeightModel WeightModel::certificate_k(const DichotomyCertificate& cert) {
  return {[cert](const BasePoint& w) { return cert.k_value(w); }, true, "K"};
}

WeightModel WeightModel::inverse_envelope(const DichotomyCertificate& cert, double epsilon, std::int64_t window) {
  require(epsilon > 0.0 && window >= 0, "inverse_envelope needs epsilon > 0 and window >= 0");
  auto eval = [cert, epsilon, window](const BasePoint& w) {
    const OrbitSamples k = cert.k_along_orbit(w, -window, window);
    double best = 0.0;
    for (std::int64_t m = -window; m <= window; ++m)
      best = std::max(best, k.at(m) * std::exp(-epsilon * static_cast<double>(std::abs(m))));
    return 1.0 / best;
  };
  return {std::move(eval), true, "1/K_eps"};
}

OrbitSamples sample_weight(const WeightModel& c, const BaseSystem& base, const BasePoint& anchor, std::int64_t lo,
                           std::int64_t hi) {
  require(hi >= lo, "weight window must be non-empty");
  OrbitSamples out{lo, {}};
  BasePoint x = base.step(anchor, lo);
  for (std::int64_t k = lo; k <= hi; ++k) {
    const double v = c(x);
    if (!(v > 0.0) || !std::isfinite(v))
      fail(ErrorCode::InvalidArgument, "weight " + c.descriptor + " is not positive at " + x.describe());
    out.values.push_back(v);
    x = base.step(x, 1);
  }
  return out;
}

double sup_norm(const OrbitFunction& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, v.norm());
  return m;
}

double weighted_norm(const OrbitFunction& f, const OrbitSamples& weight) {
  require(weight.contains(f.first) && weight.contains(f.last()), "weight samples do not cover the window");
  double m = 0.0;
  for (std::int64_t k = f.first; k <= f.last(); ++k) m = std::max(m, weight.at(k) * f.at(k).norm());
  return m;
}

double weighted_norm(const OrbitFunction& f, const WeightModel& c, const BaseSystem& base) {
  return weighted_norm(f, sample_weight(c, base, f.anchor, f.first, f.last()));
}

GreenSolver::GreenSolver(const DichotomyCertificate& cert, const BasePoint& anchor, std::int64_t g_first,
                         std::int64_t g_last, std::int64_t n_tail)
    : cert_(&cert),
      anchor_(anchor),
      g_first_(g_first),
      g_last_(g_last),
      n_tail_(n_tail),
      frames_(cert.frames(anchor, g_first - cert.n_max, g_last + cert.n_max)),
      k_(cert.k_along_orbit(frames_, g_first, g_last)) {
  require(n_tail >= 0, "n_tail must be nonnegative");
  if (g_last - g_first < 2 * n_tail)
    fail(ErrorCode::WindowTooSmall, "g window of " + std::to_string(g_last - g_first + 1) +
                                        " points cannot hold an output window with n_tail " + std::to_string(n_tail));
}

GreenSolution GreenSolver::solve(const OrbitFunction& g, std::optional<double> tail_tol) const {
  require(g.anchor == anchor_, "g is anchored at a different point");
  require(g.first == g_first_ && g.last() == g_last_, "g window does not match the solver");
  const auto d = static_cast<Eigen::Index>(frames_.dimension());
  const auto u = static_cast<Eigen::Index>(frames_.unstable_dim());
  const std::int64_t n = n_tail_;
  OrbitFunction f{anchor_, out_first(), {}, {}};
  f.values.reserve(static_cast<std::size_t>(out_last() - out_first() + 1));
  for (std::int64_t k = out_first(); k <= out_last(); ++k) {
    // sum_{j=0}^{N} A(sigma^{k-j} w, j) Pi^s g(k-j), re-projected each step
    Vec s = frames_.projection_s(k - n) * g.at(k - n);
    for (std::int64_t m = k - n + 1; m <= k; ++m)
      s = frames_.projection_s(m) * (frames_.generator(m - 1) * s + g.at(m));
    // sum_{j=1}^{N} A(sigma^{k+j} w, -j) Pi^u g(k+j), in unstable coordinates
    Vec coords = Vec::Zero(u);
    if (u > 0) {
      for (std::int64_t m = k + n; m >= k + 1; --m) {
        coords += frames_.unstable(m).transpose() * (frames_.projection_u(m) * g.at(m));
        coords = frames_.unstable_block(m - 1).triangularView<Eigen::Upper>().solve(coords);
      }
    }
    Vec out = s;
    if (u > 0) out -= frames_.unstable(k) * coords;
    if (out.size() != d) fail(ErrorCode::Internal, "dimension mismatch in green_solve");
    f.values.push_back(std::move(out));
  }
  const double lambda = cert_->k_rate();
  const double eps = lambda / 3.0;
  const OrbitSamples env = k_envelope(eps);
  double k_hat = 0.0;
  for (std::int64_t k = out_first(); k <= out_last(); ++k) k_hat = std::max(k_hat, env.at(k));
  const double r = lambda - eps;
  const double tail = k_hat * sup_norm(g) * 2.0 * std::exp(-r * static_cast<double>(n)) / (1.0 - std::exp(-r));
  if (tail_tol && tail > *tail_tol)
    fail(ErrorCode::TailTooLarge, "tail bound " + std::to_string(tail) + " exceeds " + std::to_string(*tail_tol));
  return {std::move(f), tail, k_hat, n};
}

OrbitFunction GreenSolver::apply_series(const OrbitFunction& h) const {
  require(h.anchor == anchor_, "h is anchored at a different point");
  require(frames_.lo() <= h.first && frames_.hi() >= h.last(), "h window exceeds the solver frames");
  const auto u = static_cast<Eigen::Index>(frames_.unstable_dim());
  const auto d = static_cast<Eigen::Index>(frames_.dimension());
  OrbitFunction out = OrbitFunction::zeros(anchor_, h.first, h.last(), static_cast<std::size_t>(d));
  Vec s = Vec::Zero(d);
  for (std::int64_t k = h.first; k <= h.last(); ++k) {
    s = k == h.first ? Vec(frames_.projection_s(k) * h.at(k))
                     : Vec(frames_.projection_s(k) * (frames_.generator(k - 1) * s + h.at(k)));
    out.at(k) = s;
  }
  if (u > 0) {
    Vec coords = Vec::Zero(u);
    for (std::int64_t k = h.last(); k >= h.first; --k) {
      out.at(k) -= frames_.unstable(k) * coords;
      coords += frames_.unstable(k).transpose() * (frames_.projection_u(k) * h.at(k));
      if (k > h.first) coords = frames_.unstable_block(k - 1).triangularView<Eigen::Upper>().solve(coords);
    }
  }
  return out;
}

GreenSolution green_solve(const DichotomyCertificate& cert, const OrbitFunction& g, std::int64_t n_tail,
                          std::optional<double> tail_tol) {
  GreenSolver solver(cert, g.anchor, g.first, g.last(), n_tail);
  return solver.solve(g, tail_tol);
}

double residual(const Cocycle& c, const BaseSystem& base, const OrbitFunction& f, const OrbitFunction& g) {
  require(f.anchor == g.anchor, "f and g are anchored at different points");
  const std::int64_t lo = std::max(f.first, g.first);
  const std::int64_t hi = std::min(f.last(), g.last());
  require(hi - lo >= 1, "f and g must overlap on at least two points");
  double worst = 0.0;
  BasePoint x = base.step(f.anchor, lo);
  for (std::int64_t k = lo + 1; k <= hi; ++k) {
    const Vec r = f.at(k) - c.generator(x) * f.at(k - 1) - g.at(k);
    worst = std::max(worst, r.norm());
    x = base.step(x, 1);
  }
  return worst;
}

std::vector<Vec> oracle_solve_periodic(const Cocycle& c, const BaseSystem& base, const std::vector<Vec>& g) {
  if (base.kind() != BaseSystem::Kind::Periodic)
    fail(ErrorCode::IncompatibleBase, "oracle_solve_periodic needs a periodic base");
  const auto p = static_cast<Eigen::Index>(base.period());
  const auto d = static_cast<Eigen::Index>(c.dimension());
  require(static_cast<Eigen::Index>(g.size()) == p, "g must have one value per state");
  Mat sys = Mat::Identity(p * d, p * d);
  Vec rhs(p * d);
  for (Eigen::Index k = 0; k < p; ++k) {
    require(g[static_cast<std::size_t>(k)].size() == d, "g has the wrong dimension");
    rhs.segment(k * d, d) = g[static_cast<std::size_t>(k)];
    const Eigen::Index prev = (k + p - 1) % p;
    const Mat a = c.generator(PeriodicPoint{static_cast<std::uint32_t>(prev)});
    sys.block(k * d, prev * d, d, d) -= a;
  }
  Eigen::JacobiSVD<Mat> svd(sys);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0)))
    fail(ErrorCode::SingularSystem, "Id - Mather operator is singular (unit-modulus Floquet multiplier)");
  const Vec sol = sys.fullPivLu().solve(rhs);
  std::vector<Vec> out;
  for (Eigen::Index k = 0; k < p; ++k) out.emplace_back(sol.segment(k * d, d));
  return out;
}

double analytic_bound(PairOrientation o, double lambda) {
  require(lambda > 0.0, "rate must be positive");
  const double e = o == PairOrientation::WeightedInput ? std::exp(-lambda) : std::exp(-2.0 * lambda / 3.0);
  return (1.0 + e) / (1.0 - e);
}

std::optional<double> bound_ratio(const GreenSolver& solver, PairOrientation o, const OrbitFunction& g) {
  const GreenSolution sol = solver.solve(g);
  if (o == PairOrientation::WeightedInput) {
    const double in = weighted_norm(g, solver.k_samples());
    if (in == 0.0) return std::nullopt;
    return sup_norm(sol.f) / in;
  }
  const double in = sup_norm(g);
  if (in == 0.0) return std::nullopt;
  OrbitSamples c = solver.k_envelope(solver.certificate().k_rate() / 3.0);
  for (double& v : c.values) v = 1.0 / v;
  return weighted_norm(sol.f, c) / in;
}

BoundProbeReport bound_probe(const DichotomyCertificate& cert, PairOrientation o, const BasePoint& anchor,
                             std::size_t trials, std::int64_t window, std::int64_t n_tail, Rng& rng) {
  require(window >= 0 && trials >= 1, "bound_probe needs trials >= 1 and window >= 0");
  GreenSolver solver(cert, anchor, -window - n_tail, window + n_tail, n_tail);
  const std::size_t d = cert.cocycle->dimension();
  BoundProbeReport rep;
  rep.analytic = analytic_bound(o, cert.k_rate());
  rep.window = window;
  for (std::size_t t = 0; t < trials; ++t) {
    const bool coherent = t % 2 == 0;
    const Vec dir = rng.unit_vector(d);
    OrbitFunction g = OrbitFunction::tabulate(anchor, solver.g_first(), solver.g_last(), [&](std::int64_t k) {
      Vec v = coherent ? dir : rng.unit_vector(d);
      if (o == PairOrientation::WeightedInput) v /= solver.k_samples().at(k);
      return v;
    });
    if (auto r = bound_ratio(solver, o, g)) {
      rep.empirical = std::max(rep.empirical, *r);
      ++rep.trials_used;
    }
  }
  return rep;
}

UniquenessReport uniqueness_probe(const DichotomyCertificate& cert, const BasePoint& w, std::int64_t window,
                                  double tolerance) {
  require(window >= 1 && tolerance > 0.0, "uniqueness_probe needs window >= 1 and tolerance > 0");
  const OrbitFrames f = cert.frames(w, -window, window);
  UniquenessReport rep;
  rep.tolerance = tolerance;
  Mat last_s, last_u;
  for (std::int64_t n = 1; n <= window; ++n) {
    double s_norm = 0.0;
    if (f.stable_dim() > 0) {
      Mat m = f.projection_s(-n);
      for (std::int64_t k = -n + 1; k <= 0; ++k) m = f.projection_s(k) * (f.generator(k - 1) * m);
      s_norm = spectral_norm(m);
      last_s = std::move(m);
    }
    double u_norm = 0.0;
    if (f.unstable_dim() > 0) {
      Mat cpl = f.unstable(n).transpose() * f.projection_u(n);
      for (std::int64_t k = n - 1; k >= 0; --k) cpl = f.unstable_block(k).triangularView<Eigen::Upper>().solve(cpl);
      u_norm = spectral_norm(cpl);
      last_u = f.unstable(0) * cpl;
    }
    rep.stable_decay.push_back(s_norm);
    rep.unstable_decay.push_back(u_norm);
    if (rep.decay_step < 0 && s_norm < tolerance && u_norm < tolerance) rep.decay_step = n;
  }
  if (rep.decay_step < 0) {
    const bool stable_worse = rep.stable_decay.back() >= rep.unstable_decay.back();
    const Mat& m = stable_worse ? last_s : last_u;
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const Vec v = svd.matrixV().col(0);
    std::string dir;
    for (Eigen::Index i = 0; i < v.size(); ++i) dir += (i ? "," : "") + std::to_string(v(i));
    fail(ErrorCode::NoDecay, std::string(stable_worse ? "stable" : "unstable") +
                                 " propagation stays above tolerance; witness direction (" + dir + ")");
  }
  return rep;
}

}  // namespace cocyclelab
