#include "cocyclelab/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cocyclelab/random.hpp"

namespace cocyclelab {

double PerturbationBudget::allowance(const DichotomyCertificate& cert, const BasePoint& w) const {
  return allowance(cert.k_value(cert.base.step(w, 1)));
}

PerturbationBudget budget(const DichotomyCertificate& cert, double safety) {
  require(safety > 0.0 && safety < 1.0, "budget safety must lie strictly between 0 and 1");
  PerturbationBudget b;
  b.rate = cert.k_rate();
  b.factor = analytic_bound(PairOrientation::WeightedInput, b.rate);
  b.d = safety / b.factor;
  b.q = b.d * b.factor;
  require(b.q < 1.0, "contraction factor must be below 1");
  return b;
}

OrbitSamples allowance_along(const PerturbationBudget& b, const OrbitSamples& k, std::int64_t lo, std::int64_t hi) {
  require(lo <= hi, "allowance_along needs lo <= hi");
  if (!k.contains(lo + 1) || !k.contains(hi + 1))
    fail(ErrorCode::WindowTooSmall, "K samples do not cover the shifted window");
  OrbitSamples out{lo, {}};
  out.values.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t j = lo; j <= hi; ++j) out.values.push_back(b.allowance(k.at(j + 1)));
  return out;
}

Mat PerturbationField::direction(const BasePoint& w, std::size_t d) const {
  Rng rng(splitmix64(w.hash() ^ splitmix64(seed)));
  const auto n = static_cast<Eigen::Index>(d);
  Mat r = rng.gaussian_matrix(n, n);
  return r / spectral_norm(r);
}

CocyclePtr perturbed_cocycle(const DichotomyCertificate& cert, const PerturbationBudget& b,
                             const PerturbationField& field) {
  CocyclePtr a = cert.cocycle;
  const std::size_t d = a->dimension();
  // The certificate is copied so the cocycle stays valid on its own.
  auto owned = std::make_shared<DichotomyCertificate>(cert);
  Cocycle::Generator gen = [a, owned, b, field, d](const BasePoint& w) -> Mat {
    return a->generator(w) + (field.scale * b.allowance(*owned, w)) * field.direction(w, d);
  };
  return std::make_shared<Cocycle>(d, std::move(gen), a->invertible(),
                                   a->descriptor() + "+perturbation(" + std::to_string(field.seed) + ")");
}

StepSource perturbed_steps(const DichotomyCertificate& cert, const PerturbationBudget& b,
                           const PerturbationField& field, const BasePoint& w, std::int64_t block) {
  require(block >= 1, "perturbed_steps needs block >= 1");
  auto owned = std::make_shared<DichotomyCertificate>(cert);
  std::int64_t n = 0;
  OrbitSamples k;
  return [owned, b, field, w, block, n, k]() mutable {
    if (!k.contains(n + 1)) k = owned->k_along_orbit(w, n + 1, n + block);
    const BasePoint x = owned->base.step(w, n);
    const std::size_t d = owned->cocycle->dimension();
    Mat out = owned->cocycle->generator(x) + (field.scale * b.allowance(k.at(n + 1))) * field.direction(x, d);
    ++n;
    return out;
  };
}

ContractionResult contraction_solve(const Cocycle& a, const Cocycle& b, const DichotomyCertificate& cert,
                                    const PerturbationBudget& budget, const OrbitFunction& g, double tol,
                                    std::int64_t max_iters) {
  require(tol > 0.0 && max_iters >= 1, "contraction_solve needs tol > 0 and max_iters >= 1");
  require(a.dimension() == cert.cocycle->dimension() && b.dimension() == a.dimension(),
          "cocycle dimensions do not match the certificate");
  require(g.size() >= 2, "g needs at least two points");
  const auto d = static_cast<Eigen::Index>(a.dimension());
  for (const auto& v : g.values) require(v.size() == d, "g has the wrong dimension");

  // Series over the whole window; no output trimming is needed here.
  GreenSolver solver(cert, g.anchor, g.first, g.last(), 0);
  const OrbitSamples k_shift = cert.k_along_orbit(solver.frames(), g.first + 1, g.last());

  ContractionResult out;
  std::vector<Mat> delta;
  std::vector<Mat> b_gen;
  delta.reserve(g.size() - 1);
  BasePoint x = cert.base.step(g.anchor, g.first);
  for (std::int64_t k = g.first; k < g.last(); ++k) {
    const Mat bk = b.generator(x);
    const Mat dk = bk - a.generator(x);
    const double c = budget.allowance(k_shift.at(k + 1));
    const double use = spectral_norm(dk) / c;
    out.budget_use = std::max(out.budget_use, use);
    if (use > 1.0 + 1e-9)
      fail(ErrorCode::BudgetViolated, "||B - A|| = " + std::to_string(spectral_norm(dk)) + " exceeds c = " +
                                          std::to_string(c) + " at " + x.describe());
    delta.push_back(dk);
    b_gen.push_back(bk);
    x = cert.base.step(x, 1);
  }

  OrbitFunction f = OrbitFunction::zeros(g.anchor, g.first, g.last(), static_cast<std::size_t>(d));
  bool converged = false;
  for (std::int64_t it = 1; it <= max_iters; ++it) {
    OrbitFunction h = g;
    h.weights.clear();
    for (std::int64_t k = g.first + 1; k <= g.last(); ++k)
      h.at(k) += delta[static_cast<std::size_t>(k - 1 - g.first)] * f.at(k - 1);
    OrbitFunction next = solver.apply_series(h);
    double step = 0.0;
    for (std::int64_t k = g.first; k <= g.last(); ++k) step = std::max(step, (next.at(k) - f.at(k)).norm());
    f = std::move(next);
    out.iterations = it;
    if (!out.steps.empty() && out.steps.back() > 0.0) {
      const double r = step / out.steps.back();
      out.ratios.push_back(r);
      // Ratios of rounding-level steps carry no information.
      if (out.steps.back() > 1e3 * std::numeric_limits<double>::epsilon()) out.max_ratio = std::max(out.max_ratio, r);
    }
    out.steps.push_back(step);
    if (step <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    fail(ErrorCode::NoConvergence, "no fixed point within " + std::to_string(max_iters) + " iterations (last step " +
                                       std::to_string(out.steps.back()) + ")");

  for (std::int64_t k = g.first + 1; k <= g.last(); ++k) {
    const auto i = static_cast<std::size_t>(k - 1 - g.first);
    out.residual = std::max(out.residual, (f.at(k) - b_gen[i] * f.at(k - 1) - g.at(k)).norm());
  }
  out.f = std::move(f);
  return out;
}

PerturbedReport perturbed_check(StepSource steps, std::size_t d, const LyapunovOptions& opts, double zero_tol) {
  PerturbedReport rep;
  rep.spectrum = lyapunov_exponents(std::move(steps), d, opts);
  try {
    rep.hyperbolic = classify(rep.spectrum, zero_tol) == Classification::Hyperbolic;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Inconclusive) throw;
    rep.inconclusive = true;
  }
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.spectrum.count(); ++i)
    if (!rep.spectrum.minus_infinity(i)) rep.margin = std::min(rep.margin, std::abs(rep.spectrum.exponents[i]));
  return rep;
}

PerturbedReport perturbed_check(const Cocycle& b, const BaseSystem& base, const BasePoint& w,
                                const LyapunovOptions& opts, double zero_tol) {
  BasePoint x = w;
  StepSource steps = [&b, &base, x]() mutable {
    Mat m = b.generator(x);
    x = base.step(x, 1);
    return m;
  };
  return perturbed_check(std::move(steps), b.dimension(), opts, zero_tol);
}

}  // namespace cocyclelab
