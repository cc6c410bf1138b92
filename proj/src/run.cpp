#include "cocyclelab/run.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "cocyclelab/admissibility.hpp"
#include "cocyclelab/degeneracy.hpp"
#include "cocyclelab/dichotomy.hpp"
#include "cocyclelab/met.hpp"
#include "cocyclelab/robustness.hpp"
#include "json.hpp"

namespace cocyclelab {

using ojson = nlohmann::ordered_json;

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::int64_t v) { return format_number(v); }
std::string num(std::size_t v) { return format_number(static_cast<std::uint64_t>(v)); }

struct Context {
  RunConfig cfg;
  BaseSystem base;
  CocyclePtr cocycle;
  Rng root;
  std::filesystem::path out;
  unsigned threads = 1;
  std::vector<Artifact> artifacts;
  std::vector<Assertion> assertions;
  ojson results = ojson::object();

  LyapunovOptions lyapunov() const { return {cfg.steps, cfg.reorth, cfg.gap_tol}; }

  void write(const std::string& file, const std::string& kind, const CsvTable& t) {
    write_file(out / file, t.str());
    artifacts.push_back({file, kind});
  }

  void check(std::string name, double value, double threshold, bool passed) {
    assertions.push_back({std::move(name), passed, value, threshold});
  }
  void at_most(std::string name, double value, double threshold) {
    check(std::move(name), value, threshold, value <= threshold);
  }
  void at_least(std::string name, double value, double threshold) {
    check(std::move(name), value, threshold, value >= threshold);
  }

  BasePoint start_point() {
    Rng r = root.substream("base");
    return base.sample(r);
  }
};

ojson spectrum_json(const LyapunovSpectrum& s) {
  ojson j;
  j["exponents"] = s.exponents;
  j["multiplicities"] = s.multiplicities;
  j["standard_errors"] = s.standard_errors;
  j["steps"] = s.steps;
  return j;
}

std::string classification_of(const LyapunovSpectrum& s, double zero_tol) {
  try {
    return std::string(classification_name(classify(s, zero_tol)));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Inconclusive) throw;
    return "Inconclusive";
  }
}

CertificateOptions certificate_options(const RunConfig& c) {
  CertificateOptions o;
  o.safety = c.cert_safety;
  o.rate = c.rate;
  o.n_max = c.n_max;
  o.warmup = c.warmup;
  o.zero_tol = c.zero_tol;
  return o;
}

// Unit vectors, alternating between a fixed direction and fresh ones.
OrbitFunction random_rhs(const BasePoint& anchor, std::int64_t first, std::int64_t last, std::size_t d, Rng& rng) {
  const Vec fixed = rng.unit_vector(static_cast<Eigen::Index>(d));
  return OrbitFunction::tabulate(anchor, first, last, [&](std::int64_t k) -> Vec {
    if (k % 2 == 0) return fixed;
    return rng.unit_vector(static_cast<Eigen::Index>(d));
  });
}

// ---------------------------------------------------------------------------

void run_spectrum(Context& x) {
  const BasePoint w = x.start_point();
  const auto s = lyapunov_exponents(*x.cocycle, x.base, w, x.lyapunov());
  CsvTable t({"exponent", "multiplicity", "standard_error", "steps"});
  for (std::size_t i = 0; i < s.count(); ++i)
    t.add_row({num(s.exponents[i]), num(s.multiplicities[i]), num(s.standard_errors[i]), num(s.steps)});
  x.write("spectrum.csv", "spectrum", t);

  const std::size_t d = x.cocycle->dimension();
  std::vector<std::string> header{"n"};
  for (std::size_t i = 1; i <= d; ++i) header.push_back("lambda_" + std::to_string(i));
  CsvTable trace(header);
  const std::int64_t every = std::max<std::int64_t>(1, x.cfg.steps / 200);
  for (const auto& p : lyapunov_trace(forward_steps(x.cocycle, x.base, w), d, x.cfg.steps, every, x.cfg.reorth)) {
    std::vector<std::string> row{num(p.step)};
    for (double v : p.raw) row.push_back(num(v));
    trace.add_row(std::move(row));
  }
  x.write("spectrum_trace.csv", "spectrum_trace", trace);
  x.results["spectrum"] = spectrum_json(s);
  x.results["classification"] = classification_of(s, x.cfg.zero_tol);
}

void run_splitting(Context& x) {
  const auto s = lyapunov_exponents(*x.cocycle, x.base, x.start_point(), x.lyapunov());
  const auto n = static_cast<std::size_t>(x.cfg.samples);
  std::vector<BasePoint> pts(n);
  Rng r = x.root.substream("samples");
  for (auto& p : pts) p = x.base.sample(r);
  std::vector<OseledetsSplitting> out(n);
  SplittingOptions so;
  so.window = x.cfg.splitting_window;
  parallel_for(n, x.threads, [&](std::size_t i) { out[i] = oseledets_splitting(*x.cocycle, x.base, pts[i], s, so); });
  CsvTable t({"sample", "point", "min_cosine", "rcond", "equivariance_defect"});
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t.add_row({num(i), pts[i].describe(), num(out[i].min_cosine), num(out[i].rcond), num(out[i].equivariance_defect)});
    worst = std::max(worst, out[i].equivariance_defect);
  }
  x.write("splitting.csv", "splitting", t);
  x.results["spectrum"] = spectrum_json(s);
  x.results["max_equivariance_defect"] = worst;
}

struct CertificateRun {
  LyapunovSpectrum spectrum;
  std::vector<BasePoint> points;
};

CertificateRun certificate_inputs(Context& x) {
  CertificateRun r;
  const BasePoint w = x.start_point();
  r.spectrum = lyapunov_exponents(*x.cocycle, x.base, w, x.lyapunov());
  r.points.push_back(w);
  Rng s = x.root.substream("samples");
  for (std::int64_t i = 1; i < x.cfg.samples; ++i) r.points.push_back(x.base.sample(s));
  return r;
}

void run_dichotomy(Context& x) {
  auto in = certificate_inputs(x);
  const auto cert = build_certificate(x.cocycle, x.base, in.spectrum, in.points, certificate_options(x.cfg));
  const auto rep = check_certificate(cert, in.points, x.cfg.n_max, x.cfg.slack);

  CsvTable t({"sample", "point", "K"});
  for (std::size_t i = 0; i < in.points.size(); ++i)
    t.add_row({num(i), in.points[i].describe(), num(cert.k_samples[i])});
  x.write("certificate.csv", "certificate", t);

  const std::int64_t W = x.cfg.window;
  std::int64_t reach = 2 * W;
  for (auto h : x.cfg.horizons) reach = std::max<std::int64_t>(reach, std::abs(h));
  const OrbitSamples k = cert.k_along_orbit(in.points.front(), -reach, reach);
  const double eps = x.cfg.epsilon.value_or(cert.k_rate() / 3.0);
  const auto env = tempered_envelope(k, eps, W);
  CsvTable prof({"k", "K", "K_eps"});
  double below = 0.0, growth = 0.0;
  for (std::int64_t j = -W; j <= W; ++j) {
    prof.add_row({num(j), num(k.at(j)), num(env.values.at(j))});
    below = std::max(below, k.at(j) / env.values.at(j));
    if (j < W) {
      const double a = env.values.at(j), b = env.values.at(j + 1);
      growth = std::max(growth, std::max(a / b, b / a) / std::exp(eps));
    }
  }
  x.write("k_profile.csv", "k_profile", prof);
  const auto temp = temperedness_diagnostic(k, x.cfg.horizons, 0.1);

  x.at_most("certificate_worst_ratio", rep.worst_ratio, x.cfg.slack);
  x.at_most("envelope_dominates_K", below, 1.0);
  x.at_most("envelope_growth_law", growth, 1.0 + 1e-12);
  x.results["spectrum"] = spectrum_json(in.spectrum);
  x.results["rate"] = cert.rate;
  x.results["stable_dim"] = cert.stable_dim;
  x.results["worst_ratio"] = rep.worst_ratio;
  x.results["epsilon"] = eps;
  x.results["temperedness_slopes"] = temp.slopes;
}

void run_solve(Context& x) {
  auto in = certificate_inputs(x);
  const auto cert = build_certificate(x.cocycle, x.base, in.spectrum, {in.points.front()}, certificate_options(x.cfg));
  const BasePoint& w = in.points.front();
  const std::int64_t W = x.cfg.window, N = x.cfg.n_tail;
  Rng g_rng = x.root.substream("g-trials");
  const GreenSolver solver(cert, w, -W - N, W + N, N);
  const OrbitFunction g = random_rhs(w, -W - N, W + N, x.cocycle->dimension(), g_rng);
  const auto sol = solver.solve(g);
  const double res = residual(*x.cocycle, x.base, sol.f, g);
  CsvTable t({"k", "f_norm", "g_norm", "K"});
  for (std::int64_t k = sol.f.first; k <= sol.f.last(); ++k)
    t.add_row({num(k), num(sol.f.at(k).norm()), num(g.at(k).norm()), num(solver.k_samples().at(k))});
  x.write("solve.csv", "solve", t);

  Rng probe_rng = x.root.substream("probe");
  const auto probe = bound_probe(cert, PairOrientation::WeightedInput, w, static_cast<std::size_t>(x.cfg.trials), W, N,
                                 probe_rng);
  x.at_most("residual_within_tail", res, sol.tail_bound + 1e-10);
  x.at_most("empirical_bound", probe.empirical, probe.analytic);
  x.results["rate"] = cert.rate;
  x.results["residual"] = res;
  x.results["tail_bound"] = sol.tail_bound;
  x.results["k_hat"] = sol.k_hat;
  x.results["empirical_bound"] = probe.empirical;
  x.results["analytic_bound"] = probe.analytic;
}

// Hyperbolic cocycle over a p-cycle: A_k = S_{k+1} (D_k + U_k) S_k^{-1} with
// S_p = S_0, so the exponents are the period means of log |D_k|.
CocyclePtr oracle_instance(const BaseSystem& base, std::size_t d, Rng& rng) {
  const std::uint32_t p = base.period();
  const auto n = static_cast<Eigen::Index>(d);
  const auto stable = static_cast<Eigen::Index>(rng.below(d + 1));
  std::vector<Mat> s(p);
  for (auto& m : s) m = Mat::Identity(n, n) + 0.3 * rng.gaussian_matrix(n, n);
  std::vector<Mat> mats;
  for (std::uint32_t k = 0; k < p; ++k) {
    Mat t = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mag = std::exp(rng.uniform(0.5, 1.5) * (i < stable ? -1.0 : 1.0));
      t(i, i) = rng.uniform() < 0.5 ? -mag : mag;
      for (Eigen::Index j = i + 1; j < n; ++j) t(i, j) = 0.3 * rng.normal();
    }
    mats.push_back(s[(k + 1) % p] * t * s[k].inverse());
  }
  return symbol_table(base, std::move(mats), "oracle_instance");
}

void run_oracle_compare(Context& x) {
  const auto n = static_cast<std::size_t>(x.cfg.trials);
  struct Row {
    std::uint32_t p = 0;
    std::size_t d = 0;
    std::int64_t n_tail = 0;
    double deviation = 0.0, tail = 0.0;
  };
  std::vector<Row> rows(n);
  parallel_for(n, x.threads, [&](std::size_t i) {
    Rng rng = x.root.substream("oracle", i);
    Row& r = rows[i];
    r.p = x.cfg.period > 0 ? static_cast<std::uint32_t>(x.cfg.period) : static_cast<std::uint32_t>(1 + rng.below(8));
    r.d = x.cfg.dimension > 0 ? static_cast<std::size_t>(x.cfg.dimension) : static_cast<std::size_t>(1 + rng.below(4));
    const BaseSystem base = BaseSystem::periodic(r.p);
    const CocyclePtr c = oracle_instance(base, r.d, rng);
    const BasePoint w = PeriodicPoint{0};
    const auto spectrum = lyapunov_exponents(*c, base, w, x.lyapunov());
    const auto cert = build_certificate(c, base, spectrum, {}, certificate_options(x.cfg));
    std::vector<Vec> g(r.p);
    for (auto& v : g) v = rng.unit_vector(static_cast<Eigen::Index>(r.d));
    const auto exact = oracle_solve_periodic(*c, base, g);
    // Grow the truncation until the tail is negligible against the target.
    for (r.n_tail = std::max<std::int64_t>(x.cfg.n_tail, 1);; r.n_tail *= 2) {
      const std::int64_t lo = -r.n_tail - static_cast<std::int64_t>(r.p), hi = r.n_tail + static_cast<std::int64_t>(r.p);
      const auto gf = OrbitFunction::tabulate(w, lo, hi, [&](std::int64_t k) {
        return g[static_cast<std::size_t>(((k % r.p) + r.p) % r.p)];
      });
      const auto sol = green_solve(cert, gf, r.n_tail);
      r.tail = sol.tail_bound;
      r.deviation = 0.0;
      for (std::int64_t k = sol.f.first; k <= sol.f.last(); ++k)
        r.deviation = std::max(
            r.deviation, (sol.f.at(k) - exact[static_cast<std::size_t>(((k % r.p) + r.p) % r.p)]).lpNorm<Eigen::Infinity>());
      if (sol.tail_bound <= 1e-10 || r.n_tail >= 2048) break;
    }
  });
  CsvTable t({"instance", "period", "dimension", "n_tail", "max_deviation", "tail_bound"});
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t.add_row({num(i), num(static_cast<std::int64_t>(rows[i].p)), num(rows[i].d), num(rows[i].n_tail),
               num(rows[i].deviation), num(rows[i].tail)});
    worst = std::max(worst, rows[i].deviation);
  }
  x.write("oracle_compare.csv", "oracle_compare", t);
  x.at_most("max_deviation", worst, 1e-8);
  x.results["max_deviation"] = worst;
}

void run_mane(Context& x) {
  const BasePoint w = x.start_point();
  const auto s = lyapunov_exponents(*x.cocycle, x.base, w, x.lyapunov());
  if (classify(s, x.cfg.zero_tol) == Classification::Hyperbolic)
    fail(ErrorCode::NotDegenerate, x.cocycle->descriptor() + " has no zero exponent");
  const Mat e0 = zero_block_basis(*x.cocycle, x.base, w, s, x.cfg.splitting_window);
  const auto rv =
      recurrent_vector_search(*x.cocycle, x.base, w, e0, x.cfg.search_horizon, static_cast<std::size_t>(x.cfg.grid));
  const auto pair = mane_sequences(*x.cocycle, x.base, w, rv.v, x.cfg.target, x.cfg.horizon);
  const auto chk = check_mane(pair);
  CsvTable t({"n", "beta", "alpha", "growth", "x_norm", "y_norm"});
  for (std::size_t n = 0; n < pair.x.size(); ++n)
    t.add_row({num(n), num(pair.beta[n]), num(pair.alpha[n]), num(pair.growth[n]), num(pair.x[n].norm()),
               num(pair.y[n].norm())});
  x.write("mane.csv", "mane", t);
  x.at_most("initial", chk.initial, 1e-12);
  x.at_most("recurrence", chk.recurrence, 1e-10);
  x.at_most("telescoping", chk.telescoping, 1e-10);
  x.at_most("alpha_end", chk.alpha_end, 1e-12);
  x.at_most("beta_bound", chk.max_abs_beta, 1.0);
  x.at_least("max_x", chk.max_x, x.cfg.target);
  x.at_most("max_y", chk.max_y, 1.0 + 1e-12);
  x.results["defect"] = rv.defect;
  x.results["n_star"] = pair.n_star;
  x.results["n_end"] = pair.n_end;
  x.results["beta_end"] = pair.beta.back();
}

void run_induce(Context& x) {
  const SetIndicator F = make_set(x.cfg, x.base);
  Rng r = x.root.substream("induce");
  const auto ind = induce(x.cocycle, x.base, F, static_cast<std::size_t>(x.cfg.set_samples), r, x.cfg.horizon);
  BasePoint w = x.base.sample(r);
  for (int i = 0; i < 100000 && !F(w); ++i) w = x.base.sample(r);
  if (!F(w)) fail(ErrorCode::EmptyTower, "no sampled point in " + F.descriptor);
  const auto parent = lyapunov_exponents(*x.cocycle, x.base, w, x.lyapunov());
  const auto induced = induced_exponents(ind, w, x.lyapunov());
  CsvTable t({"index", "parent", "induced", "predicted", "relative_error"});
  double worst = 0.0;
  const std::size_t m = std::min(parent.raw.size(), induced.raw.size());
  for (std::size_t i = 0; i < m; ++i) {
    const double pred = parent.raw[i] / ind.measure();
    const double rel = std::abs(parent.raw[i]) > x.cfg.zero_tol ? std::abs(induced.raw[i] - pred) / std::abs(pred) : 0.0;
    if (std::abs(parent.raw[i]) > x.cfg.zero_tol) worst = std::max(worst, rel);
    t.add_row({num(i + 1), num(parent.raw[i]), num(induced.raw[i]), num(pred), num(rel)});
  }
  x.write("induce.csv", "induce", t);
  x.at_most("scaling_relative_error", worst, 0.02);
  x.results["set"] = F.descriptor;
  x.results["measure"] = ind.measure();
  x.results["log_norm_mean"] = ind.log_norm_mean();
  x.results["parent"] = spectrum_json(parent);
  x.results["induced"] = spectrum_json(induced);
}

void run_witness(Context& x) {
  WitnessBudgets b;
  b.rokhlin_samples = static_cast<std::size_t>(x.cfg.rokhlin_samples);
  b.search_horizon = x.cfg.search_horizon;
  b.grid = static_cast<std::size_t>(x.cfg.grid);
  b.mane_horizon = x.cfg.horizon;
  b.splitting_window = x.cfg.splitting_window;
  b.spectrum = x.lyapunov();
  b.zero_tol = x.cfg.zero_tol;
  b.weighted_output = x.cfg.weighted_output;
  Rng r = x.root.substream("witness");
  const auto wit = violation_witness(x.cocycle, x.base, WeightModel::constant(x.cfg.weight), x.cfg.ratio, b, r);
  CsvTable t({"j", "f_norm", "g_norm", "weight", "g_weighted"});
  for (std::size_t j = 0; j < wit.f_values.size(); ++j)
    t.add_row({num(j), num(wit.f_values[j].norm()), num(wit.g_values[j].norm()), num(wit.weights[j]),
               num(wit.g_values[j].norm() * wit.weights[j])});
  x.write("witness.csv", "witness", t);
  x.at_most("tower_residual", wit.residual, 1e-10);
  x.at_most("offtower_residual", wit.offtower_residual, 1e-10);
  x.check("g_supported_on_F", wit.g_supported_on_F ? 1.0 : 0.0, 1.0, wit.g_supported_on_F);
  x.check("ratio_exceeds_L", wit.ratio, x.cfg.ratio, wit.ratio > x.cfg.ratio);
  x.results["height"] = wit.height;
  x.results["level"] = wit.level;
  x.results["target"] = wit.target;
  x.results["ratio"] = wit.ratio;
  x.results["f_norm"] = wit.f_norm;
  x.results["g_norm"] = wit.g_norm;
  x.results["set_measure"] = wit.set_measure;
  x.results["tower_refined"] = wit.tower.refined;
  x.results["tower_measure"] = wit.tower.empirical_measure;
  x.results["base_point"] = wit.base_point.describe();
}

void run_robustness(Context& x) {
  const BasePoint w = x.start_point();
  const auto s = lyapunov_exponents(*x.cocycle, x.base, w, x.lyapunov());
  const auto cert = build_certificate(x.cocycle, x.base, s, {w}, certificate_options(x.cfg));
  const auto bud = budget(cert, x.cfg.safety);
  const auto n = static_cast<std::size_t>(x.cfg.trials);
  struct Trial {
    ContractionResult solve;
    PerturbedReport check;
  };
  std::vector<Trial> trials(n);
  const std::int64_t W = x.cfg.window;
  parallel_for(n, x.threads, [&](std::size_t i) {
    const PerturbationField field{x.root.substream("perturbations", i).seed()};
    const CocyclePtr b = perturbed_cocycle(cert, bud, field);
    Rng g_rng = x.root.substream("g-trials", i);
    const auto g = random_rhs(w, -W, W, x.cocycle->dimension(), g_rng);
    trials[i].solve = contraction_solve(*x.cocycle, *b, cert, bud, g, x.cfg.tol, x.cfg.max_iters);
    trials[i].check = perturbed_check(perturbed_steps(cert, bud, field, w), x.cocycle->dimension(), x.lyapunov(),
                                      x.cfg.zero_tol);
  });
  CsvTable t({"trial", "budget_use", "iterations", "ratio", "residual", "perturbed_margin", "hyperbolic"});
  CsvTable it({"trial", "iteration", "step"});
  double ratio = 0.0, res = 0.0, margin = std::numeric_limits<double>::infinity();
  bool all_hyperbolic = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tr = trials[i];
    t.add_row({num(i), num(tr.solve.budget_use), num(tr.solve.iterations), num(tr.solve.max_ratio),
               num(tr.solve.residual), num(tr.check.margin), tr.check.hyperbolic ? "1" : "0"});
    for (std::size_t k = 0; k < tr.solve.steps.size(); ++k) it.add_row({num(i), num(k + 1), num(tr.solve.steps[k])});
    ratio = std::max(ratio, tr.solve.max_ratio);
    res = std::max(res, tr.solve.residual);
    margin = std::min(margin, tr.check.margin);
    all_hyperbolic = all_hyperbolic && tr.check.hyperbolic;
  }
  x.write("robustness.csv", "robustness", t);
  x.write("contraction.csv", "contraction", it);
  x.at_most("contraction_ratio", ratio, bud.q + 0.05);
  x.at_most("fixed_point_residual", res, 10.0 * x.cfg.tol);
  x.check("perturbed_hyperbolic", all_hyperbolic ? 1.0 : 0.0, 1.0, all_hyperbolic);
  x.results["rate"] = bud.rate;
  x.results["d"] = bud.d;
  x.results["q"] = bud.q;
  x.results["max_ratio"] = ratio;
  x.results["max_residual"] = res;
  x.results["min_margin"] = margin;
}

void run_birkhoff(Context& x) {
  Observable phi;
  if (x.base.kind() == BaseSystem::Kind::Rotation) {
    phi = Observable::cosine();
  } else if (x.base.kind() == BaseSystem::Kind::Bernoulli) {
    const double p0 = x.base.probabilities().front();
    const BaseSystem base = x.base;
    phi = {[base, p0](const BasePoint& w) { return (base.symbol(w, 0) == 0 ? 1.0 : 0.0) - p0; }, 0.0,
           "1[symbol=0]-p0"};
  } else {
    fail(ErrorCode::IncompatibleBase, "birkhoff needs a rotation or Bernoulli base");
  }
  const auto n = static_cast<std::size_t>(x.cfg.samples);
  std::vector<BasePoint> pts(n);
  Rng r = x.root.substream("samples");
  for (auto& p : pts) p = x.base.sample(r);
  std::vector<BirkhoffExtrema> ext(n);
  parallel_for(n, x.threads, [&](std::size_t i) { ext[i] = birkhoff_extrema(x.base, phi, pts[i], x.cfg.horizon); });
  CsvTable t({"sample", "point", "min", "max", "straddles"});
  std::size_t good = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t.add_row({num(i), pts[i].describe(), num(ext[i].min), num(ext[i].max), ext[i].straddles_zero() ? "1" : "0"});
    good += ext[i].straddles_zero() ? 1 : 0;
  }
  x.write("birkhoff.csv", "birkhoff", t);

  CsvTable traj({"n", "S_n"});
  const std::int64_t every = std::max<std::int64_t>(1, x.cfg.horizon / 1000);
  double sum = 0.0;
  BasePoint y = pts.front();
  for (std::int64_t k = 1; k <= x.cfg.horizon; ++k) {
    sum += phi(y);
    y = x.base.step(y, 1);
    if (k % every == 0) traj.add_row({num(k), num(sum)});
  }
  x.write("birkhoff_trajectory.csv", "birkhoff_trajectory", traj);
  const double frac = static_cast<double>(good) / static_cast<double>(n);
  x.at_least("straddle_fraction", frac, 0.95);
  x.results["observable"] = phi.descriptor;
  x.results["straddle_fraction"] = frac;
}

void run_report(Context& x) {
  const auto written = emit_report(x.cfg.source, x.out);
  x.results["source"] = x.cfg.source;
  x.results["plots"] = written.size();
  for (const auto& a : written) x.artifacts.push_back(a);
}

ojson config_json(const RunConfig& c) {
  ojson j = ojson::object();
  std::istringstream in(serialize_config(c));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    j[line.substr(0, eq)] = ojson::parse(line.substr(eq + 3));
  }
  return j;
}

std::string summary_text(const RunConfig& c, const RunResult& r) {
  std::ostringstream s;
  s << "experiment: " << experiment_name(c.experiment) << "\n";
  s << "cocycle: " << c.cocycle << " over " << c.base << "\n";
  s << "seed: " << (c.seed ? std::to_string(*c.seed) : "-") << "\n";
  s << "status: " << (r.exit_code == 0 ? "ok" : std::string(error_name(r.error))) << "\n";
  if (!r.message.empty()) s << "message: " << r.message << "\n";
  for (const auto& a : r.assertions)
    s << (a.passed ? "  PASS " : "  FAIL ") << a.name << " value=" << format_number(a.value)
      << " threshold=" << format_number(a.threshold) << "\n";
  for (const auto& a : r.artifacts) s << "  artifact " << a.file << " (" << a.kind << ")\n";
  return s.str();
}

void finish(const RunConfig& c, const std::filesystem::path& out, RunResult& r, const ojson& results) {
  r.summary = summary_text(c, r);
  ojson j;
  j["experiment"] = std::string(experiment_name(c.experiment));
  j["status"] = r.exit_code == 0 ? "ok" : "error";
  j["exit_code"] = r.exit_code;
  j["error"] = std::string(error_name(r.error));
  j["message"] = r.message;
  j["config"] = config_json(c);
  j["assertions"] = ojson::array();
  for (const auto& a : r.assertions)
    j["assertions"].push_back({{"name", a.name}, {"passed", a.passed}, {"value", a.value}, {"threshold", a.threshold}});
  j["results"] = results;
  try {
    write_file(out / "summary.json", j.dump(2) + "\n");
    write_file(out / "summary.txt", r.summary);
    write_file(out / "config.txt", serialize_config(c));
    write_file(out / "manifest.json", manifest_json(r.artifacts, experiment_name(c.experiment)));
  } catch (const Error& e) {
    if (r.exit_code == 0) {
      r.exit_code = 2;
      r.error = e.code();
      r.message = e.what();
    }
  }
}

}  // namespace

RunResult run_experiment(RunConfig config, const RunOptions& options) {
  RunResult r;
  if (options.seed) config.seed = options.seed;
  std::optional<Context> ctx;
  try {
    validate(config);
    BaseSystem base = make_base(config);
    CocyclePtr c = make_cocycle(config, base);
    ctx.emplace(Context{config, std::move(base), std::move(c), Rng(*config.seed), options.out_dir,
                        std::max(1u, options.threads), {}, {}, ojson::object()});
  } catch (const Error& e) {
    r.exit_code = 1;
    r.error = e.code();
    r.message = e.what();
    r.summary = summary_text(config, r);
    return r;
  }

  Context& x = *ctx;
  try {
    switch (config.experiment) {
      case Experiment::Spectrum: run_spectrum(x); break;
      case Experiment::Splitting: run_splitting(x); break;
      case Experiment::Dichotomy: run_dichotomy(x); break;
      case Experiment::Solve: run_solve(x); break;
      case Experiment::OracleCompare: run_oracle_compare(x); break;
      case Experiment::Mane: run_mane(x); break;
      case Experiment::Induce: run_induce(x); break;
      case Experiment::Witness: run_witness(x); break;
      case Experiment::Robustness: run_robustness(x); break;
      case Experiment::Report: run_report(x); break;
      case Experiment::Birkhoff: run_birkhoff(x); break;
    }
    for (const auto& a : x.assertions)
      if (!a.passed) {
        r.exit_code = 2;
        r.error = ErrorCode::Violation;
        r.message = "assertion " + a.name + " failed";
        break;
      }
  } catch (const Error& e) {
    r.exit_code = 2;
    r.error = e.code();
    r.message = e.what();
  } catch (const std::exception& e) {
    r.exit_code = 2;
    r.error = ErrorCode::Internal;
    r.message = e.what();
  }
  r.artifacts = x.artifacts;
  r.assertions = x.assertions;
  finish(config, x.out, r, x.results);
  return r;
}

RunResult run_config_file(const std::filesystem::path& path, const RunOptions& options) {
  RunConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const Error& e) {
    RunResult r;
    r.exit_code = 1;
    r.error = e.code();
    r.message = e.what();
    r.summary = "status: " + std::string(error_name(e.code())) + "\nmessage: " + r.message + "\n";
    return r;
  }
  return run_experiment(std::move(cfg), options);
}

}  // namespace cocyclelab
