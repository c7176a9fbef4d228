#pragma once

// End-to-end acceptance checks. Each check prints one PASS/FAIL line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "prbm/bandit.hpp"
#include "prbm/csv.hpp"
#include "prbm/experiments.hpp"
#include "prbm/feynman_kac.hpp"
#include "prbm/greedy.hpp"
#include "prbm/random.hpp"

namespace prbm::acceptance {

struct Result {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline std::string line(const Result& r) {
  std::ostringstream os;
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << " (" << csv::format(std::round(r.seconds * 10) / 10)
     << " s)";
  return os.str();
}

namespace detail {

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace detail

/// Exact sample counts of the D-greedy and MC rows, from accounting and from
/// one full run each.
inline Result table1_exact_rows() {
  Result r{"table1-exact-rows", true, {}, 0.0};
  const auto rows = sample_complexity_table({true, false, 1});
  std::ostringstream os;
  for (const auto& row : rows) {
    const bool ok = row.tc1 == static_cast<std::uint64_t>(row.tc1_reference) &&
                    row.tc2 == static_cast<std::uint64_t>(row.tc2_reference) && row.consistent();
    r.passed = r.passed && ok;
    os << row.method << " " << row.tc1 << "/" << row.tc2 << " (runs " << row.tc1_run.value_or(0) << "/"
       << row.tc2_run.value_or(0) << ")" << (ok ? "" : " MISMATCH") << "; ";
  }
  r.detail = os.str();
  return r;
}

inline RunReport run_preset(TestCase t, SelectorKind kind, std::uint64_t K = 1, std::uint64_t seed = 1) {
  ExperimentConfig c = preset(t);
  c.selector.kind = kind;
  c.selector.K = K;
  c.seed = seed;
  return run_experiment(c);
}

/// TC1 with interpolation: d-greedy and MC (K=1) reach a validation mean
/// error <= 1e-12 at n = 20.
inline Result tc1_decay() {
  const auto d = run_preset(TestCase::tc1, SelectorKind::d_greedy);
  const auto mc = run_preset(TestCase::tc1, SelectorKind::mc, 1);
  Result r{"tc1-error-decay", d.final_mean() <= 1e-12 && mc.final_mean() <= 1e-12, {}, 0.0};
  r.detail = "d-greedy n=" + std::to_string(d.dimension()) + " mean " + detail::sci(d.final_mean()) +
             ", mc(K=1) n=" + std::to_string(mc.dimension()) + " mean " + detail::sci(mc.final_mean()) +
             " (threshold 1e-12)";
  return r;
}

/// TC2 with MC (K=1) and interpolation reaches <= 1e-4 at n = 30.
inline Result tc2_decay() {
  const auto mc = run_preset(TestCase::tc2, SelectorKind::mc, 1);
  Result r{"tc2-error-decay", mc.final_mean() <= 1e-4, {}, 0.0};
  r.detail = "mc(K=1) n=" + std::to_string(mc.dimension()) + " mean " + detail::sci(mc.final_mean()) +
             " (threshold 1e-4)";
  return r;
}

/// Random selection on TC1 at n = 20 is at least 10x worse than d-greedy in
/// a majority of 10 seeds.
inline Result random_degradation() {
  const double reference = run_preset(TestCase::tc1, SelectorKind::d_greedy).final_mean();
  int wins = 0;
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double e = run_preset(TestCase::tc1, SelectorKind::random, 1, seed).final_mean();
    const double ratio = e / reference;
    worst_ratio = std::min(worst_ratio, ratio);
    if (ratio >= 10.0) ++wins;
  }
  Result r{"random-degradation", wins >= 6, {}, 0.0};
  r.detail = std::to_string(wins) + "/10 seeds with random >= 10x d-greedy (d-greedy mean " + detail::sci(reference) +
             ", smallest ratio " + detail::sci(worst_ratio) + ")";
  return r;
}

/// Bounded bandit on 10 synthetic arms with known means: relative-precision
/// success frequency over 200 runs, against 0.9 minus the binomial 95% band.
inline Result pac_property() {
  constexpr std::size_t arms = 10;
  constexpr int runs = 200;
  const double eps = 0.9;
  std::vector<double> mu(arms);
  for (std::size_t a = 0; a < arms; ++a) mu[a] = 0.1 * static_cast<double>(a + 1);
  const double best = *std::max_element(mu.begin(), mu.end());
  BanditOptions opt;
  opt.kind = ConfidenceKind::bounded;
  opt.eps = eps;
  opt.lambda = 0.1;
  int success = 0;
  std::uint64_t samples = 0;
  for (int run = 0; run < runs; ++run) {
    const Stream root(1000 + static_cast<std::uint64_t>(run));
    // Z_a uniform on [0, 2 mu_a].
    auto draw = [&](std::size_t a, std::uint64_t k) { return 2.0 * mu[a] * root.child(a, k).uniform(); };
    auto bounds = [&](std::size_t a) { return Bounds{0.0, 2.0 * mu[a]}; };
    const auto out = run_bandit(arms, draw, bounds, opt);
    samples += out.total_samples;
    if (mu[out.selected] >= (1.0 - eps) * best) ++success;
  }
  const double freq = success / static_cast<double>(runs);
  const double band = 1.959963984540054 * std::sqrt(0.9 * 0.1 / runs);
  Result r{"pac-property", freq >= 0.9 - band, {}, 0.0};
  r.detail = "success frequency " + csv::format(freq) + " over " + std::to_string(runs) + " runs (threshold " +
             csv::format(0.9 - band) + "), mean samples " + csv::format(static_cast<double>(samples) / runs);
  return r;
}

/// TC1, 30 training parameters, n_max = 8, pac-bounded with eps = 0.9 and
/// least-squares projection: min_n gamma_n >= sqrt(1 - eps) in >= 90 of 100
/// seeds, with gamma_n from QR-based orthogonal projections.
inline Result weak_greedy() {
  ExperimentConfig c = preset(TestCase::tc1);
  c.training.count = 30;
  c.n_max = 8;
  c.selector.kind = SelectorKind::pac_bounded;
  c.projector = ProjectionMethod::least_squares;
  c.validate();
  const GreedyProblem p = make_problem(c);
  const Matrix truth = truth_table(*p.function, p.training, *p.grid);
  const double threshold = std::sqrt(1.0 - c.selector.eps);
  int ok = 0;
  double lowest = 1.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GreedyConfig g = greedy_config(c);
    g.seed = seed;
    g.validate = false;
    g.record_indicators = false;
    const auto res = run_greedy(p, g);
    const auto gammas = weak_greedy_ratios(truth, *p.grid, res.trace.selected());
    const double m = gammas.empty() ? 0.0 : *std::min_element(gammas.begin(), gammas.end());
    lowest = std::min(lowest, m);
    if (m >= threshold && res.trace.iterations.size() == c.n_max) ++ok;
  }
  Result r{"weak-greedy-ratios", ok >= 90, {}, 0.0};
  r.detail = std::to_string(ok) + "/100 seeds with min gamma >= " + csv::format(threshold) + " (lowest " +
             csv::format(lowest) + ")";
  return r;
}

/// Feynman-Kac point estimate at xi = 1, x = 0.5, dt = 1e-3, M = 1e4 within
/// 4 standard errors plus sqrt(dt) of the exact value.
inline Result fk_pointwise() {
  const auto problem = make_pde_problem(1e-3);
  const Param xi{1.0};
  const auto e = point_estimate(problem, 0.5, xi, 10000, Stream(11));
  const double exact = pde_exact(0.5, 1.0);
  const double tol = 4.0 * e.std_error() + std::sqrt(problem.dt) * 1.0;
  const double err = std::abs(e.value - exact);
  Result r{"fk-pointwise", err <= tol, {}, 0.0};
  r.detail = "estimate " + csv::format(e.value) + " exact " + csv::format(exact) + " |diff| " + detail::sci(err) +
             " <= " + detail::sci(tol) + " (se " + detail::sci(e.std_error()) + ")";
  return r;
}

/// |D| times the mean of 1e5 draws of Z_0 against the trapezoid value of
/// ||u||^2, for xi in {0.05, 0.5, 1}, within 4 standard errors plus
/// 2 sqrt(dt) sup|u| |D|.
inline Result z0_unbiased() {
  const auto problem = make_pde_problem(1e-3);
  const auto fine = make_equispaced_grid(problem.domain, 10001);
  const double width = problem.domain.width();
  Result r{"z0-unbiased", true, {}, 0.0};
  std::ostringstream os;
  for (double x : {0.05, 0.5, 1.0}) {
    const Param xi{x};
    const std::uint64_t N = 100000;
    const Stream root(21);
    std::vector<double> z(N);
    auto zero = [](double) { return 0.0; };
    for (std::uint64_t k = 0; k < N; ++k) z[k] = width * error_sample_Zn(problem, zero, xi, root.child(k));
    double mean = 0.0;
    double var = 0.0;
    prbm::detail::compensated_moments(z, mean, var);
    std::vector<double> u2(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) u2[i] = pde_exact(fine[i], x) * pde_exact(fine[i], x);
    const double norm2 = fine.integrate(u2);
    const double tol = 4.0 * std::sqrt(var / static_cast<double>(N)) + 2.0 * std::sqrt(problem.dt) * 1.0 * width;
    const bool ok = std::abs(mean - norm2) <= tol;
    r.passed = r.passed && ok;
    os << "xi=" << x << ": " << csv::format(mean) << " vs " << csv::format(norm2) << " tol " << detail::sci(tol)
       << (ok ? "" : " OUT") << "; ";
  }
  r.detail = os.str();
  return r;
}

/// PDE case: Feynman-Kac MC (K=1) selection, interpolation, exact snapshots
/// reach <= 1e-10; min-res on the same basis is >= 10x worse.
inline Result pde_end_to_end() {
  const auto run = run_preset(TestCase::pde, SelectorKind::mc, 1);
  const auto& p = run.problem;
  const auto params = validation_parameters(p.function->param_box(), run.config.validation_count,
                                            run.config.validation_seed);
  TrainingSet vs;
  vs.points = params;
  const Matrix values = truth_table(*p.function, vs, *p.grid);
  const auto interp = validate_basis(run.result.basis, ProjectionMethod::interp, params, values, &*p.pde);
  const auto minres = validate_basis(run.result.basis, ProjectionMethod::min_res, params, values, &*p.pde);
  const bool ok = run.final_mean() <= 1e-10 && minres.mean >= 10.0 * interp.mean;
  Result r{"pde-end-to-end", ok, {}, 0.0};
  r.detail = "n=" + std::to_string(run.dimension()) + (run.trace().early_stop ? " (early stop)" : "") +
             " interp mean " + detail::sci(interp.mean) + " (threshold 1e-10), min-res mean " +
             detail::sci(minres.mean) + " ratio " + detail::sci(minres.mean / interp.mean) + " (threshold 10)";
  return r;
}

/// TC1: pac-clt keeps max_xi m_n(xi) <= 1e3 in every iteration while
/// pac-bounded spends >= 10x more samples in total.
inline Result sampling_adaptivity() {
  const auto clt = run_preset(TestCase::tc1, SelectorKind::pac_clt);
  const auto bounded = run_preset(TestCase::tc1, SelectorKind::pac_bounded);
  std::uint64_t max_m = 0;
  for (const auto& s : summarize_counts(clt.trace())) max_m = std::max(max_m, s.max_m);
  const double ratio = static_cast<double>(bounded.trace().cumulative_samples()) /
                       static_cast<double>(clt.trace().cumulative_samples());
  Result r{"sampling-adaptivity", max_m <= 1000 && ratio >= 10.0, {}, 0.0};
  r.detail = "pac-clt max m " + std::to_string(max_m) + " (threshold 1000), totals bounded " +
             std::to_string(bounded.trace().cumulative_samples()) + " / clt " +
             std::to_string(clt.trace().cumulative_samples()) + " = " + csv::format(std::round(ratio * 10) / 10) +
             " (threshold 10)";
  return r;
}

struct Check {
  std::string name;
  std::function<Result()> run;
};

inline std::vector<Check> checks() {
  return {
      {"table1-exact-rows", table1_exact_rows}, {"tc1-error-decay", tc1_decay},
      {"tc2-error-decay", tc2_decay},           {"random-degradation", random_degradation},
      {"pac-property", pac_property},           {"weak-greedy-ratios", weak_greedy},
      {"fk-pointwise", fk_pointwise},           {"z0-unbiased", z0_unbiased},
      {"pde-end-to-end", pde_end_to_end},       {"sampling-adaptivity", sampling_adaptivity},
  };
}

/// Runs every check (or those whose name contains `filter`), printing one
/// line each. Exceptions count as failures.
inline std::vector<Result> run_all(std::ostream& os, const std::string& filter = "") {
  std::vector<Result> out;
  for (const auto& c : checks()) {
    if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {c.name, false, std::string("exception: ") + e.what(), 0.0};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    os << line(r) << std::endl;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace prbm::acceptance
