#pragma once

// Experiment configuration, presets for the three test cases, orchestration
// and CSV output.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "prbm/csv.hpp"
#include "prbm/diffusion_problem.hpp"
#include "prbm/errors.hpp"
#include "prbm/greedy.hpp"
#include "prbm/param_space.hpp"
#include "prbm/surrogate.hpp"

namespace prbm {

enum class TestCase { tc1, tc2, pde };

inline const char* to_string(TestCase t) {
  switch (t) {
    case TestCase::tc1: return "tc1";
    case TestCase::tc2: return "tc2";
    case TestCase::pde: return "pde";
  }
  return "?";
}

inline const char* to_string(ErrorModel m) { return m == ErrorModel::pointwise ? "pointwise" : "feynman-kac"; }
inline const char* to_string(SnapshotMode m) { return m == SnapshotMode::exact ? "exact" : "feynman-kac"; }
inline const char* to_string(Generation g) { return g == Generation::equispaced ? "equispaced" : "loguniform"; }

namespace parse {

inline TestCase test_case(const std::string& s, const std::string& field = "preset") {
  if (s == "tc1") return TestCase::tc1;
  if (s == "tc2") return TestCase::tc2;
  if (s == "pde") return TestCase::pde;
  throw ConfigError(field, "unknown test case '" + s + "' (expected tc1, tc2 or pde)");
}

inline SelectorKind selector(const std::string& s, const std::string& field = "selector") {
  for (auto k : {SelectorKind::d_greedy, SelectorKind::mc, SelectorKind::pac_bounded, SelectorKind::pac_clt,
                 SelectorKind::random})
    if (s == to_string(k)) return k;
  throw ConfigError(field, "unknown selector '" + s + "' (expected d-greedy, mc, pac-bounded, pac-clt or random)");
}

inline ProjectionMethod projector(const std::string& s, const std::string& field = "projector") {
  for (auto k : {ProjectionMethod::interp, ProjectionMethod::least_squares, ProjectionMethod::min_res})
    if (s == to_string(k)) return k;
  throw ConfigError(field, "unknown projector '" + s + "' (expected interp, least-squares or min-res)");
}

inline ErrorModel error_model(const std::string& s, const std::string& field = "error_model") {
  if (s == "pointwise") return ErrorModel::pointwise;
  if (s == "feynman-kac") return ErrorModel::feynman_kac;
  throw ConfigError(field, "unknown error model '" + s + "' (expected pointwise or feynman-kac)");
}

inline SnapshotMode snapshot_mode(const std::string& s, const std::string& field = "snapshots") {
  if (s == "exact") return SnapshotMode::exact;
  if (s == "feynman-kac") return SnapshotMode::feynman_kac;
  throw ConfigError(field, "unknown snapshot mode '" + s + "' (expected exact or feynman-kac)");
}

inline Generation generation(const std::string& s, const std::string& field = "training.generation") {
  if (s == "equispaced") return Generation::equispaced;
  if (s == "loguniform") return Generation::loguniform;
  throw ConfigError(field, "unknown generation '" + s + "' (expected equispaced or loguniform)");
}

}  // namespace parse

struct TrainingSpec {
  std::size_t count = 300;
  Generation generation = Generation::equispaced;
  std::uint64_t seed = 7;
};

struct FeynmanKacSpec {
  double dt = 1e-3;
  std::uint64_t paths = 500;
  /// 0 selects the default cap of the problem.
  double t_max = 0.0;
};

struct ExperimentConfig {
  TestCase test_case = TestCase::tc1;
  SelectorConfig selector;
  ProjectionMethod projector = ProjectionMethod::interp;
  std::size_t n_max = 20;
  TrainingSpec training;
  std::size_t grid_points = 10000;
  FeynmanKacSpec fk;
  ErrorModel error_model = ErrorModel::pointwise;
  SnapshotMode snapshots = SnapshotMode::exact;
  std::uint64_t seed = 1;
  std::uint64_t validation_seed = 2;
  std::size_t validation_count = 100;
  std::string out_dir;

  /// Throws ConfigError naming the offending field.
  void validate() const {
    if (n_max < 1) throw ConfigError("n_max", "must be >= 1");
    if (training.count < 2) throw ConfigError("training.count", "must be >= 2");
    if (n_max > training.count) throw ConfigError("n_max", "exceeds the training set size");
    if (grid_points < 3) throw ConfigError("grid.count", "must be >= 3");
    if (validation_count < 1) throw ConfigError("validation_count", "must be >= 1");
    if (selector.K < 1) throw ConfigError("selector.K", "must be >= 1");
    if (!(selector.eps > 0.0 && selector.eps < 1.0)) throw ConfigError("selector.eps", "must lie in (0, 1)");
    if (!(selector.lambda > 0.0 && selector.lambda < 1.0)) throw ConfigError("selector.lambda", "must lie in (0, 1)");
    if (!(selector.p > 1.0)) throw ConfigError("selector.p", "must exceed 1");
    if (selector.max_samples < 1) throw ConfigError("selector.max_samples", "must be >= 1");
    if (!(fk.dt > 0.0)) throw ConfigError("feynman_kac.dt", "must be positive");
    if (fk.paths < 1) throw ConfigError("feynman_kac.paths", "must be >= 1");
    if (fk.t_max < 0.0) throw ConfigError("feynman_kac.t_max", "must be nonnegative");
    const bool pde = test_case == TestCase::pde;
    if (!pde && error_model == ErrorModel::feynman_kac)
      throw ConfigError("feynman_kac.error_model", "the Feynman-Kac error model needs the pde test case");
    if (!pde && snapshots == SnapshotMode::feynman_kac)
      throw ConfigError("feynman_kac.snapshots", "Feynman-Kac snapshots need the pde test case");
    if (!pde && projector == ProjectionMethod::min_res)
      throw ConfigError("projector", "min-res needs the pde test case");
    if (selector.kind == SelectorKind::pac_bounded && error_model == ErrorModel::feynman_kac)
      throw ConfigError("selector", "pac-bounded needs almost-sure bounds, which the Feynman-Kac sampler lacks");
    if (training.generation == Generation::loguniform && test_case == TestCase::tc2)
      throw ConfigError("training.generation", "log-uniform sampling needs a positive parameter range");
  }
};

/// Default settings of each test case.
inline ExperimentConfig preset(TestCase t) {
  ExperimentConfig c;
  c.test_case = t;
  switch (t) {
    case TestCase::tc1:
      c.n_max = 20;
      c.training = {300, Generation::equispaced, 7};
      c.grid_points = 10000;
      break;
    case TestCase::tc2:
      c.n_max = 30;
      c.training = {300, Generation::equispaced, 7};
      c.grid_points = 1000;
      break;
    case TestCase::pde:
      c.n_max = 30;
      c.training = {200, Generation::loguniform, 7};
      c.grid_points = 100;
      c.selector.kind = SelectorKind::mc;
      c.error_model = ErrorModel::feynman_kac;
      break;
  }
  return c;
}

namespace detail {

template <class T>
T ini_value(const boost::property_tree::ptree& node, const std::string& field) {
  try {
    return node.get_value<T>();
  } catch (const boost::property_tree::ptree_error&) {
    throw ConfigError(field, "cannot parse '" + node.data() + "'");
  }
}

}  // namespace detail

/// Applies a flat INI file with sections on top of a configuration. The
/// `experiment.preset` key, when present, resets to that preset first.
///
///   [experiment] preset n_max seed validation_seed validation_count out
///   [selector] kind K eps lambda p max_samples
///   [projection] kind
///   [training] count generation seed
///   [grid] count
///   [feynman_kac] dt paths t_max error_model snapshots
inline void apply_ini(ExperimentConfig& c, const boost::property_tree::ptree& tree) {
  using boost::property_tree::ptree;
  if (auto p = tree.get_optional<std::string>("experiment.preset")) c = preset(parse::test_case(*p, "experiment.preset"));
  static const std::map<std::string, std::set<std::string>> known = {
      {"experiment", {"preset", "n_max", "seed", "validation_seed", "validation_count", "out"}},
      {"selector", {"kind", "K", "eps", "lambda", "p", "max_samples"}},
      {"projection", {"kind"}},
      {"training", {"count", "generation", "seed"}},
      {"grid", {"count"}},
      {"feynman_kac", {"dt", "paths", "t_max", "error_model", "snapshots"}},
  };
  for (const auto& [section, body] : tree) {
    auto it = known.find(section);
    if (it == known.end()) throw ConfigError(section, "unknown section");
    for (const auto& [key, node] : body) {
      const std::string f = section + "." + key;
      if (!it->second.count(key)) throw ConfigError(f, "unknown key");
      const std::string s = node.data();
      if (section == "experiment") {
        if (key == "n_max") c.n_max = detail::ini_value<std::size_t>(node, f);
        if (key == "seed") c.seed = detail::ini_value<std::uint64_t>(node, f);
        if (key == "validation_seed") c.validation_seed = detail::ini_value<std::uint64_t>(node, f);
        if (key == "validation_count") c.validation_count = detail::ini_value<std::size_t>(node, f);
        if (key == "out") c.out_dir = s;
      } else if (section == "selector") {
        if (key == "kind") c.selector.kind = parse::selector(s, f);
        if (key == "K") c.selector.K = detail::ini_value<std::uint64_t>(node, f);
        if (key == "eps") c.selector.eps = detail::ini_value<double>(node, f);
        if (key == "lambda") c.selector.lambda = detail::ini_value<double>(node, f);
        if (key == "p") c.selector.p = detail::ini_value<double>(node, f);
        if (key == "max_samples") c.selector.max_samples = detail::ini_value<std::uint64_t>(node, f);
      } else if (section == "projection") {
        c.projector = parse::projector(s, f);
      } else if (section == "training") {
        if (key == "count") c.training.count = detail::ini_value<std::size_t>(node, f);
        if (key == "generation") c.training.generation = parse::generation(s, f);
        if (key == "seed") c.training.seed = detail::ini_value<std::uint64_t>(node, f);
      } else if (section == "grid") {
        c.grid_points = detail::ini_value<std::size_t>(node, f);
      } else if (section == "feynman_kac") {
        if (key == "dt") c.fk.dt = detail::ini_value<double>(node, f);
        if (key == "paths") c.fk.paths = detail::ini_value<std::uint64_t>(node, f);
        if (key == "t_max") c.fk.t_max = detail::ini_value<double>(node, f);
        if (key == "error_model") c.error_model = parse::error_model(s, f);
        if (key == "snapshots") c.snapshots = parse::snapshot_mode(s, f);
      }
    }
  }
}

inline ExperimentConfig load_config(std::istream& is, ExperimentConfig base = {}) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " at line " + std::to_string(e.line()));
  }
  apply_ini(base, tree);
  return base;
}

/// The resolved configuration in the format read by load_config.
inline void write_config(std::ostream& os, const ExperimentConfig& c) {
  os << "[experiment]\npreset = " << to_string(c.test_case) << "\nn_max = " << c.n_max << "\nseed = " << c.seed
     << "\nvalidation_seed = " << c.validation_seed << "\nvalidation_count = " << c.validation_count << "\n\n";
  os << "[selector]\nkind = " << to_string(c.selector.kind) << "\nK = " << c.selector.K
     << "\neps = " << csv::format(c.selector.eps) << "\nlambda = " << csv::format(c.selector.lambda)
     << "\np = " << csv::format(c.selector.p) << "\nmax_samples = " << c.selector.max_samples << "\n\n";
  os << "[projection]\nkind = " << to_string(c.projector) << "\n\n";
  os << "[training]\ncount = " << c.training.count << "\ngeneration = " << to_string(c.training.generation)
     << "\nseed = " << c.training.seed << "\n\n";
  os << "[grid]\ncount = " << c.grid_points << "\n\n";
  os << "[feynman_kac]\ndt = " << csv::format(c.fk.dt) << "\npaths = " << c.fk.paths
     << "\nt_max = " << csv::format(c.fk.t_max) << "\nerror_model = " << to_string(c.error_model)
     << "\nsnapshots = " << to_string(c.snapshots) << "\n";
}

inline FunctionPtr make_function(TestCase t) {
  switch (t) {
    case TestCase::tc1: return make_tc1();
    case TestCase::tc2: return make_tc2();
    case TestCase::pde: return make_pde_exact();
  }
  return nullptr;
}

inline GreedyProblem make_problem(const ExperimentConfig& c) {
  GreedyProblem p;
  p.function = make_function(c.test_case);
  const Interval box = p.function->param_box();
  p.training = c.training.generation == Generation::equispaced
                   ? make_equispaced_training_set(box, c.training.count)
                   : make_loguniform_training_set(box, c.training.count, c.training.seed);
  p.grid = std::make_shared<SpatialGrid>(make_equispaced_grid(p.function->domain(), c.grid_points));
  if (c.test_case == TestCase::pde) p.pde = make_pde_problem(c.fk.dt, c.fk.t_max);
  return p;
}

inline GreedyConfig greedy_config(const ExperimentConfig& c) {
  GreedyConfig g;
  g.selector = c.selector;
  g.projector = c.projector;
  g.n_max = c.n_max;
  g.error_model = c.error_model;
  g.snapshots = c.snapshots;
  g.fk_paths = c.fk.paths;
  g.validation_count = c.validation_count;
  g.seed = c.seed;
  g.validation_seed = c.validation_seed;
  return g;
}

struct RunReport {
  ExperimentConfig config;
  GreedyProblem problem;
  GreedyResult result;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;

  [[nodiscard]] const GreedyTrace& trace() const { return result.trace; }
  [[nodiscard]] std::size_t dimension() const { return result.basis.size(); }
  [[nodiscard]] double final_mean() const {
    return trace().iterations.empty() ? trace().initial_validation_mean : trace().iterations.back().validation_mean;
  }
  [[nodiscard]] double final_max() const {
    return trace().iterations.empty() ? trace().initial_validation_max : trace().iterations.back().validation_max;
  }
};

/// Fraction of capped trajectories above which a run carries a warning.
inline constexpr double kCappedWarningFraction = 1e-3;

/// run.csv:
///   iteration,selected_index,xi,samples,cumulative_samples,lambda_n,lambda_sum,
///   bandit_rounds,validation_mean,validation_max
/// Iteration 0 carries the errors of the empty space.
inline void write_run_csv(std::ostream& os, const GreedyTrace& t) {
  csv::row(os, "iteration", "selected_index", "xi", "samples", "cumulative_samples", "lambda_n", "lambda_sum",
           "bandit_rounds", "validation_mean", "validation_max");
  csv::row(os, 0, "", "", 0, 0, "", "", 0, t.initial_validation_mean, t.initial_validation_max);
  for (const auto& it : t.iterations)
    csv::row(os, it.n, it.selected, it.xi.at(0), it.samples, it.cumulative_samples, it.lambda_n, it.lambda_sum,
             it.bandit_rounds, it.validation_mean, it.validation_max);
}

/// samples.csv (long form of the per-iteration m_n(xi) matrices):
///   iteration,xi_index,xi,indicator,m
inline void write_samples_csv(std::ostream& os, const GreedyTrace& t, const TrainingSet& training) {
  csv::row(os, "iteration", "xi_index", "xi", "indicator", "m");
  for (const auto& it : t.iterations) {
    if (it.counts.empty()) continue;
    for (std::size_t i = 0; i < training.size(); ++i) {
      const double ind = i < it.indicators.size() ? it.indicators[i] : std::numeric_limits<double>::quiet_NaN();
      csv::row(os, it.n, i, training[i].at(0), ind, it.counts[i]);
    }
  }
}

/// summary.csv: key,value
inline void write_summary_csv(std::ostream& os, const RunReport& r) {
  const auto& t = r.trace();
  csv::row(os, "key", "value");
  csv::row(os, "test_case", to_string(r.config.test_case));
  csv::row(os, "selector", to_string(r.config.selector.kind));
  csv::row(os, "projector", to_string(r.config.projector));
  csv::row(os, "n_max", r.config.n_max);
  csv::row(os, "dimension", r.dimension());
  csv::row(os, "early_stop", t.early_stop);
  csv::row(os, "stop_reason", t.stop_reason);
  csv::row(os, "cumulative_samples", t.cumulative_samples());
  csv::row(os, "final_validation_mean", r.final_mean());
  csv::row(os, "final_validation_max", r.final_max());
}

/// Writes config.ini, run.csv, samples.csv, summary.csv, training_set.csv,
/// grid.csv, snapshots.csv and basis.csv into dir.
inline void write_report(const RunReport& r, const std::filesystem::path& dir) {
  {
    auto os = csv::open_for_write(dir / "config.ini");
    write_config(os, r.config);
  }
  {
    auto os = csv::open_for_write(dir / "run.csv");
    write_run_csv(os, r.trace());
  }
  {
    auto os = csv::open_for_write(dir / "samples.csv");
    write_samples_csv(os, r.trace(), r.problem.training);
  }
  {
    auto os = csv::open_for_write(dir / "summary.csv");
    write_summary_csv(os, r);
  }
  {
    auto os = csv::open_for_write(dir / "training_set.csv");
    write_csv(os, r.problem.training);
  }
  {
    auto os = csv::open_for_write(dir / "grid.csv");
    write_csv(os, *r.problem.grid);
  }
  auto snaps = csv::open_for_write(dir / "snapshots.csv");
  auto basis = csv::open_for_write(dir / "basis.csv");
  export_basis(r.result.basis, snaps, basis);
}

/// Builds the problem, runs the greedy loop and, when out_dir is set, writes
/// the CSVs.
inline RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  GreedyProblem problem = make_problem(config);
  const auto t0 = std::chrono::steady_clock::now();
  GreedyResult result = run_greedy(problem, greedy_config(config));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RunReport r{config, std::move(problem), std::move(result), wall, {}};
  for (const auto& it : r.trace().iterations)
    if (it.snapshot_capped_fraction > kCappedWarningFraction)
      r.warnings.push_back("iteration " + std::to_string(it.n) + ": " + csv::format(it.snapshot_capped_fraction) +
                           " of the snapshot paths hit the time cap");
  if (r.trace().early_stop) r.warnings.push_back(r.trace().stop_reason);
  if (!config.out_dir.empty()) write_report(r, config.out_dir);
  return r;
}

// ---------------------------------------------------------------------------
// Sample-complexity table

/// Samples (or pointwise evaluations for d-greedy) spent to build a space of
/// dimension n, for the selectors whose cost does not depend on the draws.
inline std::uint64_t accounted_samples(SelectorKind kind, std::uint64_t K, std::size_t n, std::size_t training,
                                       std::size_t grid) {
  switch (kind) {
    case SelectorKind::d_greedy: return static_cast<std::uint64_t>(n) * training * grid;
    case SelectorKind::mc: return K * training * n;
    case SelectorKind::random: return 0;
    default: throw std::invalid_argument("the cost of PAC selectors is only known after a run");
  }
}

struct Table1Row {
  std::string method;
  SelectorKind kind = SelectorKind::d_greedy;
  std::uint64_t K = 1;
  /// Accounting value (exact rows) or the measured total (PAC rows).
  std::uint64_t tc1 = 0;
  std::uint64_t tc2 = 0;
  bool exact = true;
  /// Totals of full runs, when they were made.
  std::optional<std::uint64_t> tc1_run;
  std::optional<std::uint64_t> tc2_run;
  /// Reference totals, for comparison.
  double tc1_reference = 0.0;
  double tc2_reference = 0.0;

  [[nodiscard]] bool consistent() const {
    if (!exact) return true;
    return (!tc1_run || *tc1_run == tc1) && (!tc2_run || *tc2_run == tc2);
  }
};

struct Table1Options {
  /// Run each exact row once per test case and compare totals.
  bool cross_check = true;
  /// Run the PAC rows (seed-dependent totals).
  bool measure_pac = true;
  std::uint64_t seed = 1;
};

inline std::vector<Table1Row> sample_complexity_table(const Table1Options& opt = {}) {
  std::vector<Table1Row> rows = {
      {"D-Greedy", SelectorKind::d_greedy, 1, 0, 0, true, {}, {}, 6e7, 9e6},
      {"MC-Greedy K=1", SelectorKind::mc, 1, 0, 0, true, {}, {}, 6e3, 9e3},
      {"MC-Greedy K=50", SelectorKind::mc, 50, 0, 0, true, {}, {}, 3e5, 4.5e5},
      {"PAC-Greedy (Bounded)", SelectorKind::pac_bounded, 1, 0, 0, false, {}, {}, 1.284326e7, 5.764507e7},
      {"PAC-Greedy (CLT)", SelectorKind::pac_clt, 1, 0, 0, false, {}, {}, 7.507800e4, 2.333380e5},
  };
  auto total = [&](TestCase t, const Table1Row& row) {
    ExperimentConfig c = preset(t);
    c.selector.kind = row.kind;
    c.selector.K = row.K;
    c.seed = opt.seed;
    c.validate();
    GreedyProblem p = make_problem(c);
    GreedyConfig g = greedy_config(c);
    g.validate = false;
    g.record_indicators = false;
    return run_greedy(p, g).trace.cumulative_samples();
  };
  for (auto& row : rows) {
    if (row.exact) {
      const auto a = preset(TestCase::tc1);
      const auto b = preset(TestCase::tc2);
      row.tc1 = accounted_samples(row.kind, row.K, a.n_max, a.training.count, a.grid_points);
      row.tc2 = accounted_samples(row.kind, row.K, b.n_max, b.training.count, b.grid_points);
      if (opt.cross_check) {
        row.tc1_run = total(TestCase::tc1, row);
        row.tc2_run = total(TestCase::tc2, row);
      }
    } else if (opt.measure_pac) {
      row.tc1 = total(TestCase::tc1, row);
      row.tc2 = total(TestCase::tc2, row);
      row.tc1_run = row.tc1;
      row.tc2_run = row.tc2;
    }
  }
  if (!opt.measure_pac)
    rows.erase(std::remove_if(rows.begin(), rows.end(), [](const Table1Row& r) { return !r.exact; }), rows.end());
  return rows;
}

/// table1.csv: method,kind,tc1,tc2,tc1_run,tc2_run,tc1_reference,tc2_reference
/// kind is "exact" for accounting rows and "measured" for PAC rows.
inline void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows) {
  csv::row(os, "method", "kind", "tc1", "tc2", "tc1_run", "tc2_run", "tc1_reference", "tc2_reference");
  for (const auto& r : rows) {
    auto opt = [](const std::optional<std::uint64_t>& v) { return v ? csv::format(*v) : std::string(); };
    csv::row(os, r.method, r.exact ? "exact" : "measured", r.tc1, r.tc2, opt(r.tc1_run), opt(r.tc2_run),
             r.tc1_reference, r.tc2_reference);
  }
}

// ---------------------------------------------------------------------------
// Bandit sampling demo

struct BanditIterationSummary {
  std::size_t n = 0;
  std::uint64_t max_m = 0;
  double median_m = 0.0;
  std::uint64_t total = 0;
  [[nodiscard]] bool concentrated() const { return static_cast<double>(max_m) >= 2.0 * median_m; }
};

struct BanditDemoReport {
  RunReport run;
  std::vector<BanditIterationSummary> iterations;

  [[nodiscard]] std::size_t concentrated_count() const {
    return static_cast<std::size_t>(
        std::count_if(iterations.begin(), iterations.end(), [](const auto& s) { return s.concentrated(); }));
  }
  /// max m_n >= 2 median m_n in at least half of the iterations.
  [[nodiscard]] bool concentration_holds() const { return 2 * concentrated_count() >= iterations.size(); }
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline std::vector<BanditIterationSummary> summarize_counts(const GreedyTrace& t) {
  std::vector<BanditIterationSummary> out;
  for (const auto& it : t.iterations) {
    BanditIterationSummary s;
    s.n = it.n;
    std::vector<double> m;
    for (auto c : it.counts) {
      s.max_m = std::max(s.max_m, c);
      s.total += c;
      m.push_back(static_cast<double>(c));
    }
    s.median_m = median(std::move(m));
    out.push_back(s);
  }
  return out;
}

/// bandit_summary.csv: iteration,max_m,median_m,total,concentrated
inline void write_bandit_summary_csv(std::ostream& os, const BanditDemoReport& r) {
  csv::row(os, "iteration", "max_m", "median_m", "total", "concentrated");
  for (const auto& s : r.iterations) csv::row(os, s.n, s.max_m, s.median_m, s.total, s.concentrated());
}

/// Runs a PAC-selector experiment and summarizes where the samples went.
/// Writes the run files plus bandit_summary.csv when out_dir is set.
inline BanditDemoReport bandit_demo(const ExperimentConfig& config) {
  if (!config.selector.is_pac()) throw ConfigError("selector", "bandit-demo needs pac-bounded or pac-clt");
  BanditDemoReport r{run_experiment(config), {}};
  r.iterations = summarize_counts(r.run.trace());
  if (!config.out_dir.empty()) {
    auto os = csv::open_for_write(std::filesystem::path(config.out_dir) / "bandit_summary.csv");
    write_bandit_summary_csv(os, r);
  }
  return r;
}

}  // namespace prbm
