// Command-line front end: run, table1, bandit-demo, verify.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "prbm/acceptance.hpp"
#include "prbm/bandit.hpp"
#include "prbm/errors.hpp"
#include "prbm/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct RunFlags {
  std::string preset = "tc1";
  std::string config_file;
  std::string selector;
  std::string projector;
  std::uint64_t K = 1;
  std::size_t n_max = 0;
  double eps = 0.9;
  double lambda = 0.1;
  std::uint64_t seed = 1;
  std::string out;
  double dt = 1e-3;
  std::uint64_t mc_paths = 500;

  CLI::Option* o_selector = nullptr;
  CLI::Option* o_projector = nullptr;
  CLI::Option* o_K = nullptr;
  CLI::Option* o_n_max = nullptr;
  CLI::Option* o_eps = nullptr;
  CLI::Option* o_lambda = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_dt = nullptr;
  CLI::Option* o_paths = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--preset", preset, "Test case defaults")->check(CLI::IsMember({"tc1", "tc2", "pde"}));
    app->add_option("--config", config_file, "INI configuration file applied after --preset")->check(CLI::ExistingFile);
    o_selector = app->add_option("--selector", selector, "d-greedy, mc, pac-bounded, pac-clt or random");
    o_projector = app->add_option("--projector", projector, "interp, least-squares or min-res");
    o_K = app->add_option("--K", K, "Initial samples per parameter (MC and PAC selectors)");
    o_n_max = app->add_option("--n-max", n_max, "Reduced space dimension");
    o_eps = app->add_option("--eps", eps, "Relative precision of the PAC maximum");
    o_lambda = app->add_option("--lambda", lambda, "Failure probability budget");
    o_seed = app->add_option("--seed", seed, "Master seed");
    o_out = app->add_option("--out", out, "Output directory for CSV files");
    o_dt = app->add_option("--dt", dt, "Euler-Maruyama time step (pde)");
    o_paths = app->add_option("--mc-paths", mc_paths, "Paths per point for Feynman-Kac snapshots (pde)");
  }

  [[nodiscard]] prbm::ExperimentConfig resolve() const {
    prbm::ExperimentConfig c = prbm::preset(prbm::parse::test_case(preset, "--preset"));
    if (!config_file.empty()) {
      std::ifstream is(config_file);
      c = prbm::load_config(is, c);
    }
    if (o_selector->count()) c.selector.kind = prbm::parse::selector(selector, "--selector");
    if (o_projector->count()) c.projector = prbm::parse::projector(projector, "--projector");
    if (o_K->count()) c.selector.K = K;
    if (o_n_max->count()) c.n_max = n_max;
    if (o_eps->count()) c.selector.eps = eps;
    if (o_lambda->count()) c.selector.lambda = lambda;
    if (o_seed->count()) c.seed = seed;
    if (o_out->count()) c.out_dir = out;
    if (o_dt->count()) c.fk.dt = dt;
    if (o_paths->count()) c.fk.paths = mc_paths;
    c.validate();
    return c;
  }
};

void print_run(const prbm::RunReport& r) {
  std::printf("%-5s %-8s %-12s %-12s %-14s %-12s %-12s\n", "n", "index", "xi", "samples", "cumulative", "mean_err",
              "max_err");
  std::printf("%-5d %-8s %-12s %-12s %-14s %-12.4e %-12.4e\n", 0, "-", "-", "-", "-",
              r.trace().initial_validation_mean, r.trace().initial_validation_max);
  for (const auto& it : r.trace().iterations)
    std::printf("%-5zu %-8zu %-12.6g %-12llu %-14llu %-12.4e %-12.4e\n", it.n, it.selected, it.xi.at(0),
                static_cast<unsigned long long>(it.samples), static_cast<unsigned long long>(it.cumulative_samples),
                it.validation_mean, it.validation_max);
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("wall time %.3f s\n", r.wall_seconds);
  if (!r.config.out_dir.empty()) std::printf("wrote %s\n", r.config.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic reduced basis experiments"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run one greedy experiment");
  run_flags.attach(run);

  RunFlags demo_flags;
  demo_flags.selector = "pac-clt";
  auto* demo = app.add_subcommand("bandit-demo", "PAC selection with per-parameter sample counts");
  demo_flags.attach(demo);

  std::uint64_t table_seed = 1;
  std::string table_out;
  bool no_cross_check = false;
  bool no_pac = false;
  auto* table = app.add_subcommand("table1", "Cumulative sample counts for TC1 and TC2");
  table->add_option("--seed", table_seed, "Master seed of the runs");
  table->add_option("--out", table_out, "Output directory for table1.csv");
  table->add_flag("--no-cross-check", no_cross_check, "Skip the full runs behind the exact rows");
  table->add_flag("--no-pac", no_pac, "Skip the PAC rows");

  std::string filter;
  auto* verify = app.add_subcommand("verify", "Run the acceptance checks");
  verify->add_option("filter", filter, "Only checks whose name contains this text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      print_run(prbm::run_experiment(run_flags.resolve()));
    } else if (*demo) {
      prbm::ExperimentConfig c = demo_flags.resolve();
      if (!demo_flags.o_selector->count()) c.selector.kind = prbm::SelectorKind::pac_clt;
      c.validate();
      const auto r = prbm::bandit_demo(c);
      print_run(r.run);
      std::printf("\n%-5s %-8s %-10s %-10s %s\n", "n", "max_m", "median_m", "total", "concentrated");
      for (const auto& s : r.iterations)
        std::printf("%-5zu %-8llu %-10g %-10llu %d\n", s.n, static_cast<unsigned long long>(s.max_m), s.median_m,
                    static_cast<unsigned long long>(s.total), s.concentrated() ? 1 : 0);
      std::printf("max m >= 2 median m in %zu of %zu iterations: %s\n", r.concentrated_count(), r.iterations.size(),
                  r.concentration_holds() ? "holds" : "does not hold");
    } else if (*table) {
      const auto rows = prbm::sample_complexity_table({!no_cross_check, !no_pac, table_seed});
      prbm::write_table1_csv(std::cout, rows);
      bool ok = true;
      for (const auto& r : rows) ok = ok && r.consistent();
      if (!table_out.empty()) {
        auto os = prbm::csv::open_for_write(std::filesystem::path(table_out) / "table1.csv");
        prbm::write_table1_csv(os, rows);
      }
      if (!ok) {
        std::fprintf(stderr, "error: a full run disagrees with its sample accounting\n");
        return kExitNumerical;
      }
    } else if (*verify) {
      const auto results = prbm::acceptance::run_all(std::cout, filter);
      int failed = 0;
      for (const auto& r : results) failed += r.passed ? 0 : 1;
      std::printf("%zu/%zu acceptance criteria passed\n", results.size() - failed, results.size());
      return failed == 0 ? 0 : 1;
    }
  } catch (const prbm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const prbm::UnsupportedSelector& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const prbm::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
