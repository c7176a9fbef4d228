#pragma once

// Deterministic and probabilistic greedy construction of reduced spaces, with
// the diagnostics used to check them (weak-greedy ratios, an n-width proxy).

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "prbm/bandit.hpp"
#include "prbm/diffusion_problem.hpp"
#include "prbm/errors.hpp"
#include "prbm/feynman_kac.hpp"
#include "prbm/param_space.hpp"
#include "prbm/random.hpp"
#include "prbm/surrogate.hpp"

namespace prbm {

// ---------------------------------------------------------------------------
// Error samplers

/// Random variable Z_{n-1}(xi) over a training set, indexed by training-set
/// position: E(sample(i)) = exact(i) = ||u(xi_i) - u_{n-1}(xi_i)||^2.
class ErrorSampler {
 public:
  virtual ~ErrorSampler() = default;
  [[nodiscard]] virtual std::size_t size() const = 0;
  virtual double sample(std::size_t i, Stream& stream) const = 0;
  [[nodiscard]] virtual std::optional<double> exact(std::size_t) const { return std::nullopt; }
  [[nodiscard]] virtual std::optional<Bounds> bounds(std::size_t) const { return std::nullopt; }
  /// Pointwise evaluations consumed by one exact(i).
  [[nodiscard]] virtual std::uint64_t exact_cost(std::size_t) const { return 0; }
};

/// Grid values of u(xi) for every training parameter, one column per xi.
inline Matrix truth_table(const ParametricFunction& f, const TrainingSet& ts, const SpatialGrid& grid) {
  Matrix u(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(ts.size()));
  for (std::size_t j = 0; j < ts.size(); ++j)
    for (std::size_t i = 0; i < grid.size(); ++i)
      u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f(grid[i], ts[j]);
  return u;
}

struct SamplerNeeds {
  bool exact = false;
  bool bounds = false;
};

namespace detail {

// Squared-error statistics of a projection against grid reference values.
struct GridErrorStats {
  double l2_squared = 0.0;
  double min_sq = 0.0;
  double max_sq = 0.0;
};

inline GridErrorStats grid_error_stats(const Projection& p, const Eigen::Ref<const Vector>& reference,
                                       const SpatialGrid& grid) {
  const Vector un = p.values_on_grid();
  GridErrorStats s;
  s.min_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = reference[static_cast<Eigen::Index>(i)] - un[static_cast<Eigen::Index>(i)];
    const double e2 = e * e;
    s.l2_squared += grid.weights()[i] * e2;
    s.min_sq = std::min(s.min_sq, e2);
    s.max_sq = std::max(s.max_sq, e2);
  }
  return s;
}

}  // namespace detail

/// Z = |D| |u(Y, xi) - u_n(Y, xi)|^2 with Y ~ U(D). Exact values and the
/// heuristic bounds |D| min/max over the grid of |u - u_n|^2 come from the
/// reference table when one is given.
class PointwiseErrorSampler final : public ErrorSampler {
 public:
  PointwiseErrorSampler(FunctionPtr function, const TrainingSet& training, std::shared_ptr<const SpatialGrid> grid,
                        std::vector<Projection> projections, const Matrix* reference, SamplerNeeds needs)
      : function_(std::move(function)), training_(&training), grid_(std::move(grid)), projections_(std::move(projections)) {
    if (projections_.size() != training.size()) throw std::invalid_argument("one projection per training parameter");
    if ((needs.exact || needs.bounds) && reference == nullptr)
      throw UnsupportedSelector("exact errors and bounds need reference grid values");
    if (needs.exact || needs.bounds) {
      stats_.reserve(training.size());
      for (std::size_t i = 0; i < training.size(); ++i)
        stats_.push_back(detail::grid_error_stats(projections_[i], reference->col(static_cast<Eigen::Index>(i)), *grid_));
    }
  }

  [[nodiscard]] std::size_t size() const override { return projections_.size(); }

  double sample(std::size_t i, Stream& stream) const override {
    const Interval d = grid_->domain();
    const double y = stream.uniform(d.lo, d.hi);
    Stream noise = stream.child(1);
    const double u = function_->eval(y, (*training_)[i], &noise);
    thread_local std::vector<double> scratch;
    scratch.resize(projections_[i].basis().size());
    const double e = u - projections_[i].value(y, scratch);
    return d.width() * e * e;
  }

  [[nodiscard]] std::optional<double> exact(std::size_t i) const override {
    if (stats_.empty()) return std::nullopt;
    return stats_[i].l2_squared;
  }

  [[nodiscard]] std::optional<Bounds> bounds(std::size_t i) const override {
    if (stats_.empty()) return std::nullopt;
    const double m = grid_->measure();
    return Bounds{m * stats_[i].min_sq, m * stats_[i].max_sq};
  }

  [[nodiscard]] std::uint64_t exact_cost(std::size_t) const override { return grid_->size(); }

 private:
  FunctionPtr function_;
  const TrainingSet* training_;
  std::shared_ptr<const SpatialGrid> grid_;
  std::vector<Projection> projections_;
  std::vector<detail::GridErrorStats> stats_;
};

/// Z = |D| F_n(Y, X) F_n(Y, X~) from two independent stopped paths.
class FeynmanKacErrorSampler final : public ErrorSampler {
 public:
  FeynmanKacErrorSampler(const DiffusionProblem& problem, const TrainingSet& training,
                         std::shared_ptr<const SpatialGrid> grid, std::vector<Projection> projections,
                         const Matrix* reference)
      : problem_(&problem), training_(&training), grid_(std::move(grid)), projections_(std::move(projections)) {
    if (projections_.size() != training.size()) throw std::invalid_argument("one projection per training parameter");
    if (reference != nullptr)
      for (std::size_t i = 0; i < training.size(); ++i)
        exact_.push_back(
            detail::grid_error_stats(projections_[i], reference->col(static_cast<Eigen::Index>(i)), *grid_).l2_squared);
  }

  [[nodiscard]] std::size_t size() const override { return projections_.size(); }

  double sample(std::size_t i, Stream& stream) const override {
    const Projection& p = projections_[i];
    std::vector<double> scratch(p.basis().size());
    auto un = [&](double x) { return p.value(x, scratch); };
    return problem_->domain.width() * error_sample_Zn(*problem_, un, (*training_)[i], stream);
  }

  [[nodiscard]] std::optional<double> exact(std::size_t i) const override {
    if (exact_.empty()) return std::nullopt;
    return exact_[i];
  }

 private:
  const DiffusionProblem* problem_;
  const TrainingSet* training_;
  std::shared_ptr<const SpatialGrid> grid_;
  std::vector<Projection> projections_;
  std::vector<double> exact_;
};

// ---------------------------------------------------------------------------
// Selectors

enum class SelectorKind { d_greedy, mc, pac_bounded, pac_clt, random };

inline const char* to_string(SelectorKind k) {
  switch (k) {
    case SelectorKind::d_greedy: return "d-greedy";
    case SelectorKind::mc: return "mc";
    case SelectorKind::pac_bounded: return "pac-bounded";
    case SelectorKind::pac_clt: return "pac-clt";
    case SelectorKind::random: return "random";
  }
  return "?";
}

struct SelectorConfig {
  SelectorKind kind = SelectorKind::d_greedy;
  std::uint64_t K = 1;
  double eps = 0.9;
  /// Total failure budget; iteration n uses lambda_n = lambda / n.
  double lambda = 0.1;
  double p = 2.0;
  std::uint64_t max_samples = 10'000'000;

  [[nodiscard]] bool is_pac() const { return kind == SelectorKind::pac_bounded || kind == SelectorKind::pac_clt; }
  [[nodiscard]] double lambda_at(std::size_t n) const { return lambda / static_cast<double>(n); }
  /// Level handed to the bandit at iteration n: lambda_n for the bounded
  /// model; the CLT intervals use the fixed level lambda.
  [[nodiscard]] double level_at(std::size_t n) const {
    return kind == SelectorKind::pac_clt ? lambda : lambda_at(n);
  }
};

struct Selection {
  std::size_t index = 0;
  std::uint64_t samples = 0;
  /// Indicator per training parameter: exact errors, empirical means or
  /// E-hat; NaN where not computed.
  std::vector<double> indicators;
  /// m_n(xi) per training parameter.
  std::vector<std::uint64_t> counts;
  std::uint64_t bandit_rounds = 0;
};

namespace detail {

template <class Values>
std::size_t argmax_first(const Values& v, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace detail

/// argmax of the exact indicator, smallest index on ties.
inline Selection select_deterministic(const ErrorSampler& sampler) {
  Selection s;
  s.indicators.resize(sampler.size());
  s.counts.assign(sampler.size(), 0);
  for (std::size_t i = 0; i < sampler.size(); ++i) {
    const auto e = sampler.exact(i);
    if (!e) throw UnsupportedSelector("deterministic selection needs exact error indicators");
    s.indicators[i] = *e;
    s.counts[i] = sampler.exact_cost(i);
    s.samples += s.counts[i];
  }
  s.index = detail::argmax_first(s.indicators, sampler.size());
  return s;
}

/// argmax of the K-sample empirical mean; draw k of parameter i uses
/// stream.child(i, k).
inline Selection select_mc(const ErrorSampler& sampler, std::uint64_t K, const Stream& stream) {
  if (K < 1) throw std::invalid_argument("MC selection needs K >= 1");
  Selection s;
  s.indicators.resize(sampler.size());
  s.counts.assign(sampler.size(), K);
  for (std::size_t i = 0; i < sampler.size(); ++i) {
    double sum = 0.0;
    for (std::uint64_t k = 0; k < K; ++k) {
      Stream draw = stream.child(i, k);
      sum += sampler.sample(i, draw);
    }
    s.indicators[i] = sum / static_cast<double>(K);
  }
  s.samples = K * sampler.size();
  s.index = detail::argmax_first(s.indicators, sampler.size());
  return s;
}

/// PAC maximum in relative precision via the adaptive bandit, with failure
/// probability lambda_n. Draw k of arm i uses stream.child(i, k).
inline Selection select_pac(const ErrorSampler& sampler, double eps, double lambda_n, std::uint64_t K,
                            ConfidenceKind kind, const Stream& stream, double p = 2.0,
                            std::uint64_t max_samples = 10'000'000, BanditOutcome* outcome = nullptr,
                            bool record_trace = false) {
  BanditOptions opt;
  opt.kind = kind;
  opt.eps = eps;
  opt.lambda = lambda_n;
  opt.p = p;
  opt.initial_samples = K;
  opt.max_samples = max_samples;
  opt.record_trace = record_trace;
  auto draw = [&](std::size_t arm, std::uint64_t k) {
    Stream s = stream.child(arm, k);
    return sampler.sample(arm, s);
  };
  auto bounds = [&](std::size_t arm) {
    const auto b = sampler.bounds(arm);
    if (!b) throw UnsupportedSelector("bounded PAC selection needs almost-sure bounds");
    return *b;
  };
  BanditOutcome out = kind == ConfidenceKind::bounded ? run_bandit(sampler.size(), draw, bounds, opt)
                                                      : run_bandit(sampler.size(), draw, opt);
  Selection s;
  s.index = out.selected;
  s.samples = out.total_samples;
  s.counts = out.counts();
  s.bandit_rounds = out.rounds;
  s.indicators.resize(sampler.size());
  for (std::size_t a = 0; a < sampler.size(); ++a) s.indicators[a] = estimate_hat(out.stats[a]);
  if (outcome != nullptr) *outcome = std::move(out);
  return s;
}

/// Uniform choice among the indices not yet used.
inline Selection select_random(std::size_t size, const std::vector<bool>& used, Stream& stream) {
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < size; ++i)
    if (!used[i]) free.push_back(i);
  if (free.empty()) throw std::invalid_argument("random selection: training set exhausted");
  Selection s;
  const auto pick = static_cast<std::size_t>(stream.uniform() * static_cast<double>(free.size()));
  s.index = free[std::min(pick, free.size() - 1)];
  s.counts.assign(size, 0);
  return s;
}

// ---------------------------------------------------------------------------
// Driver

enum class ErrorModel { pointwise, feynman_kac };
enum class SnapshotMode { exact, feynman_kac };

struct GreedyConfig {
  SelectorConfig selector;
  ProjectionMethod projector = ProjectionMethod::interp;
  std::size_t n_max = 20;
  ErrorModel error_model = ErrorModel::pointwise;
  SnapshotMode snapshots = SnapshotMode::exact;
  /// Paths per grid point for Feynman-Kac snapshots.
  std::uint64_t fk_paths = 500;
  std::size_t validation_count = 100;
  std::uint64_t seed = 1;
  std::uint64_t validation_seed = 2;
  double drop_tolerance = ReducedBasis::kDefaultDropTolerance;
  /// Keep per-parameter indicators and counts in the trace.
  bool record_indicators = true;
  /// Skip validation (used by sweeps that only need the selections).
  bool validate = true;
};

struct IterationRecord {
  std::size_t n = 0;
  std::size_t selected = 0;
  Param xi;
  std::uint64_t samples = 0;
  std::uint64_t cumulative_samples = 0;
  double lambda_n = 0.0;
  double lambda_sum = 0.0;
  std::uint64_t bandit_rounds = 0;
  std::vector<double> indicators;
  std::vector<std::uint64_t> counts;
  double validation_mean = std::numeric_limits<double>::quiet_NaN();
  double validation_max = std::numeric_limits<double>::quiet_NaN();
  /// Largest fraction of capped paths over the grid (Feynman-Kac snapshots).
  double snapshot_capped_fraction = 0.0;
};

struct GreedyTrace {
  std::vector<IterationRecord> iterations;
  bool early_stop = false;
  std::string stop_reason;
  /// Errors of the empty space V_0 on the validation set.
  double initial_validation_mean = std::numeric_limits<double>::quiet_NaN();
  double initial_validation_max = std::numeric_limits<double>::quiet_NaN();

  [[nodiscard]] std::uint64_t cumulative_samples() const {
    return iterations.empty() ? 0 : iterations.back().cumulative_samples;
  }
  [[nodiscard]] std::vector<std::size_t> selected() const {
    std::vector<std::size_t> s;
    for (const auto& it : iterations) s.push_back(it.selected);
    return s;
  }
};

struct GreedyResult {
  ReducedBasis basis;
  GreedyTrace trace;
};

/// Everything the driver needs about the family being reduced.
struct GreedyProblem {
  FunctionPtr function;
  /// Noise-free reference for validation and exact indicators; defaults to
  /// `function` when that is deterministic.
  FunctionPtr reference;
  TrainingSet training;
  std::shared_ptr<const SpatialGrid> grid;
  /// Needed for Feynman-Kac sampling/snapshots and min-res projections.
  std::optional<DiffusionProblem> pde;

  [[nodiscard]] const ParametricFunction* reference_function() const {
    if (reference) return reference.get();
    if (function && function->deterministic()) return function.get();
    return nullptr;
  }
};

namespace detail {

inline constexpr std::uint64_t kSelectionTag = 1;
inline constexpr std::uint64_t kSnapshotTag = 2;
inline constexpr std::uint64_t kEvaluationTag = 3;

}  // namespace detail

/// The validation parameters: uniform draws in the parameter box.
inline std::vector<Param> validation_parameters(Interval box, std::size_t count, std::uint64_t seed) {
  Stream s(seed);
  std::vector<Param> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back({s.uniform(box.lo, box.hi)});
  return out;
}

/// Mean and max over the validation set of the discrete L2 error of the
/// configured projection.
struct ValidationStats {
  double mean = 0.0;
  double max = 0.0;
  std::vector<double> errors;
};

inline ValidationStats validate_basis(const ReducedBasis& basis, ProjectionMethod method,
                                      const std::vector<Param>& params, const Matrix& reference_values,
                                      const DiffusionProblem* pde) {
  ValidationStats v;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Vector ref = reference_values.col(static_cast<Eigen::Index>(k));
    const Projection p = project(basis, method, ref, pde, &params[k]);
    v.errors.push_back(l2_error(p, ref, basis.grid()));
  }
  for (double e : v.errors) {
    v.mean += e;
    v.max = std::max(v.max, e);
  }
  v.mean /= static_cast<double>(params.size());
  return v;
}

/// Projections of u(xi) onto the current basis for every training parameter.
inline std::vector<Projection> project_training_set(const ReducedBasis& basis, ProjectionMethod method,
                                                    const GreedyProblem& problem, const Matrix* truth,
                                                    const Stream& eval_stream) {
  std::vector<Projection> out;
  out.reserve(problem.training.size());
  const auto& grid = basis.grid();
  for (std::size_t i = 0; i < problem.training.size(); ++i) {
    const Param& xi = problem.training[i];
    Vector target;
    if (truth != nullptr) {
      target = truth->col(static_cast<Eigen::Index>(i));
    } else if (method != ProjectionMethod::min_res) {
      // Noisy evaluations: only the points the projection reads.
      target = Vector::Zero(static_cast<Eigen::Index>(grid.size()));
      auto eval_at = [&](std::size_t g) {
        Stream s = eval_stream.child(i, g);
        target[static_cast<Eigen::Index>(g)] = problem.function->eval(grid[g], xi, &s);
      };
      if (method == ProjectionMethod::interp)
        for (std::size_t g : basis.magic_points()) eval_at(g);
      else
        for (std::size_t g = 0; g < grid.size(); ++g) eval_at(g);
    }
    if (method == ProjectionMethod::min_res) {
      if (!problem.pde) throw std::invalid_argument("min-res projection needs a diffusion problem");
      out.push_back(min_res_projection(basis, *problem.pde, xi, grid));
    } else {
      out.push_back(project(basis, method, target));
    }
  }
  return out;
}

/// Greedy loop: select xi_n, acquire u(xi_n) on the grid, extend the basis.
/// Stops after n_max snapshots or when a snapshot is numerically dependent.
inline GreedyResult run_greedy(const GreedyProblem& problem, const GreedyConfig& config) {
  if (config.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (!problem.function || !problem.grid) throw std::invalid_argument("greedy problem needs a function and a grid");
  if (problem.training.size() < 1) throw std::invalid_argument("empty training set");
  const bool needs_pde = config.error_model == ErrorModel::feynman_kac || config.snapshots == SnapshotMode::feynman_kac ||
                         config.projector == ProjectionMethod::min_res;
  if (needs_pde && !problem.pde) throw std::invalid_argument("configuration needs a diffusion problem");

  const ParametricFunction* ref = problem.reference_function();
  std::optional<Matrix> truth;
  if (ref != nullptr) truth = truth_table(*ref, problem.training, *problem.grid);
  const Matrix* truth_ptr = truth ? &*truth : nullptr;

  std::vector<Param> val_params;
  Matrix val_values;
  if (config.validate) {
    if (ref == nullptr) throw std::invalid_argument("validation needs a deterministic reference function");
    val_params = validation_parameters(problem.function->param_box(), config.validation_count, config.validation_seed);
    TrainingSet vs;
    vs.points = val_params;
    val_values = truth_table(*ref, vs, *problem.grid);
  }
  const DiffusionProblem* pde = problem.pde ? &*problem.pde : nullptr;

  const Stream root(config.seed);
  // Snapshots are evaluated off the grid through the reference when it is
  // exact, and interpolated linearly otherwise.
  FunctionPtr snapshot_source;
  if (config.snapshots == SnapshotMode::exact) {
    if (problem.reference)
      snapshot_source = problem.reference;
    else if (problem.function->deterministic())
      snapshot_source = problem.function;
  }
  ReducedBasis basis(problem.grid, snapshot_source, config.drop_tolerance);
  GreedyResult result{basis, {}};
  GreedyTrace& trace = result.trace;

  if (config.validate) {
    const auto v0 = validate_basis(basis, config.projector, val_params, val_values, pde);
    trace.initial_validation_mean = v0.mean;
    trace.initial_validation_max = v0.max;
  }

  std::vector<bool> used(problem.training.size(), false);
  std::uint64_t cumulative = 0;
  double lambda_sum = 0.0;
  const SelectorConfig& sel = config.selector;

  for (std::size_t n = 1; n <= config.n_max; ++n) {
    const Stream sel_stream = root.child(detail::kSelectionTag, n);
    Selection s;
    if (sel.kind == SelectorKind::random) {
      Stream rs = sel_stream;
      s = select_random(problem.training.size(), used, rs);
    } else {
      auto projections = project_training_set(basis, config.projector, problem, truth_ptr,
                                              root.child(detail::kEvaluationTag, n));
      std::unique_ptr<ErrorSampler> sampler;
      if (config.error_model == ErrorModel::pointwise) {
        SamplerNeeds needs{sel.kind == SelectorKind::d_greedy, sel.kind == SelectorKind::pac_bounded};
        sampler = std::make_unique<PointwiseErrorSampler>(problem.function, problem.training, problem.grid,
                                                          std::move(projections), truth_ptr, needs);
      } else {
        const Matrix* exact_ref = sel.kind == SelectorKind::d_greedy ? truth_ptr : nullptr;
        sampler = std::make_unique<FeynmanKacErrorSampler>(*problem.pde, problem.training, problem.grid,
                                                           std::move(projections), exact_ref);
      }
      switch (sel.kind) {
        case SelectorKind::d_greedy: s = select_deterministic(*sampler); break;
        case SelectorKind::mc: s = select_mc(*sampler, sel.K, sel_stream); break;
        case SelectorKind::pac_bounded:
        case SelectorKind::pac_clt: {
          const auto kind = sel.kind == SelectorKind::pac_bounded ? ConfidenceKind::bounded : ConfidenceKind::clt;
          s = select_pac(*sampler, sel.eps, sel.level_at(n), sel.K, kind, sel_stream, sel.p, sel.max_samples);
          break;
        }
        case SelectorKind::random: break;
      }
    }

    IterationRecord rec;
    rec.n = n;
    rec.selected = s.index;
    rec.xi = problem.training[s.index];
    rec.samples = s.samples;
    rec.bandit_rounds = s.bandit_rounds;
    if (sel.is_pac()) {
      rec.lambda_n = sel.lambda_at(n);
      lambda_sum += rec.lambda_n;
    }
    rec.lambda_sum = lambda_sum;
    if (config.record_indicators) {
      rec.indicators = std::move(s.indicators);
      rec.counts = std::move(s.counts);
    }

    // Snapshot.
    Vector snap;
    if (config.snapshots == SnapshotMode::exact) {
      if (truth_ptr == nullptr) throw std::invalid_argument("exact snapshots need a deterministic reference");
      snap = truth_ptr->col(static_cast<Eigen::Index>(s.index));
    } else {
      snap = snapshot_estimate_grid(*problem.pde, rec.xi, *problem.grid, config.fk_paths,
                                    root.child(detail::kSnapshotTag, n), &rec.snapshot_capped_fraction);
    }
    try {
      basis = basis.add_snapshot(std::move(snap), rec.xi);
    } catch (const DegenerateSnapshot& e) {
      trace.early_stop = true;
      trace.stop_reason = std::string("degenerate snapshot at n=") + std::to_string(n) + ": " + e.what();
      // The selection work was still spent.
      cumulative += rec.samples;
      break;
    }
    used[s.index] = true;
    cumulative += rec.samples;
    rec.cumulative_samples = cumulative;

    if (config.validate) {
      const auto v = validate_basis(basis, config.projector, val_params, val_values, pde);
      rec.validation_mean = v.mean;
      rec.validation_max = v.max;
    }
    trace.iterations.push_back(std::move(rec));
  }
  result.basis = basis;
  return result;
}

// ---------------------------------------------------------------------------
// Diagnostics

/// gamma_n = ||u(xi_n) - P u(xi_n)|| / max_xi ||u(xi) - P u(xi)||, with P the
/// orthogonal projection (trapezoid-weighted discrete L2) onto the span of
/// the first n-1 selected snapshots. Computed with Householder QR on the
/// weighted snapshot matrix.
inline std::vector<double> weak_greedy_ratios(const Matrix& truth, const SpatialGrid& grid,
                                              const std::vector<std::size_t>& selected) {
  const auto npts = truth.rows();
  Vector sw(npts);
  for (Eigen::Index i = 0; i < npts; ++i) sw[i] = std::sqrt(grid.weights()[static_cast<std::size_t>(i)]);
  const Matrix weighted = sw.asDiagonal() * truth;

  std::vector<double> gammas;
  for (std::size_t n = 1; n <= selected.size(); ++n) {
    Matrix residual = weighted;
    if (n > 1) {
      Matrix span(npts, static_cast<Eigen::Index>(n - 1));
      for (std::size_t j = 0; j + 1 < n; ++j)
        span.col(static_cast<Eigen::Index>(j)) = weighted.col(static_cast<Eigen::Index>(selected[j]));
      Eigen::HouseholderQR<Matrix> qr(span);
      const Matrix q = qr.householderQ() * Matrix::Identity(npts, static_cast<Eigen::Index>(n - 1));
      residual -= q * (q.transpose() * weighted);
    }
    const Vector norms = residual.colwise().norm().transpose();
    const double worst = norms.maxCoeff();
    const double chosen = norms[static_cast<Eigen::Index>(selected[n - 1])];
    gammas.push_back(worst > 0.0 ? chosen / worst : 1.0);
  }
  return gammas;
}

inline std::vector<double> weak_greedy_ratios(const ParametricFunction& f, const TrainingSet& training,
                                              const SpatialGrid& grid, const GreedyTrace& trace) {
  return weak_greedy_ratios(truth_table(f, training, grid), grid, trace.selected());
}

/// Discrete n-width proxy for n = 0..N: sqrt(sum_{k>n} sigma_k^2 / #xi),
/// with sigma_k the singular values of the snapshot matrix scaled by the
/// square roots of the trapezoid weights. It lower-bounds the worst-case
/// discrete L2 error of any n-dimensional space over the training set.
/// Singular values below max(rows, cols) * eps * sigma_1 count as zero.
inline std::vector<double> kolmogorov_proxy_curve(const Matrix& truth, const SpatialGrid& grid,
                                                  std::size_t max_entries = 20'000'000) {
  if (static_cast<std::size_t>(truth.size()) > max_entries)
    throw std::invalid_argument("n-width proxy: snapshot matrix exceeds the size cap");
  Vector sw(truth.rows());
  for (Eigen::Index i = 0; i < truth.rows(); ++i) sw[i] = std::sqrt(grid.weights()[static_cast<std::size_t>(i)]);
  const Matrix weighted = sw.asDiagonal() * truth;
  Eigen::BDCSVD<Matrix> svd(weighted);
  Vector sigma = svd.singularValues();
  const double cutoff = sigma.size() > 0 ? static_cast<double>(std::max(truth.rows(), truth.cols())) *
                                               std::numeric_limits<double>::epsilon() * sigma[0]
                                         : 0.0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k)
    if (sigma[k] <= cutoff) sigma[k] = 0.0;
  const auto r = static_cast<std::size_t>(sigma.size());
  std::vector<double> tail(r + 1, 0.0);
  for (std::size_t k = r; k-- > 0;) tail[k] = tail[k + 1] + sigma[static_cast<Eigen::Index>(k)] * sigma[static_cast<Eigen::Index>(k)];
  std::vector<double> out(r + 1);
  for (std::size_t n = 0; n <= r; ++n) out[n] = std::sqrt(tail[n] / static_cast<double>(truth.cols()));
  return out;
}

inline double kolmogorov_proxy(const ParametricFunction& f, const TrainingSet& training, const SpatialGrid& grid,
                               std::size_t n, std::size_t max_entries = 20'000'000) {
  if (training.size() * grid.size() > max_entries)
    throw std::invalid_argument("n-width proxy: snapshot matrix exceeds the size cap");
  const auto curve = kolmogorov_proxy_curve(truth_table(f, training, grid), grid, max_entries);
  return n < curve.size() ? curve[n] : 0.0;
}

}  // namespace prbm
