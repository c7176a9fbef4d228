#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>
#include <vector>

#include "prbm/greedy.hpp"

using namespace prbm;

namespace {

std::shared_ptr<const SpatialGrid> grid(std::size_t n, Interval d = {0.0, 1.0}) {
  return std::make_shared<SpatialGrid>(make_equispaced_grid(d, n));
}

// Z_i = mean_i + noise_i * (2U - 1): mean mean_i, support [mean - noise, mean + noise].
class FakeSampler final : public ErrorSampler {
 public:
  FakeSampler(std::vector<double> mean, std::vector<double> noise, bool with_exact = true, bool with_bounds = true)
      : mean_(std::move(mean)), noise_(std::move(noise)), with_exact_(with_exact), with_bounds_(with_bounds) {}
  [[nodiscard]] std::size_t size() const override { return mean_.size(); }
  double sample(std::size_t i, Stream& s) const override { return mean_[i] + noise_[i] * (2.0 * s.uniform() - 1.0); }
  [[nodiscard]] std::optional<double> exact(std::size_t i) const override {
    return with_exact_ ? std::optional<double>(mean_[i]) : std::nullopt;
  }
  [[nodiscard]] std::optional<Bounds> bounds(std::size_t i) const override {
    if (!with_bounds_) return std::nullopt;
    return Bounds{mean_[i] - noise_[i], mean_[i] + noise_[i]};
  }
  [[nodiscard]] std::uint64_t exact_cost(std::size_t) const override { return 7; }

 private:
  std::vector<double> mean_, noise_;
  bool with_exact_, with_bounds_;
};

GreedyProblem tc1_problem(std::size_t training, std::size_t grid_points) {
  GreedyProblem p;
  p.function = make_tc1();
  p.training = make_equispaced_training_set({2.0, 4.0}, training);
  p.grid = grid(grid_points);
  return p;
}

// Trapezoid rule written out independently of SpatialGrid.
double trapezoid_sq_norm(double (*f)(double, double), double xi, std::size_t n) {
  const double h = 1.0 / static_cast<double>(n - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f(static_cast<double>(i) * h, xi);
    s += (i == 0 || i + 1 == n ? 0.5 : 1.0) * h * v * v;
  }
  return s;
}

}  // namespace

TEST(SelectDeterministic, TiesGoToSmallestIndex) {
  const FakeSampler s({0.1, 0.5, 0.2, 0.5}, {0, 0, 0, 0});
  const auto sel = select_deterministic(s);
  EXPECT_EQ(sel.index, 1u);
  EXPECT_EQ(sel.samples, 28u);
  EXPECT_EQ(sel.indicators, (std::vector<double>{0.1, 0.5, 0.2, 0.5}));
}

TEST(SelectDeterministic, MaximumAtLastIndex) {
  const FakeSampler s({0.1, 0.2, 0.3}, {0, 0, 0});
  EXPECT_EQ(select_deterministic(s).index, 2u);
}

TEST(SelectDeterministic, NeedsExactValues) {
  const FakeSampler s({0.1, 0.2}, {0, 0}, false);
  EXPECT_THROW((void)select_deterministic(s), UnsupportedSelector);
}

TEST(SelectMc, CountsAndConsistency) {
  std::vector<double> mean(300), noise(300, 0.5);
  for (std::size_t i = 0; i < 300; ++i) mean[i] = 1.0 + 0.001 * static_cast<double>(i % 17);
  const FakeSampler s(mean, noise);
  const auto sel = select_mc(s, 50, Stream(1));
  EXPECT_EQ(sel.samples, 15000u);
  EXPECT_EQ(sel.counts, std::vector<std::uint64_t>(300, 50));
  EXPECT_THROW((void)select_mc(s, 0, Stream(1)), std::invalid_argument);

  const FakeSampler three({0.3, 0.35, 0.32}, {0.3, 0.3, 0.3});
  const auto big = select_mc(three, 100000, Stream(2));
  EXPECT_EQ(big.index, 1u);
  // Uniform noise of half-width 0.3: standard error 0.3 / sqrt(3 K).
  const std::vector<double> means{0.3, 0.35, 0.32};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(big.indicators[i], means[i], 4.0 * 0.3 / std::sqrt(3e5));
}

TEST(SelectMc, ReproducibleUnderStream) {
  const FakeSampler s({0.1, 0.1, 0.1, 0.1}, {0.1, 0.1, 0.1, 0.1});
  EXPECT_EQ(select_mc(s, 3, Stream(5)).indicators, select_mc(s, 3, Stream(5)).indicators);
  EXPECT_NE(select_mc(s, 3, Stream(5)).indicators, select_mc(s, 3, Stream(6)).indicators);
}

TEST(SelectPac, ZeroVarianceArms) {
  const FakeSampler s({0.2, 0.7, 0.4}, {0, 0, 0});
  const auto sel = select_pac(s, 0.9, 0.1, 2, ConfidenceKind::bounded, Stream(3));
  EXPECT_EQ(sel.index, 1u);
  EXPECT_EQ(sel.counts, (std::vector<std::uint64_t>{3, 3, 3}));
  EXPECT_EQ(sel.samples, 9u);
  EXPECT_EQ(sel.bandit_rounds, 1u);
  EXPECT_DOUBLE_EQ(sel.indicators[1], 0.7);
}

TEST(SelectPac, BoundedNeedsBounds) {
  const FakeSampler s({0.2, 0.7}, {0.1, 0.1}, true, false);
  EXPECT_THROW((void)select_pac(s, 0.9, 0.1, 1, ConfidenceKind::bounded, Stream(3)), UnsupportedSelector);
  EXPECT_NO_THROW((void)select_pac(s, 0.9, 0.1, 2, ConfidenceKind::clt, Stream(3)));
}

TEST(SelectPac, RecordsOutcome) {
  const FakeSampler s({0.2, 0.4, 0.3}, {0.2, 0.4, 0.3});
  BanditOutcome out;
  const auto sel = select_pac(s, 0.5, 0.1, 1, ConfidenceKind::bounded, Stream(4), 2.0, 10'000'000, &out, true);
  EXPECT_EQ(out.selected, sel.index);
  EXPECT_EQ(out.total_samples, sel.samples);
  EXPECT_FALSE(out.trace.empty());
  EXPECT_EQ(sel.index, 1u);
}

TEST(SelectRandom, WithoutReplacement) {
  std::vector<bool> used(12, false);
  used[3] = used[7] = true;
  Stream st(9);
  std::set<std::size_t> seen;
  for (int k = 0; k < 10; ++k) {
    const auto sel = select_random(12, used, st);
    EXPECT_FALSE(used[sel.index]);
    used[sel.index] = true;
    seen.insert(sel.index);
  }
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_THROW((void)select_random(12, used, st), std::invalid_argument);
}

TEST(SelectorConfig, LambdaSchedule) {
  SelectorConfig c;
  c.kind = SelectorKind::pac_bounded;
  c.lambda = 0.1;
  EXPECT_DOUBLE_EQ(c.lambda_at(4), 0.025);
  EXPECT_DOUBLE_EQ(c.level_at(4), 0.025);
  c.kind = SelectorKind::pac_clt;
  EXPECT_DOUBLE_EQ(c.level_at(4), 0.1);
  EXPECT_TRUE(c.is_pac());
  c.kind = SelectorKind::mc;
  EXPECT_FALSE(c.is_pac());
  EXPECT_STREQ(to_string(SelectorKind::pac_bounded), "pac-bounded");
}

TEST(PointwiseErrorSampler, NeedsReferenceForExactOrBounds) {
  const auto g = grid(11);
  const auto ts = make_equispaced_training_set({2.0, 4.0}, 2);
  const ReducedBasis b(g);
  std::vector<Projection> pr(2, Projection(b, ProjectionMethod::interp, Vector()));
  EXPECT_THROW(PointwiseErrorSampler(make_tc1(), ts, g, pr, nullptr, {true, false}), UnsupportedSelector);
  EXPECT_THROW(PointwiseErrorSampler(make_tc1(), ts, g, pr, nullptr, {false, true}), UnsupportedSelector);
  EXPECT_NO_THROW(PointwiseErrorSampler(make_tc1(), ts, g, pr, nullptr, {false, false}));
  std::vector<Projection> one(1, Projection(b, ProjectionMethod::interp, Vector()));
  EXPECT_THROW(PointwiseErrorSampler(make_tc1(), ts, g, one, nullptr, {}), std::invalid_argument);
}

// Empty space: Z = |D| u(Y)^2, so E(Z) is the squared L2 norm.
TEST(PointwiseErrorSampler, UnbiasedAgainstGridNorm) {
  const auto g = grid(2001);
  const auto ts = make_equispaced_training_set({2.0, 4.0}, 3);
  const ReducedBasis b(g);
  const Matrix truth = truth_table(*make_tc1(), ts, *g);
  const PointwiseErrorSampler s(make_tc1(), ts, g, std::vector<Projection>(3, Projection(b, ProjectionMethod::interp, Vector())),
                                &truth, {true, true});
  const Stream root(21);
  for (std::size_t i = 0; i < 3; ++i) {
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < n; ++k) {
      Stream st = root.child(i, static_cast<std::uint64_t>(k));
      const double z = s.sample(i, st);
      sum += z;
      sum2 += z * z;
      const auto bd = s.bounds(i);
      ASSERT_GE(z, 0.0);
      ASSERT_LE(z, bd->hi * (1.0 + 1e-3) + 1e-9);
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_NEAR(*s.exact(i), trapezoid_sq_norm(&tc1, ts[i][0], 2001), 1e-12);
    EXPECT_NEAR(mean, *s.exact(i), 4.0 * se + 1e-4);
    EXPECT_EQ(s.bounds(i)->lo, 0.0);
  }
}

// First d-greedy pick is the training parameter of largest norm.
TEST(RunGreedy, FirstDeterministicPickIsBruteForceArgmax) {
  auto p = tc1_problem(300, 1000);
  GreedyConfig c;
  c.n_max = 1;
  c.validate = false;
  const auto r = run_greedy(p, c);
  std::size_t best = 0;
  double best_v = -1.0;
  for (std::size_t i = 0; i < p.training.size(); ++i) {
    const double v = trapezoid_sq_norm(&tc1, p.training[i][0], 1000);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  ASSERT_EQ(r.trace.iterations.size(), 1u);
  EXPECT_EQ(r.trace.iterations[0].selected, best);
  EXPECT_EQ(r.trace.iterations[0].samples, 300u * 1000u);
}

TEST(RunGreedy, CumulativeSamplesAreRunningSums) {
  auto p = tc1_problem(60, 500);
  GreedyConfig c;
  c.selector.kind = SelectorKind::mc;
  c.selector.K = 4;
  c.n_max = 6;
  const auto r = run_greedy(p, c);
  std::uint64_t sum = 0;
  for (const auto& it : r.trace.iterations) {
    EXPECT_EQ(it.samples, 240u);
    sum += it.samples;
    EXPECT_EQ(it.cumulative_samples, sum);
    EXPECT_EQ(it.lambda_n, 0.0);
  }
  EXPECT_EQ(r.trace.cumulative_samples(), sum);
  EXPECT_EQ(r.basis.size(), 6u);
}

TEST(RunGreedy, DeterministicUnderSeed) {
  auto p = tc1_problem(60, 500);
  GreedyConfig c;
  c.selector.kind = SelectorKind::mc;
  c.n_max = 5;
  const auto a = run_greedy(p, c);
  const auto b = run_greedy(p, c);
  EXPECT_EQ(a.trace.selected(), b.trace.selected());
  EXPECT_EQ(a.trace.iterations.back().validation_mean, b.trace.iterations.back().validation_mean);
}

TEST(RunGreedy, RandomSelectionNeverRepeats) {
  auto p = tc1_problem(12, 400);
  GreedyConfig c;
  c.selector.kind = SelectorKind::random;
  c.n_max = 8;
  c.validate = false;
  const auto r = run_greedy(p, c);
  const auto sel = r.trace.selected();
  EXPECT_EQ(std::set<std::size_t>(sel.begin(), sel.end()).size(), sel.size());
  for (const auto& it : r.trace.iterations) EXPECT_EQ(it.samples, 0u);
}

TEST(RunGreedy, PacLambdaBudgetStaysLogarithmic) {
  auto p = tc1_problem(30, 400);
  GreedyConfig c;
  c.selector.kind = SelectorKind::pac_bounded;
  c.selector.lambda = 0.1;
  c.n_max = 8;
  c.validate = false;
  const auto r = run_greedy(p, c);
  ASSERT_FALSE(r.trace.iterations.empty());
  for (const auto& it : r.trace.iterations) {
    EXPECT_DOUBLE_EQ(it.lambda_n, 0.1 / static_cast<double>(it.n));
    EXPECT_LE(it.lambda_sum, 0.1 * (1.0 + std::log(static_cast<double>(it.n))) + 1e-15);
    EXPECT_GE(it.samples, 30u);
    EXPECT_EQ(std::accumulate(it.counts.begin(), it.counts.end(), std::uint64_t{0}), it.samples);
  }
}

TEST(RunGreedy, NoisyFunctionWithoutReferenceRejectsExactSelectors) {
  GreedyProblem p;
  p.function = std::make_shared<NoisyFunction>(make_tc1(), 0.01);
  p.training = make_equispaced_training_set({2.0, 4.0}, 10);
  p.grid = grid(200);
  GreedyConfig c;
  c.validate = false;
  c.n_max = 2;
  c.snapshots = SnapshotMode::exact;
  EXPECT_THROW((void)run_greedy(p, c), UnsupportedSelector);
  c.selector.kind = SelectorKind::pac_bounded;
  EXPECT_THROW((void)run_greedy(p, c), UnsupportedSelector);
  c.validate = true;
  c.selector.kind = SelectorKind::mc;
  EXPECT_THROW((void)run_greedy(p, c), std::invalid_argument);
}

TEST(RunGreedy, RejectsBadConfiguration) {
  auto p = tc1_problem(10, 100);
  GreedyConfig c;
  c.n_max = 0;
  EXPECT_THROW((void)run_greedy(p, c), std::invalid_argument);
  c.n_max = 2;
  c.projector = ProjectionMethod::min_res;
  EXPECT_THROW((void)run_greedy(p, c), std::invalid_argument);
}

// Three training parameters: the fourth pick can only repeat one.
TEST(RunGreedy, StopsEarlyOnDegenerateSnapshot) {
  auto p = tc1_problem(3, 300);
  GreedyConfig c;
  c.n_max = 6;
  const auto r = run_greedy(p, c);
  EXPECT_TRUE(r.trace.early_stop);
  EXPECT_EQ(r.trace.iterations.size(), 3u);
  EXPECT_EQ(r.basis.size(), 3u);
  EXPECT_NE(r.trace.stop_reason.find("n=4"), std::string::npos);
  EXPECT_LT(r.trace.iterations.back().validation_max, r.trace.initial_validation_max);
}

// Orthogonal projections onto nested spaces never increase any error.
TEST(RunGreedy, LeastSquaresValidationMaxIsMonotone) {
  auto p = tc1_problem(100, 1000);
  GreedyConfig c;
  c.projector = ProjectionMethod::least_squares;
  c.n_max = 12;
  const auto r = run_greedy(p, c);
  double prev = r.trace.initial_validation_max;
  for (const auto& it : r.trace.iterations) {
    EXPECT_LE(it.validation_max, prev * (1.0 + 1e-12) + 1e-14) << "n " << it.n;
    EXPECT_LE(it.validation_mean, it.validation_max);
    prev = it.validation_max;
  }
}

TEST(ValidationParameters, InBoxAndSeeded) {
  const auto a = validation_parameters({2.0, 4.0}, 100, 2);
  EXPECT_EQ(a, validation_parameters({2.0, 4.0}, 100, 2));
  EXPECT_NE(a, validation_parameters({2.0, 4.0}, 100, 3));
  for (const auto& x : a) {
    EXPECT_GT(x[0], 2.0);
    EXPECT_LT(x[0], 4.0);
  }
}

TEST(WeakGreedy, RatiosInUnitIntervalAndOneForExactArgmax) {
  auto p = tc1_problem(40, 500);
  GreedyConfig c;
  c.projector = ProjectionMethod::least_squares;
  c.n_max = 8;
  c.validate = false;
  const auto r = run_greedy(p, c);
  const auto g = weak_greedy_ratios(*p.function, p.training, *p.grid, r.trace);
  ASSERT_EQ(g.size(), 8u);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  for (double v : g) EXPECT_NEAR(v, 1.0, 1e-8);

  const std::vector<std::size_t> arbitrary{5, 30, 12};
  const auto h = weak_greedy_ratios(truth_table(*p.function, p.training, *p.grid), *p.grid, arbitrary);
  for (double v : h) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 + 1e-12);
  }
}

TEST(KolmogorovProxy, NonincreasingAndZeroBeyondRank) {
  const auto g = grid(200);
  Matrix truth(200, 30);
  for (Eigen::Index j = 0; j < 30; ++j)
    for (Eigen::Index i = 0; i < 200; ++i) {
      const double x = (*g)[static_cast<std::size_t>(i)];
      truth(i, j) = std::sin(x) * (1.0 + 0.1 * static_cast<double>(j)) + std::cos(3.0 * x) * std::sqrt(static_cast<double>(j));
    }
  const auto curve = kolmogorov_proxy_curve(truth, *g);
  ASSERT_EQ(curve.size(), 31u);
  for (std::size_t n = 1; n < curve.size(); ++n) EXPECT_LE(curve[n], curve[n - 1]);
  EXPECT_GT(curve[1], 1e-3);
  EXPECT_EQ(curve[2], 0.0);
  EXPECT_THROW((void)kolmogorov_proxy_curve(truth, *g, 100), std::invalid_argument);
}

// The proxy lower-bounds the worst training error of any n-dimensional space,
// in particular of the least-squares greedy space.
TEST(KolmogorovProxy, BelowGreedyErrorsAndSmallAtTwenty) {
  auto p = tc1_problem(300, 2000);
  const Matrix truth = truth_table(*p.function, p.training, *p.grid);
  const auto curve = kolmogorov_proxy_curve(truth, *p.grid);
  GreedyConfig c;
  c.projector = ProjectionMethod::least_squares;
  c.n_max = 10;
  c.validate = false;
  const auto r = run_greedy(p, c);
  ASSERT_EQ(r.basis.size(), 10u);
  for (std::size_t n : {2u, 5u, 10u}) {
    ReducedBasis b(p.grid);
    for (std::size_t k = 0; k < n; ++k) b = b.add_snapshot(r.basis.snapshot(k), r.basis.param(k));
    double worst = 0.0;
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      const Vector col = truth.col(j);
      worst = std::max(worst, l2_error(least_squares(b, col), col, *p.grid));
    }
    EXPECT_LE(curve[n], worst * (1.0 + 1e-9)) << "n " << n;
  }
  EXPECT_LT(kolmogorov_proxy(*p.function, p.training, *p.grid, 20), 1e-12);
}
