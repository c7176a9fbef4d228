#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include "prbm/bandit.hpp"
#include "prbm/random.hpp"

using namespace prbm;

TEST(Radius, BoundedMatchesClosedForm) {
  const double l = std::log(3.0 / 0.01);
  EXPECT_DOUBLE_EQ(radius_bounded(50, 0.01, 0.04, -1.0, 2.0), std::sqrt(2.0 * 0.04 * l / 50.0) + 9.0 * l / 50.0);
  EXPECT_DOUBLE_EQ(radius_bounded(7, 0.2, 0.0, 1.0, 1.0), 0.0);
}

TEST(Radius, BoundedRejectsBadArguments) {
  EXPECT_THROW((void)radius_bounded(0, 0.1, 1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW((void)radius_bounded(1, 0.0, 1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW((void)radius_bounded(1, 1.0, 1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW((void)radius_bounded(1, 0.1, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(Radius, NormalQuantileKnownValues) {
  EXPECT_NEAR(normal_two_sided_quantile(0.05), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_two_sided_quantile(0.1), 1.6448536269514722, 1e-12);
  EXPECT_NEAR(normal_two_sided_quantile(0.01), 2.5758293035489004, 1e-12);
  // Tail probability recovered by erfc.
  for (double x : {1e-8, 1e-3, 0.3, 0.9}) {
    const double g = normal_two_sided_quantile(x);
    EXPECT_NEAR(std::erfc(g / std::sqrt(2.0)) / x, 1.0, 1e-10);
  }
}

TEST(Radius, CltScaling) {
  EXPECT_NEAR(radius_clt(100, 0.05, 4.0), 1.959963984540054 * 0.2, 1e-12);
  EXPECT_NEAR(radius_clt(400, 0.05, 4.0) * 2.0, radius_clt(100, 0.05, 4.0), 1e-14);
  EXPECT_THROW((void)radius_clt(1, 0.05, 1.0), std::invalid_argument);
}

TEST(ConfidenceModel, BoundedScheduleSumsBelowShare) {
  const ConfidenceModel m{ConfidenceKind::bounded, 0.1, 20, 2.0};
  EXPECT_DOUBLE_EQ(m.delta(), 0.005);
  EXPECT_DOUBLE_EQ(m.level(1), 0.005 / 2.0);
  EXPECT_DOUBLE_EQ(m.level(10), 0.005 / 2.0 / 100.0);
  double partial = 0.0;
  for (std::uint64_t k = 1; k <= 1000000; ++k) partial += m.level(k);
  EXPECT_NEAR(m.level_sum(), 0.005 / 2.0 * std::numbers::pi * std::numbers::pi / 6.0, 1e-15);
  EXPECT_LT(partial, m.level_sum());
  EXPECT_NEAR(partial, m.level_sum(), 1e-8);
  EXPECT_LE(m.level_sum(), m.delta());
}

TEST(ConfidenceModel, OtherExponent) {
  const ConfidenceModel m{ConfidenceKind::bounded, 0.2, 4, 3.0};
  double partial = 0.0;
  for (std::uint64_t k = 1; k <= 100000; ++k) partial += m.level(k);
  EXPECT_NEAR(partial, m.level_sum(), 1e-11);
  EXPECT_LE(m.level_sum(), m.delta());
}

TEST(ConfidenceModel, CltLevelIsFixed) {
  const ConfidenceModel m{ConfidenceKind::clt, 0.1, 300, 2.0};
  EXPECT_EQ(m.level(2), 0.1);
  EXPECT_EQ(m.level(5000), 0.1);
  EXPECT_TRUE(std::isinf(m.level_sum()));
}

TEST(ConfidenceModel, BoundedRadiusNonincreasingFromM0) {
  for (double lambda : {0.5, 0.1, 1e-3})
    for (std::size_t arms : {1u, 10u, 300u})
      for (double p : {1.5, 2.0, 4.0}) {
        const ConfidenceModel m{ConfidenceKind::bounded, lambda, arms, p};
        const std::uint64_t m0 = m.monotone_from();
        double prev = radius_bounded(m0, m.level(m0), 0.3, 0.0, 1.0);
        for (std::uint64_t k = m0 + 1; k < m0 + 2000; ++k) {
          const double r = radius_bounded(k, m.level(k), 0.3, 0.0, 1.0);
          ASSERT_LE(r, prev * (1.0 + 1e-14)) << "lambda " << lambda << " arms " << arms << " p " << p << " m " << k;
          prev = r;
        }
      }
}

TEST(ConfidenceModel, Validation) {
  EXPECT_THROW((ConfidenceModel{ConfidenceKind::bounded, 0.0, 1, 2.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ConfidenceModel{ConfidenceKind::bounded, 0.1, 0, 2.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ConfidenceModel{ConfidenceKind::bounded, 0.1, 1, 1.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((ConfidenceModel{ConfidenceKind::clt, 0.1, 1, 1.0}.validate()));
}

TEST(ArmStatistics, MatchesTwoPassMoments) {
  Stream s(4);
  std::vector<double> z;
  ArmStatistics a;
  for (int i = 0; i < 1000; ++i) {
    z.push_back(1e6 + s.normal());
    a.push(z.back());
  }
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / 1000.0;
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= 1000.0;
  EXPECT_EQ(a.count(), 1000u);
  EXPECT_NEAR(a.mean(), mean, 1e-9);
  EXPECT_NEAR(a.variance(), var, 1e-7);
}

TEST(ArmStatistics, RelativePrecisionAndEstimate) {
  ArmStatistics a;
  a.push(2.0);
  a.set_radius(0.5);
  EXPECT_DOUBLE_EQ(a.relative_precision(), 0.25);
  EXPECT_DOUBLE_EQ(estimate_hat(a), 2.0 - 0.25 * 0.5);
  a.set_radius(3.0);
  EXPECT_DOUBLE_EQ(estimate_hat(a), 2.0);
  ArmStatistics neg;
  neg.push(-2.0);
  neg.set_radius(0.5);
  EXPECT_DOUBLE_EQ(estimate_hat(neg), -2.0 + 0.25 * 0.5);
  ArmStatistics zero;
  zero.push(0.0);
  zero.set_radius(0.0);
  EXPECT_TRUE(std::isinf(zero.relative_precision()));
  EXPECT_EQ(estimate_hat(zero), 0.0);
}

TEST(ArmStatistics, BoundedRadiusNeedsBounds) {
  ArmStatistics a;
  a.push(1.0);
  EXPECT_THROW(a.update_radius(ConfidenceModel{}), std::invalid_argument);
}

TEST(SurvivorSet, KeepsOverlappingIntervals) {
  std::vector<ArmStatistics> s(3);
  const double means[] = {1.0, 1.5, 3.0};
  const double radii[] = {0.2, 1.0, 0.6};
  for (int i = 0; i < 3; ++i) {
    s[i].push(means[i]);
    s[i].set_radius(radii[i]);
  }
  EXPECT_EQ(survivor_set(s), (std::vector<bool>{false, true, true}));
}

// Constant arms with zero-width bounds: every radius is 0 after the initial
// draws, but the first round still runs, so each arm ends with K + 1 draws.
TEST(RunBandit, ZeroVarianceArmsStopAfterFirstRound) {
  const std::vector<double> values{0.3, 0.9, 0.5, 0.1};
  BanditOptions opt;
  opt.initial_samples = 3;
  auto sample = [&](std::size_t a, std::uint64_t) { return values[a]; };
  auto bounds = [&](std::size_t a) { return Bounds{values[a], values[a]}; };
  const auto out = run_bandit(values.size(), sample, bounds, opt);
  EXPECT_EQ(out.selected, 1u);
  EXPECT_EQ(out.rounds, 1u);
  EXPECT_EQ(out.counts(), (std::vector<std::uint64_t>(4, 4)));
  EXPECT_EQ(out.total_samples, 16u);
  EXPECT_EQ(out.survivors, (std::vector<bool>{false, true, false, false}));
  EXPECT_DOUBLE_EQ(out.estimates()[1], 0.9);
  EXPECT_TRUE(std::isnan(out.estimates()[0]));
}

TEST(RunBandit, SingleArmTakesOnlyInitialDraws) {
  BanditOptions opt;
  opt.initial_samples = 5;
  const auto out = run_bandit(
      1, [](std::size_t, std::uint64_t k) { return 1.0 + static_cast<double>(k); },
      [](std::size_t) { return Bounds{0.0, 10.0}; }, opt);
  EXPECT_EQ(out.selected, 0u);
  EXPECT_EQ(out.rounds, 0u);
  EXPECT_EQ(out.total_samples, 5u);
  EXPECT_DOUBLE_EQ(out.stats[0].mean(), 3.0);
}

TEST(RunBandit, CltTakesAtLeastTwoInitialDraws) {
  const std::vector<double> values{0.2, 0.4};
  BanditOptions opt;
  opt.kind = ConfidenceKind::clt;
  opt.initial_samples = 1;
  const auto out = run_bandit(values.size(), [&](std::size_t a, std::uint64_t) { return values[a]; }, opt);
  EXPECT_EQ(out.selected, 1u);
  EXPECT_EQ(out.counts(), (std::vector<std::uint64_t>{3, 3}));
}

TEST(RunBandit, BoundedOverloadWithoutBoundsRejected) {
  EXPECT_THROW((void)run_bandit(2, [](std::size_t, std::uint64_t) { return 1.0; }, BanditOptions{}),
               std::invalid_argument);
}

TEST(RunBandit, RejectsBadOptions) {
  auto sample = [](std::size_t, std::uint64_t) { return 1.0; };
  auto bounds = [](std::size_t) { return Bounds{0.0, 2.0}; };
  BanditOptions opt;
  EXPECT_THROW((void)run_bandit(0, sample, bounds, opt), std::invalid_argument);
  opt.initial_samples = 0;
  EXPECT_THROW((void)run_bandit(2, sample, bounds, opt), std::invalid_argument);
  opt.initial_samples = 1;
  opt.eps = 1.0;
  EXPECT_THROW((void)run_bandit(2, sample, bounds, opt), std::invalid_argument);
}

TEST(RunBandit, BudgetExhaustedCarriesPartialOutcome) {
  // Two arms with equal means never separate.
  Stream root(8);
  BanditOptions opt;
  opt.max_samples = 1000;
  auto sample = [&](std::size_t a, std::uint64_t k) { return root.child(a, k).uniform(0.0, 2.0); };
  auto bounds = [](std::size_t) { return Bounds{0.0, 2.0}; };
  try {
    (void)run_bandit(2, sample, bounds, opt);
    FAIL() << "expected BudgetExhausted";
  } catch (const BudgetExhausted& e) {
    EXPECT_LE(e.partial().total_samples, 1000u);
    EXPECT_GE(e.partial().total_samples, 999u);
    const auto c = e.partial().counts();
    EXPECT_EQ(std::accumulate(c.begin(), c.end(), std::uint64_t{0}), e.partial().total_samples);
  }
  opt.max_samples = 1;
  EXPECT_THROW((void)run_bandit(2, sample, bounds, opt), BudgetExhausted);
}

TEST(RunBandit, TraceAccountsForEveryDraw) {
  Stream root(9);
  const std::vector<double> mu{0.1, 0.2, 0.4};
  BanditOptions opt;
  opt.record_trace = true;
  opt.initial_samples = 2;
  auto sample = [&](std::size_t a, std::uint64_t k) { return root.child(a, k).uniform(0.0, 2.0 * mu[a]); };
  auto bounds = [&](std::size_t a) { return Bounds{0.0, 2.0 * mu[a]}; };
  const auto out = run_bandit(mu.size(), sample, bounds, opt);
  // Initial rows carry m = K; each later row is one extra draw.
  std::uint64_t draws = 0;
  for (const auto& row : out.trace) draws += row.round == 0 ? row.m : 1;
  EXPECT_EQ(draws, out.total_samples);
  const auto c = out.counts();
  EXPECT_EQ(std::accumulate(c.begin(), c.end(), std::uint64_t{0}), out.total_samples);
  EXPECT_EQ(out.trace.back().round, out.rounds);
  EXPECT_EQ(out.selected, 2u);

  std::ostringstream os;
  write_bandit_trace_csv(os, out);
  std::istringstream is(os.str());
  const auto t = csv::read(is);
  EXPECT_EQ(t.header, (std::vector<std::string>{"round", "arm", "m", "mean", "radius", "survivor"}));
  EXPECT_EQ(t.rows.size(), out.trace.size());
}

TEST(RunBandit, DeterministicGivenSampler) {
  Stream root(10);
  auto sample = [&](std::size_t a, std::uint64_t k) { return root.child(a, k).uniform(0.0, 1.0 + 0.1 * a); };
  auto bounds = [](std::size_t a) { return Bounds{0.0, 1.0 + 0.1 * a}; };
  const auto a = run_bandit(5, sample, bounds, BanditOptions{});
  const auto b = run_bandit(5, sample, bounds, BanditOptions{});
  EXPECT_EQ(a.counts(), b.counts());
  EXPECT_EQ(a.selected, b.selected);
}

// With eps = 0.1 only the top arm is within relative precision of the
// maximum, and its estimate must be within eps of its mean.
TEST(RunBandit, RelativePrecisionPropertyOnUniformArms) {
  const std::vector<double> mu{0.1, 0.2, 0.3};
  const double eps = 0.1;
  int good = 0;
  const int runs = 40;
  for (int r = 0; r < runs; ++r) {
    Stream root(1000 + static_cast<std::uint64_t>(r));
    BanditOptions opt;
    opt.eps = eps;
    auto sample = [&](std::size_t a, std::uint64_t k) { return root.child(a, k).uniform(0.0, 2.0 * mu[a]); };
    auto bounds = [&](std::size_t a) { return Bounds{0.0, 2.0 * mu[a]}; };
    const auto out = run_bandit(mu.size(), sample, bounds, opt);
    const double e = out.estimates()[out.selected];
    if (mu[out.selected] >= (1.0 - eps) * 0.3 && std::abs(e - mu[out.selected]) <= eps * mu[out.selected]) ++good;
  }
  EXPECT_GE(good, 36);
}
