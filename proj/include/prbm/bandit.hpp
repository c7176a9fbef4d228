#pragma once

// Adaptive PAC bandit for a maximum in relative precision of E(Z(xi)) over a
// finite set of arms.

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <ostream>
#include <vector>

#include "prbm/csv.hpp"
#include "prbm/errors.hpp"

namespace prbm {

/// Almost-sure bounds a <= Z <= b.
struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

enum class ConfidenceKind { bounded, clt };

inline const char* to_string(ConfidenceKind k) { return k == ConfidenceKind::bounded ? "bounded" : "clt"; }

/// Empirical Bernstein radius for a variable with values in [a, b]:
/// sqrt(2 var log(3/x) / m) + 3 (b - a) log(3/x) / m.
inline double radius_bounded(std::uint64_t m, double x, double var, double a, double b) {
  if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  if (m < 1) throw std::invalid_argument("radius needs m >= 1");
  if (b < a) throw std::invalid_argument("bounds must satisfy a <= b");
  const double md = static_cast<double>(m);
  const double l = std::log(3.0 / x);
  return std::sqrt(2.0 * std::max(var, 0.0) * l / md) + 3.0 * (b - a) * l / md;
}

/// gamma_x: the standard normal quantile with P(|N| > gamma_x) = x.
inline double normal_two_sided_quantile(double x) {
  if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(boost::math::complement(standard, 0.5 * x));
}

/// Asymptotic (CLT) radius gamma_x sqrt(var / m).
inline double radius_clt(std::uint64_t m, double x, double var) {
  if (m < 2) throw std::invalid_argument("CLT radius needs m >= 2");
  return normal_two_sided_quantile(x) * std::sqrt(std::max(var, 0.0) / static_cast<double>(m));
}

/// Confidence levels and radii for one bandit run.
///
/// bounded: d_m = delta (p-1)/p m^{-p} with delta = lambda / #arms, so that
///   sum_m d_m = delta (p-1)/p zeta(p) <= lambda / #arms.
/// clt: x_m = lambda at every check, with no schedule over m or split over
///   arms; asymptotic intervals carry no PAC guarantee.
struct ConfidenceModel {
  ConfidenceKind kind = ConfidenceKind::bounded;
  double lambda = 0.1;
  std::size_t arms = 1;
  double p = 2.0;

  [[nodiscard]] double delta() const { return lambda / static_cast<double>(arms); }

  [[nodiscard]] double level(std::uint64_t m) const {
    const double md = static_cast<double>(m);
    if (kind == ConfidenceKind::bounded) return delta() * (p - 1.0) / p * std::pow(md, -p);
    return lambda;
  }

  /// Closed form of sum_{m>=1} level(m); infinite for the fixed CLT level.
  [[nodiscard]] double level_sum() const {
    if (kind == ConfidenceKind::bounded) return delta() * (p - 1.0) / p * boost::math::zeta(p);
    return std::numeric_limits<double>::infinity();
  }

  /// Smallest m from which the bounded radius is nonincreasing in m for fixed
  /// variance and range: log(3/d_m)/m decreases once log(3/d_m) >= p, i.e.
  /// from m0 = ceil(exp(1 - log(3 / (delta (p-1)/p)) / p)).
  [[nodiscard]] std::uint64_t monotone_from() const {
    if (kind == ConfidenceKind::clt) return 2;
    const double c0 = std::log(3.0 / (delta() * (p - 1.0) / p));
    const double m0 = std::exp(1.0 - c0 / p);
    return m0 <= 1.0 ? 1 : static_cast<std::uint64_t>(std::ceil(m0));
  }

  void validate() const {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
    if (arms < 1) throw std::invalid_argument("confidence model needs at least one arm");
    if (kind == ConfidenceKind::bounded && !(p > 1.0)) throw std::invalid_argument("schedule exponent p must exceed 1");
  }
};

/// Running statistics of one arm. The variance is the biased (1/m) empirical
/// variance.
class ArmStatistics {
 public:
  ArmStatistics() = default;
  explicit ArmStatistics(std::optional<Bounds> bounds) : bounds_(bounds) {}

  void push(double z) {
    ++m_;
    const double d = z - mean_;
    mean_ += d / static_cast<double>(m_);
    m2_ += d * (z - mean_);
  }

  [[nodiscard]] std::uint64_t count() const { return m_; }
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] double variance() const { return m_ == 0 ? 0.0 : std::max(m2_, 0.0) / static_cast<double>(m_); }
  [[nodiscard]] const std::optional<Bounds>& bounds() const { return bounds_; }
  [[nodiscard]] double radius() const { return radius_; }

  /// Recomputes the radius at the current count.
  void update_radius(const ConfidenceModel& model) {
    const double x = model.level(m_);
    if (model.kind == ConfidenceKind::bounded) {
      if (!bounds_) throw std::invalid_argument("bounded confidence model needs arm bounds");
      radius_ = radius_bounded(m_, x, variance(), bounds_->lo, bounds_->hi);
    } else {
      radius_ = radius_clt(m_, x, variance());
    }
  }

  void set_radius(double r) { radius_ = r; }

  /// epsilon_{xi,m}: radius / |mean|, or +inf at mean 0.
  [[nodiscard]] double relative_precision() const {
    return mean_ != 0.0 ? radius_ / std::abs(mean_) : std::numeric_limits<double>::infinity();
  }
  [[nodiscard]] double sign() const { return mean_ > 0.0 ? 1.0 : (mean_ < 0.0 ? -1.0 : 0.0); }
  [[nodiscard]] double lower() const { return mean_ - radius_; }
  [[nodiscard]] double upper() const { return mean_ + radius_; }

 private:
  std::uint64_t m_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double radius_ = std::numeric_limits<double>::infinity();
  std::optional<Bounds> bounds_;
};

/// Biased estimate mean - eps s c when eps < 1, else the mean.
inline double estimate_hat(const ArmStatistics& s) {
  const double eps = s.relative_precision();
  if (eps < 1.0) return s.mean() - eps * s.sign() * s.radius();
  return s.mean();
}

struct BanditOptions {
  ConfidenceKind kind = ConfidenceKind::bounded;
  double eps = 0.9;
  double lambda = 0.1;
  double p = 2.0;
  std::uint64_t initial_samples = 1;
  std::uint64_t max_samples = 10'000'000;
  bool record_trace = false;
};

struct BanditTraceRow {
  std::uint64_t round;
  std::size_t arm;
  std::uint64_t m;
  double mean;
  double radius;
  bool survivor;
};

struct BanditOutcome {
  std::size_t selected = 0;
  std::vector<ArmStatistics> stats;
  std::vector<bool> survivors;
  std::uint64_t rounds = 0;
  std::uint64_t total_samples = 0;
  std::vector<BanditTraceRow> trace;

  [[nodiscard]] std::vector<std::uint64_t> counts() const {
    std::vector<std::uint64_t> c;
    c.reserve(stats.size());
    for (const auto& s : stats) c.push_back(s.count());
    return c;
  }
  /// E-hat for every surviving arm, NaN elsewhere.
  [[nodiscard]] std::vector<double> estimates() const {
    std::vector<double> e(stats.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t a = 0; a < stats.size(); ++a)
      if (survivors[a]) e[a] = estimate_hat(stats[a]);
    return e;
  }
};

/// bandit_trace.csv: round,arm,m,mean,radius,survivor
inline void write_bandit_trace_csv(std::ostream& os, const BanditOutcome& out) {
  csv::row(os, "round", "arm", "m", "mean", "radius", "survivor");
  for (const auto& r : out.trace) csv::row(os, r.round, r.arm, r.m, r.mean, r.radius, r.survivor);
}

class BudgetExhausted : public NumericalError {
 public:
  BudgetExhausted(const std::string& what, BanditOutcome partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  [[nodiscard]] const BanditOutcome& partial() const { return partial_; }

 private:
  BanditOutcome partial_;
};

/// Survivor rule: every arm whose upper bound reaches the largest lower
/// bound. Evaluated over all arms, so eliminated arms may re-enter.
inline std::vector<bool> survivor_set(const std::vector<ArmStatistics>& stats) {
  double best_lower = -std::numeric_limits<double>::infinity();
  for (const auto& s : stats) best_lower = std::max(best_lower, s.lower());
  std::vector<bool> out(stats.size());
  for (std::size_t a = 0; a < stats.size(); ++a) out[a] = stats[a].upper() >= best_lower;
  return out;
}

/// Adaptive bandit. sample(arm, k) returns the k-th draw (k counts from 0)
/// of arm `arm`; bounds(arm) is only called for the bounded model.
///
/// K draws per arm are taken eagerly. Then, while more than one arm survives
/// and the worst survivor relative precision exceeds eps/(2+eps), every
/// survivor gets one more draw and the survivor set is recomputed. The first
/// round always runs when there is more than one arm. The result maximizes
/// E-hat over the final survivors, ties to the smallest index.
template <class Sampler, class BoundsFn>
BanditOutcome run_bandit(std::size_t n_arms, Sampler&& sample, BoundsFn&& bounds, const BanditOptions& opt) {
  if (n_arms < 1) throw std::invalid_argument("bandit needs at least one arm");
  if (opt.initial_samples < 1) throw std::invalid_argument("bandit needs K >= 1");
  if (!(opt.eps > 0.0 && opt.eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  const ConfidenceModel model{opt.kind, opt.lambda, n_arms, opt.p};
  model.validate();

  // The CLT radius needs a variance estimate, hence two draws.
  const std::uint64_t k0 = opt.kind == ConfidenceKind::clt ? std::max<std::uint64_t>(opt.initial_samples, 2)
                                                           : opt.initial_samples;
  BanditOutcome out;
  out.stats.reserve(n_arms);
  for (std::size_t a = 0; a < n_arms; ++a) {
    if (opt.kind == ConfidenceKind::bounded)
      out.stats.emplace_back(std::optional<Bounds>(bounds(a)));
    else
      out.stats.emplace_back();
  }
  out.survivors.assign(n_arms, true);

  auto record = [&](std::size_t a) {
    if (opt.record_trace) {
      const auto& s = out.stats[a];
      out.trace.push_back({out.rounds, a, s.count(), s.mean(), s.radius(), static_cast<bool>(out.survivors[a])});
    }
  };

  if (k0 * n_arms > opt.max_samples) throw BudgetExhausted("bandit budget below the initial draws", out);
  for (std::size_t a = 0; a < n_arms; ++a) {
    for (std::uint64_t k = 0; k < k0; ++k) out.stats[a].push(sample(a, k));
    out.stats[a].update_radius(model);
    out.total_samples += k0;
    record(a);
  }

  const double threshold = opt.eps / (2.0 + opt.eps);
  auto n_survivors = [&] { return static_cast<std::size_t>(std::count(out.survivors.begin(), out.survivors.end(), true)); };
  auto worst_precision = [&] {
    double w = 0.0;
    for (std::size_t a = 0; a < n_arms; ++a)
      if (out.survivors[a]) w = std::max(w, out.stats[a].relative_precision());
    return w;
  };

  while (n_survivors() > 1 && (out.rounds == 0 || worst_precision() > threshold)) {
    if (out.total_samples + n_survivors() > opt.max_samples)
      throw BudgetExhausted("bandit exceeded its sample budget of " + std::to_string(opt.max_samples), out);
    const std::vector<bool> sampled = out.survivors;
    for (std::size_t a = 0; a < n_arms; ++a) {
      if (!sampled[a]) continue;
      auto& s = out.stats[a];
      s.push(sample(a, s.count()));
      s.update_radius(model);
      ++out.total_samples;
    }
    ++out.rounds;
    out.survivors = survivor_set(out.stats);
    if (opt.record_trace)
      for (std::size_t a = 0; a < n_arms; ++a)
        if (sampled[a]) record(a);
  }

  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t a = 0; a < n_arms; ++a) {
    if (!out.survivors[a]) continue;
    const double e = estimate_hat(out.stats[a]);
    if (!found || e > best) {
      best = e;
      out.selected = a;
      found = true;
    }
  }
  return out;
}

/// Overload for the CLT model (no bounds).
template <class Sampler>
BanditOutcome run_bandit(std::size_t n_arms, Sampler&& sample, const BanditOptions& opt) {
  if (opt.kind == ConfidenceKind::bounded) throw std::invalid_argument("bounded confidence model needs arm bounds");
  return run_bandit(n_arms, std::forward<Sampler>(sample),
                    [](std::size_t) -> Bounds { throw std::logic_error("bounds requested by a CLT bandit"); }, opt);
}

}  // namespace prbm
