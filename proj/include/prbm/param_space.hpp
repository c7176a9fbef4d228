#pragma once

// Parameter training sets, spatial grids and the built-in parametric test
// functions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "prbm/csv.hpp"
#include "prbm/random.hpp"

namespace prbm {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
  [[nodiscard]] double clamp(double x) const { return std::clamp(x, lo, hi); }
};

/// A parameter value. Fixed dimension p within one training set; p = 1 for
/// all built-in problems.
using Param = std::vector<double>;

enum class Generation { equispaced, loguniform };

struct TrainingSet {
  std::vector<Param> points;
  Generation generation = Generation::equispaced;
  std::optional<std::uint64_t> seed;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] const Param& operator[](std::size_t i) const { return points[i]; }
  [[nodiscard]] std::size_t dimension() const { return points.empty() ? 0 : points.front().size(); }
};

inline TrainingSet make_equispaced_training_set(Interval box, std::size_t count) {
  if (count < 2) throw std::invalid_argument("equispaced training set needs count >= 2");
  if (!(box.hi > box.lo)) throw std::invalid_argument("equispaced training set needs a nondegenerate box");
  TrainingSet ts;
  ts.generation = Generation::equispaced;
  ts.points.reserve(count);
  const double h = box.width() / static_cast<double>(count - 1);
  for (std::size_t i = 0; i + 1 < count; ++i) ts.points.push_back({box.lo + static_cast<double>(i) * h});
  ts.points.push_back({box.hi});
  return ts;
}

/// Points whose logarithm is uniform on [log lo, log hi], drawn by inverse
/// transform and sorted ascending. Coincident draws are redrawn.
inline TrainingSet make_loguniform_training_set(Interval box, std::size_t count, std::uint64_t seed) {
  if (!(box.lo > 0.0)) throw std::invalid_argument("log-uniform training set needs a positive lower bound");
  if (!(box.hi >= box.lo)) throw std::invalid_argument("log-uniform training set needs hi >= lo");
  if (count < 1) throw std::invalid_argument("log-uniform training set needs count >= 1");
  const double llo = std::log(box.lo);
  const double lhi = std::log(box.hi);
  Stream stream(seed);
  auto draw = [&] { return box.clamp(std::exp(llo + (lhi - llo) * stream.uniform())); };

  std::vector<double> values;
  values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) values.push_back(draw());
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::sort(values.begin(), values.end());
    auto last = std::unique(values.begin(), values.end());
    const auto missing = static_cast<std::size_t>(values.end() - last);
    if (missing == 0) break;
    values.erase(last, values.end());
    for (std::size_t i = 0; i < missing; ++i) values.push_back(draw());
  }
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
    throw std::invalid_argument("log-uniform training set: box too narrow for distinct points");
  }

  TrainingSet ts;
  ts.generation = Generation::loguniform;
  ts.seed = seed;
  ts.points.reserve(count);
  for (double v : values) ts.points.push_back({v});
  return ts;
}

/// Ordered points of a 1D domain with trapezoid quadrature weights.
class SpatialGrid {
 public:
  SpatialGrid(std::vector<double> points, Interval domain) : points_(std::move(points)), domain_(domain) {
    if (points_.empty()) throw std::invalid_argument("spatial grid must not be empty");
    if (!(domain_.hi > domain_.lo)) throw std::invalid_argument("spatial grid domain must be nondegenerate");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!domain_.contains(points_[i])) throw std::invalid_argument("grid point outside the domain");
      if (i > 0 && !(points_[i] > points_[i - 1])) throw std::invalid_argument("grid points must increase");
    }
    weights_.assign(points_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      const double h = points_[i + 1] - points_[i];
      weights_[i] += 0.5 * h;
      weights_[i + 1] += 0.5 * h;
    }
  }

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }
  [[nodiscard]] const std::vector<double>& points() const { return points_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] Interval domain() const { return domain_; }
  /// Lebesgue measure |D|.
  [[nodiscard]] double measure() const { return domain_.width(); }

  /// Trapezoid rule over the grid points.
  template <class Values>
  [[nodiscard]] double integrate(const Values& v) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) s += weights_[i] * v[i];
    return s;
  }

  /// Piecewise-linear interpolation of grid values at x; constant
  /// extrapolation outside the first and last point.
  template <class Values>
  [[nodiscard]] double interpolate_linear(const Values& v, double x) const {
    if (x <= points_.front()) return v[0];
    if (x >= points_.back()) return v[points_.size() - 1];
    const auto it = std::upper_bound(points_.begin(), points_.end(), x);
    const auto j = static_cast<std::size_t>(it - points_.begin());
    const double t = (x - points_[j - 1]) / (points_[j] - points_[j - 1]);
    return (1.0 - t) * v[j - 1] + t * v[j];
  }

  bool operator==(const SpatialGrid& o) const {
    return points_ == o.points_ && domain_.lo == o.domain_.lo && domain_.hi == o.domain_.hi;
  }

 private:
  std::vector<double> points_;
  Interval domain_;
  std::vector<double> weights_;
};

inline SpatialGrid make_equispaced_grid(Interval domain, std::size_t count) {
  if (count < 2) throw std::invalid_argument("equispaced grid needs count >= 2");
  std::vector<double> pts;
  pts.reserve(count);
  const double h = domain.width() / static_cast<double>(count - 1);
  for (std::size_t i = 0; i + 1 < count; ++i) pts.push_back(domain.lo + static_cast<double>(i) * h);
  pts.push_back(domain.hi);
  return SpatialGrid(std::move(pts), domain);
}

// ---------------------------------------------------------------------------
// Test functions

inline double tc1(double x, double xi) { return 10.0 * x * std::sin(2.0 * std::numbers::pi * x * xi); }

inline double tc2(double x, double xi) {
  const double s = std::sqrt(xi + 0.1);
  if (x <= xi) return std::sqrt(x + 0.1);
  return (x - xi) / (2.0 * s) + s;
}

// (e^{x/xi} - 1) / (e^{1/xi} - 1), rewritten as
// e^{(x-1)/xi} * expm1(-x/xi) / expm1(-1/xi) so that nothing overflows for
// small xi.
inline double pde_exact(double x, double xi) {
  return std::exp((x - 1.0) / xi) * std::expm1(-x / xi) / std::expm1(-1.0 / xi);
}

/// Source g of -xi u'' + 10 u' = g whose solution with u(0)=0, u(1)=1 is
/// pde_exact.
inline double pde_source(double x, double xi) {
  return 9.0 / xi * std::exp((x - 1.0) / xi) / (-std::expm1(-1.0 / xi));
}

/// A family u(x, xi) accessed only through pointwise evaluations.
class ParametricFunction {
 public:
  virtual ~ParametricFunction() = default;

  /// One evaluation; deterministic implementations ignore the stream, which
  /// may then be null.
  virtual double eval(double x, const Param& xi, Stream* stream) const = 0;
  [[nodiscard]] virtual bool deterministic() const { return true; }

  [[nodiscard]] double operator()(double x, const Param& xi) const { return eval(x, xi, nullptr); }

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] Interval domain() const { return domain_; }
  [[nodiscard]] Interval param_box() const { return param_box_; }

 protected:
  ParametricFunction(std::string name, Interval domain, Interval param_box)
      : name_(std::move(name)), domain_(domain), param_box_(param_box) {}

 private:
  std::string name_;
  Interval domain_;
  Interval param_box_;
};

using FunctionPtr = std::shared_ptr<const ParametricFunction>;

class ClosedFormFunction final : public ParametricFunction {
 public:
  using Formula = double (*)(double, double);

  ClosedFormFunction(std::string name, Interval domain, Interval param_box, Formula f)
      : ParametricFunction(std::move(name), domain, param_box), f_(f) {}

  double eval(double x, const Param& xi, Stream*) const override { return f_(x, xi[0]); }

 private:
  Formula f_;
};

/// Adds i.i.d. N(0, sigma^2) noise to every evaluation of a base function.
class NoisyFunction final : public ParametricFunction {
 public:
  NoisyFunction(FunctionPtr base, double sigma)
      : ParametricFunction(base->name() + "+noise", base->domain(), base->param_box()),
        base_(std::move(base)),
        sigma_(sigma) {}

  double eval(double x, const Param& xi, Stream* stream) const override {
    if (stream == nullptr) throw std::invalid_argument("noisy evaluation needs a random stream");
    return base_->eval(x, xi, stream) + sigma_ * stream->normal();
  }
  [[nodiscard]] bool deterministic() const override { return false; }

 private:
  FunctionPtr base_;
  double sigma_;
};

inline FunctionPtr make_tc1() {
  return std::make_shared<ClosedFormFunction>("tc1", Interval{0.0, 1.0}, Interval{2.0, 4.0}, &tc1);
}
inline FunctionPtr make_tc2() {
  return std::make_shared<ClosedFormFunction>("tc2", Interval{0.0, 1.0}, Interval{0.0, 1.0}, &tc2);
}
inline FunctionPtr make_pde_exact() {
  return std::make_shared<ClosedFormFunction>("pde", Interval{0.0, 1.0}, Interval{0.005, 1.0}, &pde_exact);
}

// ---------------------------------------------------------------------------
// CSV

inline void write_csv(std::ostream& os, const TrainingSet& ts) {
  os << "index";
  for (std::size_t d = 0; d < ts.dimension(); ++d) os << ",xi" << d;
  os << '\n';
  for (std::size_t i = 0; i < ts.size(); ++i) {
    os << i;
    for (double v : ts[i]) os << ',' << csv::format(v);
    os << '\n';
  }
}

inline void write_csv(std::ostream& os, const SpatialGrid& grid) {
  csv::row(os, "index", "x", "weight");
  for (std::size_t i = 0; i < grid.size(); ++i) csv::row(os, i, grid[i], grid.weights()[i]);
}

}  // namespace prbm
