#pragma once

// Stopped diffusions and Feynman-Kac Monte Carlo estimators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "prbm/diffusion_problem.hpp"
#include "prbm/errors.hpp"
#include "prbm/random.hpp"

namespace prbm {

struct StoppedTrajectory {
  double exit_state = 0.0;
  double exit_time = 0.0;
  double running_integral = 0.0;
  std::uint64_t steps = 0;
  bool capped = false;
};

/// Euler-Maruyama path from x0 stopped at the first grid time t_k > 0 with
/// X_k outside D (or capped at t_max). The integral of `source` uses the
/// left-rectangle rule: source(X_k) dt for every completed step. Step k draws
/// its Gaussian increment from block k of the stream.
template <class Source>
StoppedTrajectory simulate_stopped(const DiffusionProblem& problem, double x0, const Param& xi, Stream& stream,
                                   Source&& source) {
  StoppedTrajectory t;
  double x = x0;
  const double dt = problem.dt;
  const double sqdt = std::sqrt(dt);
  const auto max_steps = static_cast<std::uint64_t>(std::ceil(problem.t_max / dt));
  while (problem.inside(x)) {
    if (t.steps >= max_steps) {
      t.capped = true;
      break;
    }
    t.running_integral += source(x) * dt;
    x += dt * problem.drift(x, xi) + problem.sigma(x, xi) * sqdt * stream.normal();
    ++t.steps;
    if (!std::isfinite(x) || !std::isfinite(t.running_integral))
      throw NumericalBlowup("trajectory state became non-finite after " + std::to_string(t.steps) + " steps");
  }
  t.exit_state = x;
  t.exit_time = static_cast<double>(t.steps) * dt;
  return t;
}

inline StoppedTrajectory simulate_stopped(const DiffusionProblem& problem, double x0, const Param& xi, Stream& stream) {
  return simulate_stopped(problem, x0, xi, stream, [&](double x) { return problem.source(x, xi); });
}

struct PointEstimate {
  double value = 0.0;
  /// Unbiased sample variance of the per-path functionals.
  double variance = 0.0;
  std::uint64_t paths = 0;
  double capped_fraction = 0.0;

  [[nodiscard]] double std_error() const { return std::sqrt(variance / static_cast<double>(paths)); }
};

namespace detail {

// Neumaier-compensated mean and variance of values in index order.
inline void compensated_moments(std::span<const double> v, double& mean, double& var) {
  double s = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  mean = (s + c) / static_cast<double>(v.size());
  double q = 0.0;
  for (double x : v) q += (x - mean) * (x - mean);
  var = v.size() > 1 ? q / static_cast<double>(v.size() - 1) : 0.0;
}

}  // namespace detail

/// u_{dt,M}(x): mean of f(X_tau) + int g dt over M paths; path m uses
/// stream.child(m).
inline PointEstimate point_estimate(const DiffusionProblem& problem, double x, const Param& xi, std::uint64_t paths,
                                    const Stream& stream) {
  if (paths < 1) throw std::invalid_argument("point estimate needs M >= 1");
  std::vector<double> values(paths);
  std::uint64_t capped = 0;
  for (std::uint64_t m = 0; m < paths; ++m) {
    Stream s = stream.child(m);
    const auto t = simulate_stopped(problem, x, xi, s);
    values[m] = problem.boundary_at(t.exit_state, xi) + t.running_integral;
    capped += t.capped ? 1 : 0;
  }
  PointEstimate e;
  e.paths = paths;
  detail::compensated_moments(values, e.value, e.variance);
  e.capped_fraction = static_cast<double>(capped) / static_cast<double>(paths);
  return e;
}

/// Finite-difference A(xi) v at x with spacing h: centered when x +- h stays
/// in the closed domain, one-sided three-point otherwise.
template <class Fn>
double apply_generator_fd(const DiffusionProblem& problem, const Param& xi, Fn&& v, double x, double h = 1e-4) {
  double d1 = 0.0;
  double d2 = 0.0;
  if (x - h < problem.domain.lo) {
    const double v0 = v(x), v1 = v(x + h), v2 = v(x + 2 * h);
    d1 = (-3.0 * v0 + 4.0 * v1 - v2) / (2.0 * h);
    d2 = (v0 - 2.0 * v1 + v2) / (h * h);
  } else if (x + h > problem.domain.hi) {
    const double v0 = v(x), v1 = v(x - h), v2 = v(x - 2 * h);
    d1 = (3.0 * v0 - 4.0 * v1 + v2) / (2.0 * h);
    d2 = (v0 - 2.0 * v1 + v2) / (h * h);
  } else {
    const double vm = v(x - h), v0 = v(x), vp = v(x + h);
    d1 = (vp - vm) / (2.0 * h);
    d2 = (vp - 2.0 * v0 + vm) / (h * h);
  }
  return problem.generator(x, xi, d1, d2);
}

/// Default spacing for the generator applied to u_n inside g_n.
inline constexpr double kGeneratorFdStep = 1e-4;

/// One draw of Z_n = F_n(Y, X) F_n(Y, X~) with Y ~ U(D) drawn from y_stream
/// and the two paths driven by traj_a and traj_b, where
/// F_n = f_n(X_tau) + int g_n dt, f_n = f - u_n and g_n = g + A u_n.
/// |D| E(Z_n) = ||u - u_n||^2_{L2}.
template <class Approx>
double error_sample_Zn(const DiffusionProblem& problem, Approx&& un, const Param& xi, Stream& y_stream,
                       Stream& traj_a, Stream& traj_b) {
  const double y = y_stream.uniform(problem.domain.lo, problem.domain.hi);
  auto gn = [&](double x) { return problem.source(x, xi) + apply_generator_fd(problem, xi, un, x, kGeneratorFdStep); };
  auto functional = [&](Stream& s) {
    const auto t = simulate_stopped(problem, y, xi, s, gn);
    const double xe = problem.domain.clamp(t.exit_state);
    return problem.boundary(xe, xi) - un(xe) + t.running_integral;
  };
  const double fa = functional(traj_a);
  const double fb = functional(traj_b);
  return fa * fb;
}

/// Z_n draw from one sample stream: Y from child(0), the paths from child(1)
/// and child(2).
template <class Approx>
double error_sample_Zn(const DiffusionProblem& problem, Approx&& un, const Param& xi, const Stream& stream) {
  Stream y = stream.child(0);
  Stream a = stream.child(1);
  Stream b = stream.child(2);
  return error_sample_Zn(problem, std::forward<Approx>(un), xi, y, a, b);
}

/// Noisy snapshot: point_estimate at every grid point, point i on
/// stream.child(i).
inline Eigen::VectorXd snapshot_estimate_grid(const DiffusionProblem& problem, const Param& xi,
                                              const SpatialGrid& grid, std::uint64_t paths, const Stream& stream,
                                              double* max_capped_fraction = nullptr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto e = point_estimate(problem, grid[i], xi, paths, stream.child(i));
    v[static_cast<Eigen::Index>(i)] = e.value;
    worst = std::max(worst, e.capped_fraction);
  }
  if (max_capped_fraction != nullptr) *max_capped_fraction = worst;
  return v;
}

}  // namespace prbm
