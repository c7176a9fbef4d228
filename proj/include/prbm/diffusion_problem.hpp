#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "prbm/param_space.hpp"

namespace prbm {

/// Boundary value problem -A(xi) u = g in D, u = f on the boundary, with
/// A = 1/2 sigma^2 d^2/dx^2 + b d/dx the generator of dX = b dt + sigma dW.
/// D is the open interval (domain.lo, domain.hi).
struct DiffusionProblem {
  using Field = std::function<double(double, const Param&)>;

  Interval domain{0.0, 1.0};
  Field drift;
  Field sigma;
  Field boundary;
  Field source;
  double dt = 1e-3;
  double t_max = 1e3;

  [[nodiscard]] bool inside(double x) const { return x > domain.lo && x < domain.hi; }

  /// Boundary data at an exit state: evaluated at the nearest point of the
  /// closed domain.
  [[nodiscard]] double boundary_at(double x, const Param& xi) const { return boundary(domain.clamp(x), xi); }

  /// A applied to a function with the given first and second derivatives at x.
  [[nodiscard]] double generator(double x, const Param& xi, double d1, double d2) const {
    const double s = sigma(x, xi);
    return 0.5 * s * s * d2 + drift(x, xi) * d1;
  }

  void validate() const {
    if (!(domain.hi > domain.lo)) throw std::invalid_argument("diffusion problem: degenerate domain");
    if (!(dt > 0.0)) throw std::invalid_argument("diffusion problem: dt must be positive");
    if (!(t_max > 0.0)) throw std::invalid_argument("diffusion problem: t_max must be positive");
    if (!drift || !sigma || !boundary || !source) throw std::invalid_argument("diffusion problem: missing field");
  }
};

/// The advection-diffusion test problem: a(xi) = xi, b = -10 on D = (0, 1),
/// sigma = sqrt(2 xi), boundary data and source matching pde_exact.
/// T_max defaults to 10^3 times diam(D)^2 / (2 min a) over the parameter box.
inline DiffusionProblem make_pde_problem(double dt = 1e-3, double t_max = 0.0) {
  DiffusionProblem p;
  p.domain = {0.0, 1.0};
  p.drift = [](double, const Param&) { return -10.0; };
  p.sigma = [](double, const Param& xi) { return std::sqrt(2.0 * xi[0]); };
  p.boundary = [](double x, const Param& xi) { return pde_exact(x, xi[0]); };
  p.source = [](double x, const Param& xi) { return pde_source(x, xi[0]); };
  p.dt = dt;
  const double min_a = 0.005;
  p.t_max = t_max > 0.0 ? t_max : 1e3 * 1.0 / (2.0 * min_a);
  return p;
}

}  // namespace prbm
