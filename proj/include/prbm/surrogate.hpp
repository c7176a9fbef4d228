#pragma once

// Reduced basis storage and the projections onto it: magic-point
// interpolation, discrete least squares and minimal-residual collocation.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "prbm/csv.hpp"
#include "prbm/diffusion_problem.hpp"
#include "prbm/errors.hpp"
#include "prbm/param_space.hpp"

namespace prbm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ProjectionMethod { interp, least_squares, min_res };

inline const char* to_string(ProjectionMethod m) {
  switch (m) {
    case ProjectionMethod::interp: return "interp";
    case ProjectionMethod::least_squares: return "least-squares";
    case ProjectionMethod::min_res: return "min-res";
  }
  return "?";
}

/// Weighted (trapezoid) discrete L2 inner product on a grid.
inline double grid_dot(const SpatialGrid& grid, const Vector& u, const Vector& v) {
  const auto& w = grid.weights();
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += w[static_cast<std::size_t>(i)] * u[i] * v[i];
  return s;
}

inline double grid_norm(const SpatialGrid& grid, const Vector& u) { return std::sqrt(grid_dot(grid, u, u)); }

/// Snapshots over a fixed grid with nested magic-point interpolation data and
/// an orthonormal companion basis.
///
/// Value type with shared immutable storage: add_snapshot returns a new basis
/// and leaves this one untouched.
///
/// The interpolation family q_1..q_n is built from residuals
///   r_j = s_j - I_{j-1}[s_j],   q_j = r_j / r_j(x_j),
/// with x_j the grid point where |r_j| is largest (smallest index on ties).
/// The matrix B(i, j) = q_j(x_i) is unit lower triangular. The orthonormal
/// family comes from modified Gram-Schmidt with one reorthogonalization pass.
/// Both families are also kept as recurrences over the snapshots so they can
/// be evaluated off the grid.
class ReducedBasis {
 public:
  static constexpr double kDefaultDropTolerance = 1e-15;

  /// snapshot_source, when deterministic, evaluates snapshot i off the grid
  /// as source(x, xi_i); otherwise snapshots are interpolated linearly
  /// between grid points.
  explicit ReducedBasis(std::shared_ptr<const SpatialGrid> grid, FunctionPtr snapshot_source = nullptr,
                        double drop_tolerance = kDefaultDropTolerance)
      : data_(std::make_shared<Data>()) {
    if (!grid) throw std::invalid_argument("reduced basis needs a grid");
    data_->grid = std::move(grid);
    if (snapshot_source && snapshot_source->deterministic()) data_->source = std::move(snapshot_source);
    data_->drop_tolerance = drop_tolerance;
  }

  [[nodiscard]] std::size_t size() const { return data_->members.size(); }
  [[nodiscard]] bool empty() const { return size() == 0; }
  [[nodiscard]] const SpatialGrid& grid() const { return *data_->grid; }
  [[nodiscard]] std::shared_ptr<const SpatialGrid> grid_ptr() const { return data_->grid; }
  [[nodiscard]] double drop_tolerance() const { return data_->drop_tolerance; }
  [[nodiscard]] const FunctionPtr& snapshot_source() const { return data_->source; }

  [[nodiscard]] const Param& param(std::size_t j) const { return member(j).xi; }
  [[nodiscard]] std::vector<Param> params() const {
    std::vector<Param> out;
    for (const auto& m : data_->members) out.push_back(m->xi);
    return out;
  }
  [[nodiscard]] const Vector& snapshot(std::size_t j) const { return member(j).snapshot; }
  [[nodiscard]] std::size_t magic_point(std::size_t j) const { return member(j).magic; }
  [[nodiscard]] std::vector<std::size_t> magic_points() const {
    std::vector<std::size_t> out;
    for (const auto& m : data_->members) out.push_back(m->magic);
    return out;
  }
  /// q_j on the grid.
  [[nodiscard]] const Vector& interp_function(std::size_t j) const { return member(j).q; }
  /// o_j on the grid.
  [[nodiscard]] const Vector& ortho_function(std::size_t j) const { return member(j).o; }

  /// B(i, j) = q_j(x_i).
  [[nodiscard]] Matrix interp_matrix() const {
    const std::size_t n = size();
    Matrix b = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = member(j).q[static_cast<Eigen::Index>(member(i).magic)];
    return b;
  }

  /// Columns q_1..q_n on the grid.
  [[nodiscard]] Matrix interp_family() const { return stack(&Member::q); }
  /// Columns o_1..o_n on the grid.
  [[nodiscard]] Matrix ortho_basis() const { return stack(&Member::o); }

  /// Values of grid data at the magic points.
  [[nodiscard]] Vector at_magic_points(const Vector& grid_values) const {
    Vector v(static_cast<Eigen::Index>(size()));
    for (std::size_t j = 0; j < size(); ++j) v[static_cast<Eigen::Index>(j)] = grid_values[static_cast<Eigen::Index>(member(j).magic)];
    return v;
  }

  /// Coefficients of I_n[v] in the q family, from values at the magic points.
  [[nodiscard]] Vector interp_coefficients(const Vector& magic_values) const {
    if (static_cast<std::size_t>(magic_values.size()) != size())
      throw std::invalid_argument("interpolation data size " + std::to_string(magic_values.size()) +
                                  " does not match basis size " + std::to_string(size()));
    // Forward substitution with the unit lower triangular B.
    const std::size_t n = size();
    Vector c(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      double s = magic_values[static_cast<Eigen::Index>(i)];
      const auto xi = static_cast<Eigen::Index>(member(i).magic);
      for (std::size_t j = 0; j < i; ++j) s -= c[static_cast<Eigen::Index>(j)] * member(j).q[xi];
      c[static_cast<Eigen::Index>(i)] = s;
    }
    return c;
  }

  /// Appends a snapshot; throws DegenerateSnapshot when it is numerically in
  /// the current span.
  [[nodiscard]] ReducedBasis add_snapshot(Vector values, Param xi) const {
    const auto& grid = *data_->grid;
    if (static_cast<std::size_t>(values.size()) != grid.size())
      throw std::invalid_argument("snapshot length does not match the grid");
    if (!values.allFinite()) throw std::invalid_argument("snapshot contains non-finite values");

    auto m = std::make_shared<Member>();
    m->xi = std::move(xi);
    m->snapshot = std::move(values);
    const Vector& s = m->snapshot;
    const double scale_inf = s.cwiseAbs().maxCoeff();

    // Interpolation residual and magic point.
    m->interp_coeffs = interp_coefficients(at_magic_points(s));
    Vector r = s;
    for (std::size_t j = 0; j < size(); ++j) r -= m->interp_coeffs[static_cast<Eigen::Index>(j)] * member(j).q;
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      const double a = std::abs(r[i]);
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (!(best_abs > data_->drop_tolerance * scale_inf))
      throw DegenerateSnapshot("interpolation residual " + csv::format(best_abs) + " below drop tolerance");
    m->magic = static_cast<std::size_t>(best);
    m->interp_scale = r[best];
    m->q = r / m->interp_scale;
    m->q[best] = 1.0;

    // Orthonormal companion, two MGS passes.
    const double s_norm = grid_norm(grid, s);
    Vector o = s;
    m->ortho_coeffs = Vector::Zero(static_cast<Eigen::Index>(size()));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < size(); ++j) {
        const double d = grid_dot(grid, member(j).o, o);
        m->ortho_coeffs[static_cast<Eigen::Index>(j)] += d;
        o -= d * member(j).o;
      }
    }
    const double nu = grid_norm(grid, o);
    if (!(nu > data_->drop_tolerance * s_norm))
      throw DegenerateSnapshot("orthogonal residual " + csv::format(nu) + " below drop tolerance");
    m->ortho_norm = nu;
    m->o = o / nu;

    ReducedBasis next(*this);
    next.data_ = std::make_shared<Data>(*data_);
    next.data_->members.push_back(std::move(m));
    return next;
  }

  /// Snapshot j at an arbitrary point.
  [[nodiscard]] double snapshot_at(std::size_t j, double x) const {
    if (data_->source) return data_->source->eval(x, member(j).xi, nullptr);
    return data_->grid->interpolate_linear(member(j).snapshot, x);
  }

  /// q_1(x)..q_n(x) into out (size >= n).
  void interp_family_at(double x, std::span<double> out) const {
    for (std::size_t j = 0; j < size(); ++j) {
      const Member& m = member(j);
      double v = snapshot_at(j, x);
      for (std::size_t k = 0; k < j; ++k) v -= m.interp_coeffs[static_cast<Eigen::Index>(k)] * out[k];
      out[j] = v / m.interp_scale;
    }
  }

  /// o_1(x)..o_n(x) into out (size >= n).
  void ortho_family_at(double x, std::span<double> out) const {
    for (std::size_t j = 0; j < size(); ++j) {
      const Member& m = member(j);
      double v = snapshot_at(j, x);
      for (std::size_t k = 0; k < j; ++k) v -= m.ortho_coeffs[static_cast<Eigen::Index>(k)] * out[k];
      out[j] = v / m.ortho_norm;
    }
  }

 private:
  struct Member {
    Param xi;
    Vector snapshot;
    std::size_t magic = 0;
    Vector q;
    Vector interp_coeffs;
    double interp_scale = 1.0;
    Vector o;
    Vector ortho_coeffs;
    double ortho_norm = 1.0;
  };

  struct Data {
    std::shared_ptr<const SpatialGrid> grid;
    FunctionPtr source;
    double drop_tolerance = kDefaultDropTolerance;
    std::vector<std::shared_ptr<const Member>> members;
  };

  [[nodiscard]] const Member& member(std::size_t j) const { return *data_->members.at(j); }

  [[nodiscard]] Matrix stack(Vector Member::*field) const {
    Matrix out(static_cast<Eigen::Index>(grid().size()), static_cast<Eigen::Index>(size()));
    for (std::size_t j = 0; j < size(); ++j) out.col(static_cast<Eigen::Index>(j)) = member(j).*field;
    return out;
  }

  std::shared_ptr<Data> data_;
};

/// An element of V_n given by coefficients in one of the basis families: the
/// q family for interp and min-res, the orthonormal family for least squares.
class Projection {
 public:
  Projection(ReducedBasis basis, ProjectionMethod method, Vector coefficients, double objective = 0.0)
      : basis_(std::move(basis)), method_(method), coefficients_(std::move(coefficients)), objective_(objective) {}

  [[nodiscard]] ProjectionMethod method() const { return method_; }
  [[nodiscard]] const Vector& coefficients() const { return coefficients_; }
  [[nodiscard]] const ReducedBasis& basis() const { return basis_; }
  /// Minimized objective for min-res projections; 0 otherwise.
  [[nodiscard]] double objective() const { return objective_; }

  [[nodiscard]] bool uses_ortho_family() const { return method_ == ProjectionMethod::least_squares; }

  [[nodiscard]] Vector values_on_grid() const {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(basis_.grid().size()));
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      const Vector& f = uses_ortho_family() ? basis_.ortho_function(j) : basis_.interp_function(j);
      v += coefficients_[static_cast<Eigen::Index>(j)] * f;
    }
    return v;
  }

  [[nodiscard]] double value(double x) const {
    std::vector<double> fam(basis_.size());
    return value(x, fam);
  }

  /// value(x) with caller-provided scratch of size >= n.
  double value(double x, std::span<double> scratch) const {
    if (uses_ortho_family())
      basis_.ortho_family_at(x, scratch);
    else
      basis_.interp_family_at(x, scratch);
    double s = 0.0;
    for (std::size_t j = 0; j < basis_.size(); ++j) s += coefficients_[static_cast<Eigen::Index>(j)] * scratch[j];
    return s;
  }

  /// Values at the points of another grid (the stored grid values when it is
  /// the basis grid).
  [[nodiscard]] Vector values_on(const SpatialGrid& grid) const {
    if (grid == basis_.grid()) return values_on_grid();
    Vector v(static_cast<Eigen::Index>(grid.size()));
    std::vector<double> fam(basis_.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = value(grid[i], fam);
    return v;
  }

 private:
  ReducedBasis basis_;
  ProjectionMethod method_;
  Vector coefficients_;
  double objective_;
};

/// Interpolation at the magic points.
inline Projection interpolate(const ReducedBasis& basis, const Vector& evals_at_magic_points) {
  return Projection(basis, ProjectionMethod::interp, basis.interp_coefficients(evals_at_magic_points));
}

/// Discrete (trapezoid-weighted) L2 projection of grid values onto the span.
inline Projection least_squares(const ReducedBasis& basis, const Vector& evals) {
  const auto& grid = basis.grid();
  if (static_cast<std::size_t>(evals.size()) != grid.size())
    throw std::invalid_argument("least squares: target length does not match the grid");
  if (grid.size() < basis.size()) throw DegenerateBasis("least squares: fewer grid points than basis functions");
  Vector beta = Vector::Zero(static_cast<Eigen::Index>(basis.size()));
  Vector r = evals;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double d = grid_dot(grid, basis.ortho_function(j), r);
      beta[static_cast<Eigen::Index>(j)] += d;
      r -= d * basis.ortho_function(j);
    }
  }
  return Projection(basis, ProjectionMethod::least_squares, std::move(beta));
}

namespace detail {

// Three-point finite-difference weights (first and second derivative) at x0
// for the stencil {a, b, c}; exact for quadratics.
struct FdWeights {
  double d1[3];
  double d2[3];
};

inline FdWeights fd_weights(double x0, double a, double b, double c) {
  const double xs[3] = {a, b, c};
  FdWeights w{};
  for (int k = 0; k < 3; ++k) {
    const double xk = xs[k];
    const double xm = xs[(k + 1) % 3];
    const double xn = xs[(k + 2) % 3];
    const double denom = (xk - xm) * (xk - xn);
    w.d1[k] = ((x0 - xm) + (x0 - xn)) / denom;
    w.d2[k] = 2.0 / denom;
  }
  return w;
}

}  // namespace detail

/// Spacing of the off-grid finite differences used by min-res when the basis
/// can evaluate its snapshots anywhere.
inline constexpr double kMinResFdStep = 1e-4;

/// Rows of the min-res least-squares system in q coordinates: interior
/// strong-form residual rows (A q_j)(x_i), rhs -g(x_i); then the two boundary
/// rows q_j(lo), q_j(hi) with rhs f(lo), f(hi).
struct MinResSystem {
  Matrix lhs;
  Vector rhs;
};

inline MinResSystem min_res_system(const ReducedBasis& basis, const DiffusionProblem& problem, const Param& xi,
                                   const SpatialGrid& collocation, double fd_step = kMinResFdStep) {
  const std::size_t n = basis.size();
  const std::size_t npts = collocation.size();
  if (npts < 3) throw std::invalid_argument("min-res collocation grid needs at least 3 points");

  // q family on the collocation grid.
  Matrix fam(static_cast<Eigen::Index>(npts), static_cast<Eigen::Index>(n));
  if (collocation == basis.grid()) {
    fam = basis.interp_family();
  } else {
    std::vector<double> row(n);
    for (std::size_t i = 0; i < npts; ++i) {
      basis.interp_family_at(collocation[i], row);
      for (std::size_t j = 0; j < n; ++j) fam(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }

  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < npts; ++i)
    if (problem.inside(collocation[i])) interior.push_back(i);

  const auto rows = static_cast<Eigen::Index>(interior.size() + 2);
  MinResSystem sys{Matrix::Zero(rows, static_cast<Eigen::Index>(n)), Vector::Zero(rows)};
  Eigen::Index r = 0;
  if (basis.snapshot_source() && fd_step > 0.0) {
    // Off-grid access: derivatives with spacing fd_step, one-sided next to
    // the boundary.
    std::vector<double> f0(n), f1(n), f2(n);
    const double h = fd_step;
    for (std::size_t i : interior) {
      const double x0 = collocation[i];
      const bool left = x0 - h < problem.domain.lo;
      const bool right = !left && x0 + h > problem.domain.hi;
      if (left) {
        basis.interp_family_at(x0, f0);
        basis.interp_family_at(x0 + h, f1);
        basis.interp_family_at(x0 + 2 * h, f2);
      } else if (right) {
        basis.interp_family_at(x0, f0);
        basis.interp_family_at(x0 - h, f1);
        basis.interp_family_at(x0 - 2 * h, f2);
      } else {
        basis.interp_family_at(x0 - h, f1);
        basis.interp_family_at(x0, f0);
        basis.interp_family_at(x0 + h, f2);
      }
      for (std::size_t j = 0; j < n; ++j) {
        double d1 = 0.0;
        double d2 = 0.0;
        if (left || right) {
          d1 = (-3.0 * f0[j] + 4.0 * f1[j] - f2[j]) / (2.0 * h) * (left ? 1.0 : -1.0);
          d2 = (f0[j] - 2.0 * f1[j] + f2[j]) / (h * h);
        } else {
          d1 = (f2[j] - f1[j]) / (2.0 * h);
          d2 = (f2[j] - 2.0 * f0[j] + f1[j]) / (h * h);
        }
        sys.lhs(r, static_cast<Eigen::Index>(j)) = problem.generator(x0, xi, d1, d2);
      }
      sys.rhs[r] = -problem.source(x0, xi);
      ++r;
    }
    interior.clear();
  }
  for (std::size_t i : interior) {
    std::size_t a = 0;
    if (i == 0)
      a = 0;
    else if (i + 1 == npts)
      a = npts - 3;
    else
      a = i - 1;
    const double x0 = collocation[i];
    const auto w = detail::fd_weights(x0, collocation[a], collocation[a + 1], collocation[a + 2]);
    for (std::size_t j = 0; j < n; ++j) {
      double d1 = 0.0;
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double v = fam(static_cast<Eigen::Index>(a + static_cast<std::size_t>(k)), static_cast<Eigen::Index>(j));
        d1 += w.d1[k] * v;
        d2 += w.d2[k] * v;
      }
      sys.lhs(r, static_cast<Eigen::Index>(j)) = problem.generator(x0, xi, d1, d2);
    }
    sys.rhs[r] = -problem.source(x0, xi);
    ++r;
  }
  const double ends[2] = {problem.domain.lo, problem.domain.hi};
  std::vector<double> row(n);
  for (double xb : ends) {
    basis.interp_family_at(xb, row);
    if (xb == collocation[0] && collocation == basis.grid()) {
      for (std::size_t j = 0; j < n; ++j) row[j] = fam(0, static_cast<Eigen::Index>(j));
    } else if (xb == collocation[npts - 1] && collocation == basis.grid()) {
      for (std::size_t j = 0; j < n; ++j) row[j] = fam(static_cast<Eigen::Index>(npts - 1), static_cast<Eigen::Index>(j));
    }
    for (std::size_t j = 0; j < n; ++j) sys.lhs(r, static_cast<Eigen::Index>(j)) = row[j];
    sys.rhs[r] = problem.boundary(xb, xi);
    ++r;
  }
  return sys;
}

/// Sum of squared interior residuals plus squared boundary mismatches for the
/// element with the given q coefficients.
inline double min_res_objective(const ReducedBasis& basis, const DiffusionProblem& problem, const Param& xi,
                                const SpatialGrid& collocation, const Vector& coefficients,
                                double fd_step = kMinResFdStep) {
  const auto sys = min_res_system(basis, problem, xi, collocation, fd_step);
  return (sys.lhs * coefficients - sys.rhs).squaredNorm();
}

/// Minimal-residual projection. Derivatives use spacing fd_step around each
/// collocation point when the basis has an off-grid snapshot source, and the
/// three-point stencil of the collocation grid otherwise.
inline Projection min_res_projection(const ReducedBasis& basis, const DiffusionProblem& problem, const Param& xi,
                                     const SpatialGrid& collocation, double fd_step = kMinResFdStep) {
  if (basis.empty()) return Projection(basis, ProjectionMethod::min_res, Vector(), 0.0);
  const auto sys = min_res_system(basis, problem, xi, collocation, fd_step);
  Eigen::ColPivHouseholderQR<Matrix> qr(sys.lhs);
  if (qr.rank() < sys.lhs.cols()) throw DegenerateBasis("min-res normal equations are singular");
  Vector c = qr.solve(sys.rhs);
  const double obj = (sys.lhs * c - sys.rhs).squaredNorm();
  return Projection(basis, ProjectionMethod::min_res, std::move(c), obj);
}

/// Trapezoid estimate of ||u(xi) - u_n(xi)||_{L2} on a quadrature grid.
inline double l2_error(const Projection& projection, const ParametricFunction& reference, const Param& xi,
                       const SpatialGrid& quadrature) {
  const Vector un = projection.values_on(quadrature);
  double s = 0.0;
  for (std::size_t i = 0; i < quadrature.size(); ++i) {
    const double e = reference(quadrature[i], xi) - un[static_cast<Eigen::Index>(i)];
    s += quadrature.weights()[i] * e * e;
  }
  return std::sqrt(s);
}

/// Same, against reference values already sampled on the quadrature grid.
inline double l2_error(const Projection& projection, const Vector& reference_values, const SpatialGrid& quadrature) {
  const Vector un = projection.values_on(quadrature);
  double s = 0.0;
  for (std::size_t i = 0; i < quadrature.size(); ++i) {
    const double e = reference_values[static_cast<Eigen::Index>(i)] - un[static_cast<Eigen::Index>(i)];
    s += quadrature.weights()[i] * e * e;
  }
  return std::sqrt(s);
}

/// Projection of a target given on the basis grid with the chosen method.
/// min-res ignores the target and uses the problem instead.
inline Projection project(const ReducedBasis& basis, ProjectionMethod method, const Vector& target_on_grid,
                          const DiffusionProblem* problem = nullptr, const Param* xi = nullptr) {
  switch (method) {
    case ProjectionMethod::interp: return interpolate(basis, basis.at_magic_points(target_on_grid));
    case ProjectionMethod::least_squares: return least_squares(basis, target_on_grid);
    case ProjectionMethod::min_res:
      if (problem == nullptr || xi == nullptr) throw std::invalid_argument("min-res projection needs a problem");
      return min_res_projection(basis, *problem, *xi, basis.grid());
  }
  throw std::invalid_argument("unknown projection method");
}

// ---------------------------------------------------------------------------
// Export / import.
//
// snapshots.csv: grid_index,x,s0,...,s{n-1}
// basis.csv:     j,domain_lo,domain_hi,magic_index,magic_x,xi0,...,xi{p-1}
//
// Reloading replays add_snapshot in order, which recomputes every derived
// quantity with the same floating-point operations.

inline void export_basis(const ReducedBasis& basis, std::ostream& snapshots_os, std::ostream& basis_os) {
  const auto& grid = basis.grid();
  snapshots_os << "grid_index,x";
  for (std::size_t j = 0; j < basis.size(); ++j) snapshots_os << ",s" << j;
  snapshots_os << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    snapshots_os << i << ',' << csv::format(grid[i]);
    for (std::size_t j = 0; j < basis.size(); ++j)
      snapshots_os << ',' << csv::format(basis.snapshot(j)[static_cast<Eigen::Index>(i)]);
    snapshots_os << '\n';
  }
  const std::size_t p = basis.empty() ? 1 : basis.param(0).size();
  basis_os << "j,domain_lo,domain_hi,magic_index,magic_x";
  for (std::size_t d = 0; d < p; ++d) basis_os << ",xi" << d;
  basis_os << '\n';
  for (std::size_t j = 0; j < basis.size(); ++j) {
    basis_os << j << ',' << csv::format(grid.domain().lo) << ',' << csv::format(grid.domain().hi) << ','
             << basis.magic_point(j) << ',' << csv::format(grid[basis.magic_point(j)]);
    for (double v : basis.param(j)) basis_os << ',' << csv::format(v);
    basis_os << '\n';
  }
}

inline ReducedBasis import_basis(std::istream& snapshots_is, std::istream& basis_is, FunctionPtr snapshot_source = nullptr,
                                 double drop_tolerance = ReducedBasis::kDefaultDropTolerance) {
  const auto snaps = csv::read(snapshots_is);
  const auto meta = csv::read(basis_is);
  if (snaps.header.size() < 2 || snaps.rows.empty()) throw std::invalid_argument("basis import: empty snapshot table");
  const std::size_t n = snaps.header.size() - 2;
  if (meta.rows.size() != n) throw std::invalid_argument("basis import: metadata rows do not match snapshot columns");
  if (n == 0) throw std::invalid_argument("basis import: no snapshots");
  const Interval dom{csv::parse_double(meta.rows[0][1]), csv::parse_double(meta.rows[0][2])};
  std::vector<double> xs;
  for (const auto& row : snaps.rows) xs.push_back(csv::parse_double(row[1]));
  auto grid = std::make_shared<const SpatialGrid>(std::move(xs), dom);

  ReducedBasis basis(grid, std::move(snapshot_source), drop_tolerance);
  for (std::size_t j = 0; j < n; ++j) {
    Vector s(static_cast<Eigen::Index>(grid->size()));
    for (std::size_t i = 0; i < grid->size(); ++i) s[static_cast<Eigen::Index>(i)] = csv::parse_double(snaps.rows[i][j + 2]);
    Param xi;
    for (std::size_t c = 5; c < meta.rows[j].size(); ++c) xi.push_back(csv::parse_double(meta.rows[j][c]));
    basis = basis.add_snapshot(std::move(s), std::move(xi));
    if (basis.magic_point(j) != static_cast<std::size_t>(std::stoul(meta.rows[j][3])))
      throw std::invalid_argument("basis import: magic point mismatch at j=" + std::to_string(j));
  }
  return basis;
}

}  // namespace prbm
