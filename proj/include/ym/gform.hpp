#pragma once

#include "ym/grid.hpp"
#include "ym/lie_algebra.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <span>

namespace ym {

// Minkowski metric diag(-1,1,1,1); raising an index multiplies by metric_sign.
inline constexpr double metric_sign(int alpha) { return alpha == 0 ? -1.0 : 1.0; }

/// Lie-algebra-valued function on a grid, stored as coefficient vectors.
class AlgebraField {
public:
  AlgebraField() = default;
  AlgebraField(const Grid& grid, const LieAlgebra& alg)
      : grid_(&grid), alg_(&alg), data_(grid.size() * alg.dim(), 0.0) {}

  const Grid& grid() const { return *grid_; }
  const LieAlgebra& algebra() const { return *alg_; }
  int dim() const { return alg_->dim(); }

  double* at(std::size_t p) { return data_.data() + p * alg_->dim(); }
  const double* at(std::size_t p) const { return data_.data() + p * alg_->dim(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double max_norm() const;

  AlgebraField& operator+=(const AlgebraField& o);
  AlgebraField& operator-=(const AlgebraField& o);
  AlgebraField& operator*=(double s);
  friend AlgebraField operator+(AlgebraField a, const AlgebraField& b) { return a += b; }
  friend AlgebraField operator-(AlgebraField a, const AlgebraField& b) { return a -= b; }
  friend AlgebraField operator*(double s, AlgebraField a) { return a *= s; }

private:
  const Grid* grid_ = nullptr;
  const LieAlgebra* alg_ = nullptr;
  std::vector<double> data_;
};

/// Partial derivative along an axis: centered 2nd order inside, one-sided
/// 2nd order at the faces.
AlgebraField partial(const AlgebraField& f, int axis);

/// Pointwise bracket [f,g].
AlgebraField pointwise_bracket(const AlgebraField& f, const AlgebraField& g);

/// Multi-index utilities for degree-k forms on 4 axes, strictly increasing
/// storage order (lexicographic).
int binomial4(int k);
const std::vector<std::array<int, 4>>& multi_indices(int k); // entries padded with -1
int multi_index_position(int k, std::span<const int> sorted);
/// Position and permutation sign of an arbitrary index tuple; sign 0 when
/// an index repeats.
std::pair<int, int> locate_component(int k, std::span<const int> indices);

/// g-valued differential form of degree k on a grid.
class GForm {
public:
  GForm() = default;
  GForm(int degree, const Grid& grid, const LieAlgebra& alg);

  int degree() const { return degree_; }
  int component_count() const { return static_cast<int>(comps_.size()); }
  const Grid& grid() const { return comps_.at(0).grid(); }
  const LieAlgebra& algebra() const { return comps_.at(0).algebra(); }

  AlgebraField& component(int i) { return comps_.at(i); }
  const AlgebraField& component(int i) const { return comps_.at(i); }

  /// Component for an arbitrary index tuple; returns (field pointer, sign).
  std::pair<const AlgebraField*, int> component_signed(std::span<const int> indices) const;

  double max_norm() const;
  double max_norm_interior() const;
  double max_norm_where(const std::vector<bool>& mask) const;

  GForm& operator+=(const GForm& o);
  GForm& operator-=(const GForm& o);
  GForm& operator*=(double s);
  friend GForm operator+(GForm a, const GForm& b) { return a += b; }
  friend GForm operator-(GForm a, const GForm& b) { return a -= b; }
  friend GForm operator*(double s, GForm a) { return a *= s; }

  /// Sample a closed-form field: fn(point, component multi-index) -> coeffs.
  using Sampler = std::function<Vec(const std::array<double, 4>&, std::span<const int>)>;
  static GForm sample(int degree, const Grid& grid, const LieAlgebra& alg, const Sampler& fn);

private:
  int degree_ = 0;
  std::vector<AlgebraField> comps_;
};

/// Connection: 1-form A with cached curvature F_A = dA + [A,A]/2.
class Connection {
public:
  explicit Connection(GForm a);
  const GForm& a() const { return a_; }
  const GForm& curvature() const { return f_; }
  const Grid& grid() const { return a_.grid(); }
  const LieAlgebra& algebra() const { return a_.algebra(); }

private:
  GForm a_;
  GForm f_;
};

// Exterior calculus operations.
GForm d(const GForm& w);
GForm graded_bracket(const GForm& w, const GForm& e);
GForm hodge_star(const GForm& w);
GForm covariant_d(const Connection& A, const GForm& w);
/// Coordinate-formula d_A* for degrees 1 and 2 (Appendix-style formulas).
GForm covariant_d_star(const Connection& A, const GForm& w);
/// Composition path star(d_A(star w)) for cross-checking.
GForm covariant_d_star_composed(const Connection& A, const GForm& w);
GForm curvature_of(const GForm& a);
/// Yang-Mills residual d_A* F_A via the closed-form component expression.
GForm ym_residual(const Connection& A);
/// star[X, star Y] for X 1-form, Y 2-form, coordinate formula.
GForm star_bracket_star(const GForm& x, const GForm& y);

struct IdentityReport {
  double dastar_bracket = 0.0; // d_A*[X,Z] expansion residual
  double wstardaw = 0.0;       // star[X, star d_A Z] residual
  double cubic = 0.0;          // star[X, star [Y,Z]] residual (derivative-free)
};
/// Max-norm residuals of the three bilinear/trilinear expansion identities.
IdentityReport expansion_identities(const GForm& x, const GForm& y, const GForm& z,
                                    const Connection& A);

/// One CSV per component: rows (t_idx,x_idx,y_idx,z_idx,coeff_1..coeff_d).
void write_component_csv(const GForm& w, int comp, std::ostream& os);

} // namespace ym
