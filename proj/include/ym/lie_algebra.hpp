#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

namespace ym {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;

/// Finite-dimensional matrix Lie algebra with an anti-Hermitian basis and
/// the bi-invariant inner product <X,Y> = -tr(XY).
class LieAlgebra {
public:
  LieAlgebra(int n, std::vector<Mat> basis, std::string name = "");

  int matrix_size() const { return n_; }
  int dim() const { return d_; }
  const std::string& name() const { return name_; }
  const Mat& basis(int a) const { return basis_[a]; }
  const Eigen::MatrixXd& gram() const { return ip_; }

  /// Structure constants f_{ab}^c with [e_a,e_b] = sum_c f_{ab}^c e_c.
  double structure(int a, int b, int c) const { return structure_[(a * d_ + b) * d_ + c]; }

  struct StructEntry {
    int a, b, c;
    double f;
  };
  const std::vector<StructEntry>& structure_nonzeros() const { return struct_nz_; }

  /// out = [x,y] on coefficient vectors (length dim()).
  void bracket_coeffs(const double* x, const double* y, double* out) const {
    for (int c = 0; c < d_; ++c) out[c] = 0.0;
    for (const StructEntry& e : struct_nz_) out[e.c] += e.f * x[e.a] * y[e.b];
  }
  /// out += s * [x,y].
  void bracket_coeffs_acc(const double* x, const double* y, double* out, double s = 1.0) const {
    for (const StructEntry& e : struct_nz_) out[e.c] += s * e.f * x[e.a] * y[e.b];
  }

  double inner(const Mat& x, const Mat& y) const;

  /// Coefficients of a matrix in the basis (Gram solve). Throws if the
  /// matrix is not in the span within `tol`.
  Vec coefficients(const Mat& x, double tol = 1e-9) const;

  Mat from_coefficients(const Vec& c) const;

  /// Orthogonal projection onto the algebra in coefficient form; no span
  /// check (used where discretization leaves small off-algebra parts).
  Vec project_coefficients(const Mat& x) const;

  /// Orthonormal basis of the centre under the inner product.
  const std::vector<Vec>& centre() const;
  int centre_dim() const { return static_cast<int>(centre().size()); }

  /// Orthogonal splitting X = X_Z + X_1 into centre and its complement.
  std::pair<Mat, Mat> centre_split(const Mat& x) const;

  Mat random_element(std::mt19937_64& rng, double scale = 1.0) const;

private:
  int n_;
  int d_;
  std::string name_;
  std::vector<Mat> basis_;
  Eigen::MatrixXd ip_;
  Eigen::LDLT<Eigen::MatrixXd> ip_solver_;
  std::vector<double> structure_;
  std::vector<StructEntry> struct_nz_;
  mutable bool centre_done_ = false;
  mutable std::vector<Vec> centre_;
};

/// Matrix commutator; checks closure when an algebra is supplied.
Mat bracket(const Mat& x, const Mat& y);

/// c(X,Y) = [X,[X,Y]].
Mat nested(const Mat& x, const Mat& y);

/// su(n) with the generalized Gell-Mann basis {iS_jk, iA_jk, iD_l},
/// D_l unnormalized.
LieAlgebra gell_mann_basis(int n);

/// u(n): su(n) basis extended with i*Id.
LieAlgebra unitary_algebra(int n);

/// Block-diagonal direct sum of two algebras.
LieAlgebra direct_sum(const LieAlgebra& a, const LieAlgebra& b);

struct SpanSamplingPolicy {
  int random_pairs = 0;
  std::uint64_t seed = 0;
};

/// Rank of span{ c(X,Y) } over all ordered basis pairs plus random pairs.
int nested_span_dimension(const LieAlgebra& alg, const SpanSamplingPolicy& policy = {});

/// Rank of span{ [e_a,e_b] } over all basis pairs (sanity baseline).
int bracket_span_dimension(const LieAlgebra& alg);

/// Right-hand side of D_l = D_{l-1} - (l/(2(l-1))) c(A_{l,l+1}, D_{l-1})
/// evaluated in floating point on su(n); callers compare against D_l.
Mat diagonal_recursion_rhs(int n, int l);

// Unnormalized Gell-Mann building blocks (without the factor i).
Mat gm_symmetric(int n, int j, int k);
Mat gm_antisymmetric(int n, int j, int k);
Mat gm_diagonal(int n, int l);

} // namespace ym
