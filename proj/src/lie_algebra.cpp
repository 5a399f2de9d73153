#include "ym/lie_algebra.hpp"

#include <Eigen/SVD>

namespace ym {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

LieAlgebra::LieAlgebra(int n, std::vector<Mat> basis, std::string name)
    : n_(n), d_(static_cast<int>(basis.size())), name_(std::move(name)), basis_(std::move(basis)) {
  if (n_ < 1 || d_ < 1) throw std::invalid_argument("LieAlgebra: empty basis");
  for (const Mat& e : basis_) {
    if (e.rows() != n_ || e.cols() != n_) throw std::invalid_argument("LieAlgebra: basis size mismatch");
    if ((e + e.adjoint()).norm() > 1e-10 * (1.0 + e.norm()))
      throw std::invalid_argument("LieAlgebra: basis matrix not anti-Hermitian");
  }
  ip_.resize(d_, d_);
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b) ip_(a, b) = inner(basis_[a], basis_[b]);
  ip_solver_.compute(ip_);
  if (ip_solver_.info() != Eigen::Success)
    throw std::invalid_argument("LieAlgebra: Gram matrix not factorizable");

  structure_.assign(static_cast<std::size_t>(d_) * d_ * d_, 0.0);
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b) {
      Vec c = coefficients(bracket(basis_[a], basis_[b]));
      for (int k = 0; k < d_; ++k) structure_[(a * d_ + b) * d_ + k] = c[k];
    }
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b)
      for (int c = 0; c < d_; ++c)
        if (std::abs(structure(a, b, c)) > 1e-12)
          struct_nz_.push_back({a, b, c, structure(a, b, c)});
}

double LieAlgebra::inner(const Mat& x, const Mat& y) const {
  return -(x * y).trace().real();
}

Vec LieAlgebra::coefficients(const Mat& x, double tol) const {
  Vec rhs(d_);
  for (int a = 0; a < d_; ++a) rhs[a] = inner(basis_[a], x);
  Vec c = ip_solver_.solve(rhs);
  Mat recon = from_coefficients(c);
  if ((recon - x).norm() > tol * (1.0 + x.norm()))
    throw std::runtime_error("LieAlgebra::coefficients: matrix outside span");
  return c;
}

Vec LieAlgebra::project_coefficients(const Mat& x) const {
  Vec rhs(d_);
  for (int a = 0; a < d_; ++a) rhs[a] = inner(basis_[a], x);
  return ip_solver_.solve(rhs);
}

Mat LieAlgebra::from_coefficients(const Vec& c) const {
  Mat x = Mat::Zero(n_, n_);
  for (int a = 0; a < d_; ++a) x += c[a] * basis_[a];
  return x;
}

const std::vector<Vec>& LieAlgebra::centre() const {
  if (centre_done_) return centre_;
  // X central iff [e_a, X] = 0 for all a; stack the ad matrices.
  Eigen::MatrixXd stacked(d_ * d_, d_);
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b)
      for (int c = 0; c < d_; ++c) stacked(a * d_ + c, b) = structure(a, b, c);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-9 * std::max(smax, 1.0)) ++rank;
  centre_.clear();
  // Gram-Schmidt the nullspace columns under the algebra inner product.
  for (int i = rank; i < d_; ++i) {
    Vec v = svd.matrixV().col(i);
    for (const Vec& u : centre_) v -= (u.dot(ip_ * v)) * u;
    double norm = std::sqrt(v.dot(ip_ * v));
    if (norm > 1e-12) centre_.push_back(v / norm);
  }
  centre_done_ = true;
  return centre_;
}

std::pair<Mat, Mat> LieAlgebra::centre_split(const Mat& x) const {
  Vec c = coefficients(x);
  Vec cz = Vec::Zero(d_);
  for (const Vec& u : centre()) cz += (u.dot(ip_ * c)) * u;
  return {from_coefficients(cz), from_coefficients(c - cz)};
}

Mat LieAlgebra::random_element(std::mt19937_64& rng, double scale) const {
  std::normal_distribution<double> gauss(0.0, scale);
  Vec c(d_);
  for (int a = 0; a < d_; ++a) c[a] = gauss(rng);
  return from_coefficients(c);
}

Mat bracket(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows()) throw std::invalid_argument("bracket: dimension mismatch");
  return x * y - y * x;
}

Mat nested(const Mat& x, const Mat& y) { return bracket(x, bracket(x, y)); }

Mat gm_symmetric(int n, int j, int k) {
  Mat m = Mat::Zero(n, n);
  m(j, k) = 1.0;
  m(k, j) = 1.0;
  return m;
}

Mat gm_antisymmetric(int n, int j, int k) {
  Mat m = Mat::Zero(n, n);
  m(j, k) = -kI;
  m(k, j) = kI;
  return m;
}

Mat gm_diagonal(int n, int l) {
  Mat m = Mat::Zero(n, n);
  for (int j = 0; j < l; ++j) m(j, j) = 1.0;
  m(l, l) = -static_cast<double>(l);
  return m;
}

LieAlgebra gell_mann_basis(int n) {
  if (n < 2) throw std::invalid_argument("gell_mann_basis: n must be >= 2");
  std::vector<Mat> basis;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) basis.push_back(kI * gm_symmetric(n, j, k));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) basis.push_back(kI * gm_antisymmetric(n, j, k));
  for (int l = 1; l < n; ++l) basis.push_back(kI * gm_diagonal(n, l));
  return LieAlgebra(n, std::move(basis), "su(" + std::to_string(n) + ")");
}

LieAlgebra unitary_algebra(int n) {
  std::vector<Mat> basis;
  if (n >= 2) {
    LieAlgebra su = gell_mann_basis(n);
    for (int a = 0; a < su.dim(); ++a) basis.push_back(su.basis(a));
  }
  basis.push_back(kI * Mat::Identity(n, n));
  return LieAlgebra(n, std::move(basis), "u(" + std::to_string(n) + ")");
}

LieAlgebra direct_sum(const LieAlgebra& a, const LieAlgebra& b) {
  int n = a.matrix_size() + b.matrix_size();
  std::vector<Mat> basis;
  for (int i = 0; i < a.dim(); ++i) {
    Mat m = Mat::Zero(n, n);
    m.topLeftCorner(a.matrix_size(), a.matrix_size()) = a.basis(i);
    basis.push_back(m);
  }
  for (int i = 0; i < b.dim(); ++i) {
    Mat m = Mat::Zero(n, n);
    m.bottomRightCorner(b.matrix_size(), b.matrix_size()) = b.basis(i);
    basis.push_back(m);
  }
  return LieAlgebra(n, std::move(basis), a.name() + "+" + b.name());
}

namespace {
int rank_of_span(const LieAlgebra& alg, const std::vector<Mat>& elems) {
  Eigen::MatrixXd columns(alg.dim(), elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i) columns.col(i) = alg.coefficients(elems[i]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns);
  double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-9 * std::max(smax, 1.0)) ++rank;
  return rank;
}
} // namespace

int nested_span_dimension(const LieAlgebra& alg, const SpanSamplingPolicy& policy) {
  std::vector<Mat> elems;
  for (int a = 0; a < alg.dim(); ++a)
    for (int b = 0; b < alg.dim(); ++b)
      if (a != b) elems.push_back(nested(alg.basis(a), alg.basis(b)));
  std::mt19937_64 rng(policy.seed);
  for (int i = 0; i < policy.random_pairs; ++i)
    elems.push_back(nested(alg.random_element(rng), alg.random_element(rng)));
  return rank_of_span(alg, elems);
}

int bracket_span_dimension(const LieAlgebra& alg) {
  std::vector<Mat> elems;
  for (int a = 0; a < alg.dim(); ++a)
    for (int b = a + 1; b < alg.dim(); ++b) elems.push_back(bracket(alg.basis(a), alg.basis(b)));
  return rank_of_span(alg, elems);
}

Mat diagonal_recursion_rhs(int n, int l) {
  if (n < 3 || l < 2 || l > n - 1) throw std::out_of_range("diagonal_recursion_rhs: need n >= 3, 2 <= l <= n-1");
  // Matrices carry the factor i to stay in su(n); c is quadratic in the first
  // argument so the two i factors contribute i^2 = -1, compensated below.
  Mat d_prev = kI * gm_diagonal(n, l - 1);
  Mat a_next = kI * gm_antisymmetric(n, l - 1, l);
  double coeff = static_cast<double>(l) / (2.0 * (l - 1));
  return d_prev + coeff * nested(a_next, d_prev);
}

} // namespace ym
