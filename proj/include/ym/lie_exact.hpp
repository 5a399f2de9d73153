#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <vector>

namespace ym::exact {

using Rational = boost::multiprecision::cpp_rational;

/// Complex rational, enough for exact Gell-Mann matrix identities.
struct CRat {
  Rational re{0};
  Rational im{0};
  friend CRat operator+(const CRat& a, const CRat& b) { return {a.re + b.re, a.im + b.im}; }
  friend CRat operator-(const CRat& a, const CRat& b) { return {a.re - b.re, a.im - b.im}; }
  friend CRat operator*(const CRat& a, const CRat& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const CRat& a, const CRat& b) { return a.re == b.re && a.im == b.im; }
};

class Matrix {
public:
  Matrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n) {}
  int size() const { return n_; }
  CRat& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  const CRat& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix r(a.n_);
    for (int i = 0; i < a.n_; ++i)
      for (int k = 0; k < a.n_; ++k)
        for (int j = 0; j < a.n_; ++j) r(i, j) = r(i, j) + a(i, k) * b(k, j);
    return r;
  }
  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix r(a.n_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = a.data_[i] + b.data_[i];
    return r;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix r(a.n_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = a.data_[i] - b.data_[i];
    return r;
  }
  friend Matrix operator*(const Rational& s, const Matrix& a) {
    Matrix r(a.n_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = CRat{s, 0} * a.data_[i];
    return r;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) { return a.data_ == b.data_; }

  bool is_zero() const {
    for (const CRat& c : data_)
      if (!(c == CRat{})) return false;
    return true;
  }

private:
  int n_;
  std::vector<CRat> data_;
};

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }
inline Matrix nested(const Matrix& a, const Matrix& b) { return commutator(a, commutator(a, b)); }

// Plain (no factor i) generalized Gell-Mann matrices, 0-based indices.
inline Matrix sym(int n, int j, int k) {
  Matrix m(n);
  m(j, k) = {1, 0};
  m(k, j) = {1, 0};
  return m;
}
inline Matrix antisym(int n, int j, int k) {
  Matrix m(n);
  m(j, k) = {0, -1};
  m(k, j) = {0, 1};
  return m;
}
inline Matrix diag(int n, int l) {
  Matrix m(n);
  for (int j = 0; j < l; ++j) m(j, j) = {1, 0};
  m(l, l) = {Rational(-l), 0};
  return m;
}

/// Exact check of D_l = D_{l-1} - (l/(2(l-1))) c(A_{l,l+1}, D_{l-1}).
inline bool diagonal_recursion_holds(int n, int l) {
  if (n < 3 || l < 2 || l > n - 1) throw std::out_of_range("diagonal_recursion_holds: bad (n,l)");
  Matrix rhs = diag(n, l - 1) - Rational(l) / (2 * (l - 1)) * nested(antisym(n, l - 1, l), diag(n, l - 1));
  return rhs == diag(n, l);
}

} // namespace ym::exact
