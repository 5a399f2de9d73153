#pragma once

#include "ym/transport.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <string>

namespace ym {

using Rat = boost::multiprecision::cpp_rational;

/// Polynomial in r with exact rational coefficients, ascending order.
class RatPoly {
public:
  RatPoly() = default;
  explicit RatPoly(Rat constant);
  static RatPoly variable(); // the polynomial r

  int degree() const { return static_cast<int>(c_.size()) - 1; } // -1 for zero
  bool is_zero() const { return c_.empty(); }
  const Rat& coeff(int k) const;
  Rat lead() const;

  RatPoly& operator+=(const RatPoly& o);
  RatPoly& operator-=(const RatPoly& o);
  friend RatPoly operator+(RatPoly a, const RatPoly& b) { return a += b; }
  friend RatPoly operator-(RatPoly a, const RatPoly& b) { return a -= b; }
  friend RatPoly operator*(const RatPoly& a, const RatPoly& b);
  friend bool operator==(const RatPoly& a, const RatPoly& b) { return a.c_ == b.c_; }

  RatPoly scaled(const Rat& s) const;
  /// Quotient and remainder; divisor must be nonzero.
  static std::pair<RatPoly, RatPoly> divmod(const RatPoly& a, const RatPoly& b);
  /// Exact division; throws when the remainder is nonzero.
  static RatPoly div_exact(const RatPoly& a, const RatPoly& b);
  static RatPoly gcd(RatPoly a, RatPoly b); // monic

  double eval(double r) const;

private:
  void trim();
  std::vector<Rat> c_;
};

/// Element of K = Frac(Q[r, a_r] / (a_r^2 + r^2 - 1)), stored as
/// (p + q a_r) / d with polynomials p, q, d in r, gcd-reduced, d monic.
class FieldElem {
public:
  FieldElem(); // zero
  explicit FieldElem(Rat constant);
  FieldElem(RatPoly p, RatPoly q, RatPoly d);
  static FieldElem r();
  static FieldElem a_r();

  bool is_zero() const;
  FieldElem& operator+=(const FieldElem& o);
  FieldElem& operator-=(const FieldElem& o);
  friend FieldElem operator+(FieldElem a, const FieldElem& b) { return a += b; }
  friend FieldElem operator-(FieldElem a, const FieldElem& b) { return a -= b; }
  friend FieldElem operator*(const FieldElem& a, const FieldElem& b);
  friend bool operator==(const FieldElem& a, const FieldElem& b) { return (a - b).is_zero(); }
  FieldElem inverse() const; // throws on zero
  friend FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * b.inverse(); }
  FieldElem operator-() const;

  double eval(double r) const; // a_r = sqrt(1 - r^2)

private:
  void reduce();
  RatPoly p_, q_, d_;
};

/// Truncated Laurent series sum_m c_m s^m with coefficients in K.
/// Coefficients are valid for exponents <= trunc(); arithmetic tracks the
/// validity window conservatively. Exponents below -4 are rejected.
class SymScalar {
public:
  static constexpr int kExact = 1 << 20;

  SymScalar() = default; // zero, exact
  explicit SymScalar(FieldElem constant);
  explicit SymScalar(Rat constant);
  static SymScalar monomial(FieldElem coeff, int power);
  /// Taylor series of a(s) = sqrt(1 - s^2) through order n.
  static SymScalar a_of_s(int n);

  int trunc() const { return trunc_; }
  /// Order of the leading nonzero coefficient; kExact when zero.
  int min_order() const;
  bool is_zero() const { return c_.empty(); }
  /// Coefficient of s^m; throws when m exceeds the validity window.
  FieldElem coeff(int m) const;

  SymScalar& operator+=(const SymScalar& o);
  SymScalar& operator-=(const SymScalar& o);
  friend SymScalar operator+(SymScalar a, const SymScalar& b) { return a += b; }
  friend SymScalar operator-(SymScalar a, const SymScalar& b) { return a -= b; }
  friend SymScalar operator*(const SymScalar& a, const SymScalar& b);
  SymScalar operator-() const;
  SymScalar inverse() const;
  friend SymScalar operator/(const SymScalar& a, const SymScalar& b) { return a * b.inverse(); }

  double eval(double r, double s) const;

private:
  void set(int m, FieldElem v);
  std::map<int, FieldElem> c_;
  int trunc_ = kExact;
};

/// Covector with SymScalar components, signature (-+++).
struct CovectorSym {
  std::array<SymScalar, 4> c;
  SymScalar& operator[](int i) { return c[i]; }
  const SymScalar& operator[](int i) const { return c[i]; }
};

SymScalar minkowski_p(const CovectorSym& xi);

// The lightlike covector geometry: eta = (1, -a(r), r, 0),
// xi_1 = (1,1,0,0), xi_2 = (1, a(s), s, 0), xi_3 = (1, a(s), -s, 0).
CovectorSym eta_covector();
CovectorSym xi_covector(int k, int n); // k = 1,2,3; series order n
/// Source covectors: omega_1 = dx^2, omega_k = (-1)^k s dx^0 + dx^2.
CovectorSym omega_covector(int k);

/// kappa_1, kappa_2, kappa_3 with eta = sum_k kappa_k xi_k.
std::array<SymScalar, 3> kappas(int n);

/// Normalized Lie monomial over abstract generators b_0, b_1, b_2:
/// degree 1 (b_i), degree 2 ([b_i, b_j], i < j), degree 3 ([b_u, [b_v, b_w]],
/// v < w). Generators are 0-based.
struct Mono {
  int deg = 1;
  std::array<int, 3> g{0, -1, -1};
  friend bool operator<(const Mono& a, const Mono& b) {
    return std::tie(a.deg, a.g) < std::tie(b.deg, b.g);
  }
  friend bool operator==(const Mono& a, const Mono& b) = default;
};

/// Linear combination of normalized monomials with SymScalar coefficients.
class BracketExpr {
public:
  BracketExpr() = default;
  static BracketExpr generator(int i);

  void add(const Mono& m, const SymScalar& coeff);
  const std::map<Mono, SymScalar>& terms() const { return terms_; }
  SymScalar coeff_of(const Mono& m) const;
  bool is_zero() const;

  BracketExpr& operator+=(const BracketExpr& o);
  BracketExpr& operator-=(const BracketExpr& o);
  friend BracketExpr operator+(BracketExpr a, const BracketExpr& b) { return a += b; }
  friend BracketExpr operator-(BracketExpr a, const BracketExpr& b) { return a -= b; }
  friend BracketExpr operator*(const SymScalar& s, const BracketExpr& x);

  /// Rewrites [b_2, [b_0, b_1]] -> -[b_0, [b_1, b_2]] + [b_1, [b_0, b_2]]
  /// (Jacobi), leaving the designated two-element degree-3 basis.
  BracketExpr jacobi_reduced() const;
  /// Substitute generator `from` by `to` and renormalize.
  BracketExpr substitute(int from, int to) const;

private:
  void prune();
  std::map<Mono, SymScalar> terms_;
};

/// Lie bracket, defined for results of degree <= 3.
BracketExpr bracket(const BracketExpr& a, const BracketExpr& b);

/// 1-form-valued symbol: 4 components.
struct SymbolVector {
  std::array<BracketExpr, 4> comp;
  BracketExpr& operator[](int i) { return comp[i]; }
  const BracketExpr& operator[](int i) const { return comp[i]; }
};

/// One-fold hatted symbol: Yhat_k = b_k omega_k.
SymbolVector one_fold_symbol(int k);

/// Two-fold hatted symbol Yhat_(kl) via the displayed contraction formula,
/// including the p^{-1}(eta_(kl)) prefactor.
SymbolVector two_fold_symbol(int k, int l, int n);

/// Three-fold hatted symbol: the S3-symmetrized contraction of one- and
/// two-fold symbols; with include_cubic, adds the 4[Y,[Y,Y]] terms and
/// verifies they are of order >= 1 in s for beta = 0, 1.
SymbolVector three_fold_symbol(bool include_cubic, int n);

/// Asserts components 0 and 1 agree, Jacobi-reduces, asserts the pole part
/// vanishes exactly, and returns the s^0 part.
BracketExpr jacobi_limit(const SymbolVector& sym);

/// Components beta = 1..3 of sym_beta - (eta_beta / eta_0) sym_0.
SymbolVector temporal_symbol_transform(const SymbolVector& sym, const CovectorSym& eta);

/// Numeric bridge to matrix transports: evaluates expr with generators
/// transported x -> y in the adjoint representation, then transports the
/// value y -> z. Also reports the bracket-compatibility residual
/// ||[Pb_0, Pb_1] - P[b_0, b_1]||.
struct BridgeResult {
  Mat value;
  double pt_product_residual = 0.0;
};
BridgeResult symbol_transport_bridge(const ConnectionSampler& A, const BrokenTriple& triple,
                                     const BracketExpr& expr, const std::array<Mat, 3>& gens,
                                     double r, double s, int steps);

} // namespace ym
