#include "ym/symbols.hpp"

#include <stdexcept>

namespace ym {

// ---------------------------------------------------------------- RatPoly

RatPoly::RatPoly(Rat constant) {
  if (constant != 0) c_.push_back(std::move(constant));
}

RatPoly RatPoly::variable() {
  RatPoly p;
  p.c_ = {Rat(0), Rat(1)};
  return p;
}

const Rat& RatPoly::coeff(int k) const {
  static const Rat zero(0);
  if (k < 0 || k >= static_cast<int>(c_.size())) return zero;
  return c_[k];
}

Rat RatPoly::lead() const { return c_.empty() ? Rat(0) : c_.back(); }

void RatPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

RatPoly& RatPoly::operator+=(const RatPoly& o) {
  if (c_.size() < o.c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

RatPoly& RatPoly::operator-=(const RatPoly& o) {
  if (c_.size() < o.c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

RatPoly operator*(const RatPoly& a, const RatPoly& b) {
  RatPoly out;
  if (a.is_zero() || b.is_zero()) return out;
  out.c_.assign(a.c_.size() + b.c_.size() - 1, Rat(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
  out.trim();
  return out;
}

RatPoly RatPoly::scaled(const Rat& s) const {
  RatPoly out = *this;
  for (auto& c : out.c_) c *= s;
  out.trim();
  return out;
}

std::pair<RatPoly, RatPoly> RatPoly::divmod(const RatPoly& a, const RatPoly& b) {
  if (b.is_zero()) throw std::invalid_argument("RatPoly: division by zero");
  RatPoly rem = a, quot;
  quot.c_.assign(std::max<int>(a.degree() - b.degree() + 1, 0), Rat(0));
  while (!rem.is_zero() && rem.degree() >= b.degree()) {
    int k = rem.degree() - b.degree();
    Rat f = rem.lead() / b.lead();
    quot.c_[k] += f;
    for (int i = 0; i <= b.degree(); ++i) rem.c_[i + k] -= f * b.c_[i];
    rem.trim();
  }
  quot.trim();
  return {quot, rem};
}

RatPoly RatPoly::div_exact(const RatPoly& a, const RatPoly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw std::logic_error("RatPoly: inexact division");
  return q;
}

RatPoly RatPoly::gcd(RatPoly a, RatPoly b) {
  while (!b.is_zero()) {
    RatPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.is_zero()) a = a.scaled(Rat(1) / a.lead());
  return a;
}

double RatPoly::eval(double r) const {
  double v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * r + it->convert_to<double>();
  return v;
}

// --------------------------------------------------------------- FieldElem

FieldElem::FieldElem() : d_(Rat(1)) {}
FieldElem::FieldElem(Rat constant) : p_(std::move(constant)), d_(Rat(1)) {}
FieldElem::FieldElem(RatPoly p, RatPoly q, RatPoly d)
    : p_(std::move(p)), q_(std::move(q)), d_(std::move(d)) {
  if (d_.is_zero()) throw std::invalid_argument("FieldElem: zero denominator");
  reduce();
}

FieldElem FieldElem::r() { return FieldElem(RatPoly::variable(), RatPoly(), RatPoly(Rat(1))); }
FieldElem FieldElem::a_r() { return FieldElem(RatPoly(), RatPoly(Rat(1)), RatPoly(Rat(1))); }

bool FieldElem::is_zero() const { return p_.is_zero() && q_.is_zero(); }

void FieldElem::reduce() {
  RatPoly g = RatPoly::gcd(RatPoly::gcd(p_, q_), d_);
  if (!g.is_zero() && g.degree() > 0) {
    p_ = RatPoly::div_exact(p_, g);
    q_ = RatPoly::div_exact(q_, g);
    d_ = RatPoly::div_exact(d_, g);
  }
  Rat l = d_.lead();
  if (l != 1) {
    Rat inv = Rat(1) / l;
    p_ = p_.scaled(inv);
    q_ = q_.scaled(inv);
    d_ = d_.scaled(inv);
  }
}

FieldElem& FieldElem::operator+=(const FieldElem& o) {
  p_ = p_ * o.d_ + o.p_ * d_;
  q_ = q_ * o.d_ + o.q_ * d_;
  d_ = d_ * o.d_;
  reduce();
  return *this;
}

FieldElem& FieldElem::operator-=(const FieldElem& o) { return *this += -o; }

FieldElem FieldElem::operator-() const {
  FieldElem out = *this;
  out.p_ = out.p_.scaled(Rat(-1));
  out.q_ = out.q_.scaled(Rat(-1));
  return out;
}

FieldElem operator*(const FieldElem& a, const FieldElem& b) {
  // a_r^2 reduces to 1 - r^2
  RatPoly one_m_r2;
  one_m_r2 += RatPoly(Rat(1));
  one_m_r2 -= RatPoly::variable() * RatPoly::variable();
  RatPoly p = a.p_ * b.p_ + (a.q_ * b.q_) * one_m_r2;
  RatPoly q = a.p_ * b.q_ + a.q_ * b.p_;
  return FieldElem(std::move(p), std::move(q), a.d_ * b.d_);
}

FieldElem FieldElem::inverse() const {
  if (is_zero()) throw std::invalid_argument("FieldElem: inverse of zero");
  // 1 / ((p + q a)/d) = d (p - q a) / (p^2 - q^2 (1 - r^2))
  RatPoly one_m_r2;
  one_m_r2 += RatPoly(Rat(1));
  one_m_r2 -= RatPoly::variable() * RatPoly::variable();
  RatPoly den = p_ * p_ - (q_ * q_) * one_m_r2;
  if (den.is_zero()) throw std::logic_error("FieldElem: norm vanished (not a field element)");
  return FieldElem(d_ * p_, (d_ * q_).scaled(Rat(-1)), std::move(den));
}

double FieldElem::eval(double r) const {
  double a = std::sqrt(std::max(1.0 - r * r, 0.0));
  return (p_.eval(r) + q_.eval(r) * a) / d_.eval(r);
}

// --------------------------------------------------------------- SymScalar

SymScalar::SymScalar(FieldElem constant) { set(0, std::move(constant)); }
SymScalar::SymScalar(Rat constant) { set(0, FieldElem(std::move(constant))); }

SymScalar SymScalar::monomial(FieldElem coeff, int power) {
  SymScalar out;
  out.set(power, std::move(coeff));
  return out;
}

void SymScalar::set(int m, FieldElem v) {
  if (v.is_zero()) return;
  if (m < -4) throw std::logic_error("SymScalar: pole deeper than s^-4");
  c_[m] = std::move(v);
}

SymScalar SymScalar::a_of_s(int n) {
  // (1 - s^2)^{1/2} = sum_k binom(1/2, k) (-s^2)^k
  SymScalar out;
  out.trunc_ = n;
  Rat binom(1);
  for (int k = 0; 2 * k <= n; ++k) {
    if (k > 0) binom *= (Rat(1, 2) - (k - 1)) / k;
    Rat c = binom * ((k % 2 == 0) ? 1 : -1);
    out.set(2 * k, FieldElem(c));
  }
  return out;
}

int SymScalar::min_order() const { return c_.empty() ? kExact : c_.begin()->first; }

FieldElem SymScalar::coeff(int m) const {
  if (m > trunc_)
    throw std::runtime_error(
        "SymScalar: Laurent truncation insufficient for the requested order; "
        "increase the series order N");
  auto it = c_.find(m);
  return it == c_.end() ? FieldElem() : it->second;
}

SymScalar& SymScalar::operator+=(const SymScalar& o) {
  trunc_ = std::min(trunc_, o.trunc_);
  for (const auto& [m, v] : o.c_) {
    auto it = c_.find(m);
    if (it == c_.end())
      c_[m] = v;
    else {
      it->second += v;
      if (it->second.is_zero()) c_.erase(it);
    }
  }
  std::erase_if(c_, [&](const auto& kv) { return kv.first > trunc_; });
  return *this;
}

SymScalar& SymScalar::operator-=(const SymScalar& o) { return *this += -o; }

SymScalar SymScalar::operator-() const {
  SymScalar out = *this;
  for (auto& [m, v] : out.c_) v = -v;
  return out;
}

SymScalar operator*(const SymScalar& a, const SymScalar& b) {
  SymScalar out;
  if (a.c_.empty() || b.c_.empty()) {
    // zero times anything: validity limited by the zero's own window and
    // the other factor's leading order
    long t = std::min<long>({SymScalar::kExact,
                             static_cast<long>(a.trunc_) + b.min_order(),
                             static_cast<long>(b.trunc_) + a.min_order()});
    out.trunc_ = static_cast<int>(std::min<long>(t, SymScalar::kExact));
    return out;
  }
  long t = std::min<long>(static_cast<long>(a.trunc_) + b.min_order(),
                          static_cast<long>(b.trunc_) + a.min_order());
  out.trunc_ = static_cast<int>(std::min<long>(t, SymScalar::kExact));
  for (const auto& [ma, va] : a.c_)
    for (const auto& [mb, vb] : b.c_) {
      int m = ma + mb;
      if (m > out.trunc_) continue;
      FieldElem prod = va * vb;
      auto it = out.c_.find(m);
      if (it == out.c_.end()) {
        if (m < -4) throw std::logic_error("SymScalar: pole deeper than s^-4");
        if (!prod.is_zero()) out.c_[m] = std::move(prod);
      } else {
        it->second += prod;
        if (it->second.is_zero()) out.c_.erase(it);
      }
    }
  return out;
}

SymScalar SymScalar::inverse() const {
  if (c_.empty()) {
    // A finite window with no visible coefficient cannot be distinguished
    // from a series whose leading order lies beyond the truncation.
    if (trunc_ != kExact)
      throw std::runtime_error(
          "SymScalar: Laurent truncation insufficient to invert; "
          "increase the series order N");
    throw std::invalid_argument("SymScalar: inverse of zero");
  }
  const int m0 = min_order();
  // x = s^m0 (u_0 + u_1 s + ...); u^{-1} by the standard recurrence
  int rel;
  if (trunc_ == kExact)
    rel = (c_.size() == 1) ? 0 : 24; // polynomial input: truncate the inverse
  else
    rel = trunc_ - m0;
  FieldElem u0 = c_.begin()->second;
  FieldElem inv0 = u0.inverse();
  std::vector<FieldElem> u(rel + 1), v(rel + 1);
  for (const auto& [m, c] : c_)
    if (m - m0 <= rel) u[m - m0] = c * inv0;
  v[0] = FieldElem(Rat(1));
  for (int n = 1; n <= rel; ++n) {
    FieldElem acc;
    for (int k = 1; k <= n; ++k) acc += u[k] * v[n - k];
    v[n] = -acc;
  }
  SymScalar out;
  out.trunc_ = (trunc_ == kExact && c_.size() == 1) ? kExact : rel - m0;
  for (int n = 0; n <= rel; ++n) {
    FieldElem c = v[n] * inv0;
    if (!c.is_zero()) out.set(n - m0, std::move(c));
  }
  return out;
}

double SymScalar::eval(double r, double s) const {
  double v = 0.0;
  for (const auto& [m, c] : c_) v += c.eval(r) * std::pow(s, m);
  return v;
}

// ------------------------------------------------------------- covectors

SymScalar minkowski_p(const CovectorSym& xi) {
  SymScalar out = -(xi[0] * xi[0]);
  for (int i = 1; i < 4; ++i) out += xi[i] * xi[i];
  return out;
}

CovectorSym eta_covector() {
  CovectorSym e;
  e[0] = SymScalar(Rat(1));
  e[1] = SymScalar(-FieldElem::a_r());
  e[2] = SymScalar(FieldElem::r());
  return e;
}

CovectorSym xi_covector(int k, int n) {
  CovectorSym x;
  x[0] = SymScalar(Rat(1));
  switch (k) {
    case 1: x[1] = SymScalar(Rat(1)); break;
    case 2:
      x[1] = SymScalar::a_of_s(n);
      x[2] = SymScalar::monomial(FieldElem(Rat(1)), 1);
      break;
    case 3:
      x[1] = SymScalar::a_of_s(n);
      x[2] = SymScalar::monomial(FieldElem(Rat(-1)), 1);
      break;
    default: throw std::invalid_argument("xi_covector: k must be 1, 2 or 3");
  }
  return x;
}

CovectorSym omega_covector(int k) {
  CovectorSym w;
  w[2] = SymScalar(Rat(1));
  if (k == 2)
    w[0] = SymScalar::monomial(FieldElem(Rat(1)), 1);
  else if (k == 3)
    w[0] = SymScalar::monomial(FieldElem(Rat(-1)), 1);
  else if (k != 1)
    throw std::invalid_argument("omega_covector: k must be 1, 2 or 3");
  return w;
}

std::array<SymScalar, 3> kappas(int n) {
  SymScalar one(Rat(1));
  SymScalar one_m_as = one - SymScalar::a_of_s(n);
  SymScalar inv = one_m_as.inverse();
  SymScalar one_p_ar(FieldElem(Rat(1)) + FieldElem::a_r());
  SymScalar half_r_over_s = SymScalar::monomial(FieldElem::r() * FieldElem(Rat(1, 2)), -1);
  SymScalar common = SymScalar(FieldElem(Rat(1, 2))) * one_p_ar * inv;
  std::array<SymScalar, 3> k;
  k[0] = one - one_p_ar * inv;
  k[1] = common + half_r_over_s;
  k[2] = common - half_r_over_s;
  return k;
}

// ------------------------------------------------------------ BracketExpr

namespace {

// canonical form of a raw monomial, with sign; deg 2 input (i, j), deg 3
// input (u, (v, w)); returns sign 0 when the monomial vanishes
std::pair<Mono, int> canon2(int i, int j) {
  if (i == j) return {{}, 0};
  if (i < j) return {Mono{2, {i, j, -1}}, 1};
  return {Mono{2, {j, i, -1}}, -1};
}

std::pair<Mono, int> canon3(int u, int v, int w) {
  if (v == w) return {{}, 0};
  int sign = 1;
  if (v > w) {
    std::swap(v, w);
    sign = -1;
  }
  return {Mono{3, {u, v, w}}, sign};
}

} // namespace

BracketExpr BracketExpr::generator(int i) {
  BracketExpr e;
  e.add(Mono{1, {i, -1, -1}}, SymScalar(Rat(1)));
  return e;
}

void BracketExpr::add(const Mono& m, const SymScalar& coeff) {
  auto it = terms_.find(m);
  if (it == terms_.end())
    terms_[m] = coeff;
  else
    it->second += coeff;
  prune();
}

SymScalar BracketExpr::coeff_of(const Mono& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? SymScalar() : it->second;
}

bool BracketExpr::is_zero() const { return terms_.empty(); }

void BracketExpr::prune() {
  std::erase_if(terms_, [](const auto& kv) { return kv.second.is_zero(); });
}

BracketExpr& BracketExpr::operator+=(const BracketExpr& o) {
  for (const auto& [m, c] : o.terms_) {
    auto it = terms_.find(m);
    if (it == terms_.end())
      terms_[m] = c;
    else
      it->second += c;
  }
  prune();
  return *this;
}

BracketExpr& BracketExpr::operator-=(const BracketExpr& o) {
  for (const auto& [m, c] : o.terms_) {
    auto it = terms_.find(m);
    if (it == terms_.end())
      terms_[m] = -c;
    else
      it->second -= c;
  }
  prune();
  return *this;
}

BracketExpr operator*(const SymScalar& s, const BracketExpr& x) {
  BracketExpr out;
  for (const auto& [m, c] : x.terms_) out.add(m, s * c);
  return out;
}

BracketExpr bracket(const BracketExpr& a, const BracketExpr& b) {
  BracketExpr out;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      SymScalar c = ca * cb;
      if (ma.deg == 1 && mb.deg == 1) {
        auto [m, sign] = canon2(ma.g[0], mb.g[0]);
        if (sign == 0) continue;
        if (sign < 0) c = -c;
        out.add(m, c);
      } else if (ma.deg == 1 && mb.deg == 2) {
        auto [m, sign] = canon3(ma.g[0], mb.g[0], mb.g[1]);
        if (sign == 0) continue;
        if (sign < 0) c = -c;
        out.add(m, c);
      } else if (ma.deg == 2 && mb.deg == 1) {
        auto [m, sign] = canon3(mb.g[0], ma.g[0], ma.g[1]);
        if (sign == 0) continue;
        if (sign > 0) c = -c; // [x, y] = -[y, x]
        out.add(m, c);
      } else {
        throw std::invalid_argument("bracket: monomial degree above 3 not supported");
      }
    }
  return out;
}

BracketExpr BracketExpr::jacobi_reduced() const {
  const Mono redundant{3, {2, 0, 1}}; // [b_2, [b_0, b_1]]
  BracketExpr out;
  for (const auto& [m, c] : terms_) {
    if (m == redundant) {
      out.add(Mono{3, {0, 1, 2}}, -c);
      out.add(Mono{3, {1, 0, 2}}, c);
    } else {
      out.add(m, c);
    }
  }
  return out;
}

BracketExpr BracketExpr::substitute(int from, int to) const {
  BracketExpr out;
  for (const auto& [m, c] : terms_) {
    std::array<int, 3> g = m.g;
    for (int& x : g)
      if (x == from) x = to;
    if (m.deg == 1) {
      out.add(Mono{1, {g[0], -1, -1}}, c);
    } else if (m.deg == 2) {
      auto [mm, sign] = canon2(g[0], g[1]);
      if (sign == 0) continue;
      out.add(mm, sign < 0 ? -c : c);
    } else {
      auto [mm, sign] = canon3(g[0], g[1], g[2]);
      if (sign == 0) continue;
      out.add(mm, sign < 0 ? -c : c);
    }
  }
  return out;
}

// ----------------------------------------------------------- symbol level

namespace {

SymScalar up_scalar(int alpha) {
  return SymScalar(Rat(alpha == 0 ? -1 : 1));
}

// sum_alpha up(alpha) xi_alpha Y_alpha  (contraction xi_alpha Y^alpha)
BracketExpr contract(const CovectorSym& xi, const SymbolVector& y) {
  BracketExpr out;
  for (int a = 0; a < 4; ++a) out += (up_scalar(a) * xi[a]) * y[a];
  return out;
}

// sum_alpha up(alpha) [X_alpha, Y_alpha]
BracketExpr contract_bracket(const SymbolVector& x, const SymbolVector& y) {
  BracketExpr out;
  for (int a = 0; a < 4; ++a) {
    BracketExpr b = bracket(x[a], y[a]);
    out += up_scalar(a) * b;
  }
  return out;
}

CovectorSym add_cov(const CovectorSym& a, const CovectorSym& b) {
  CovectorSym out;
  for (int i = 0; i < 4; ++i) out[i] = a[i] + b[i];
  return out;
}

CovectorSym scale_cov(const SymScalar& s, const CovectorSym& a) {
  CovectorSym out;
  for (int i = 0; i < 4; ++i) out[i] = s * a[i];
  return out;
}

} // namespace

SymbolVector one_fold_symbol(int k) {
  CovectorSym w = omega_covector(k);
  BracketExpr b = BracketExpr::generator(k - 1);
  SymbolVector y;
  for (int beta = 0; beta < 4; ++beta) y[beta] = w[beta] * b;
  return y;
}

namespace {

// the displayed bilinear contraction, shared by the two- and three-fold
// assemblies: 2 eta_alpha [X^alpha, Z_beta] - eta_beta [X^alpha, Z_alpha]
SymbolVector bilinear_half(const CovectorSym& eta_z, const SymbolVector& x,
                           const SymbolVector& z) {
  BracketExpr xc = contract(eta_z, x);
  BracketExpr s = contract_bracket(x, z);
  SymbolVector out;
  for (int beta = 0; beta < 4; ++beta) {
    BracketExpr t = bracket(xc, z[beta]);
    t += t; // times 2
    t -= eta_z[beta] * s;
    out[beta] = t;
  }
  return out;
}

CovectorSym eta_k(int k, int n) {
  return scale_cov(kappas(n)[k - 1], xi_covector(k, n));
}

} // namespace

SymbolVector two_fold_symbol(int k, int l, int n) {
  if (k < 1 || k > 3 || l < 1 || l > 3 || k == l)
    throw std::invalid_argument("two_fold_symbol: indices must be distinct in {1,2,3}");
  SymbolVector yk = one_fold_symbol(k), yl = one_fold_symbol(l);
  CovectorSym ek = eta_k(k, n), el = eta_k(l, n);
  SymbolVector a = bilinear_half(el, yk, yl);
  SymbolVector b = bilinear_half(ek, yl, yk);
  SymScalar pinv = minkowski_p(add_cov(ek, el)).inverse();
  SymbolVector out;
  for (int beta = 0; beta < 4; ++beta) out[beta] = pinv * (a[beta] + b[beta]);
  return out;
}

SymbolVector three_fold_symbol(bool include_cubic, int n) {
  std::array<SymbolVector, 3> y1;
  for (int k = 1; k <= 3; ++k) y1[k - 1] = one_fold_symbol(k);
  // unordered pairs (0,1), (0,2), (1,2)
  auto pair_index = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (a == 0) ? (b == 1 ? 0 : 1) : 2;
  };
  std::array<SymbolVector, 3> y2 = {two_fold_symbol(1, 2, n), two_fold_symbol(1, 3, n),
                                    two_fold_symbol(2, 3, n)};
  std::array<CovectorSym, 3> ek = {eta_k(1, n), eta_k(2, n), eta_k(3, n)};

  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  SymbolVector total;
  SymbolVector cubic;
  SymScalar half(Rat(1, 2));
  for (const auto& p : perms) {
    const SymbolVector& ypair = y2[pair_index(p[0], p[1])];
    const SymbolVector& ylast = y1[p[2]];
    SymbolVector t = bilinear_half(ek[p[2]], ypair, ylast);
    CovectorSym e23 = add_cov(ek[p[1]], ek[p[2]]);
    SymbolVector u = bilinear_half(e23, y1[p[0]], y2[pair_index(p[1], p[2])]);
    for (int beta = 0; beta < 4; ++beta) total[beta] += half * (t[beta] + u[beta]);
    if (include_cubic) {
      // 4 [Y_(p0)^alpha, [Y_(p1),alpha, Y_(p2),beta]]
      for (int beta = 0; beta < 4; ++beta) {
        BracketExpr inner;
        for (int a = 0; a < 4; ++a) {
          BracketExpr ib = bracket(y1[p[1]][a], y1[p[2]][beta]);
          BracketExpr ob = bracket(y1[p[0]][a], ib);
          inner += up_scalar(a) * ob;
        }
        cubic[beta] += half * (SymScalar(Rat(4)) * inner);
      }
    }
  }
  if (include_cubic) {
    for (int beta = 0; beta <= 1; ++beta)
      for (const auto& [m, c] : cubic[beta].terms()) {
        if (c.trunc() < 1)
          throw std::runtime_error(
              "three_fold_symbol: truncation insufficient to verify the cubic "
              "order; increase the series order N");
        for (int ord = std::max(c.min_order(), -4); ord <= 0; ++ord)
          if (!c.coeff(ord).is_zero())
            throw std::logic_error("three_fold_symbol: cubic term below order s");
      }
    for (int beta = 0; beta < 4; ++beta) total[beta] += cubic[beta];
  }
  return total;
}

BracketExpr jacobi_limit(const SymbolVector& sym) {
  // the first two components agree through order s^0 (higher orders are
  // not controlled)
  BracketExpr diff = sym[0] - sym[1];
  for (const auto& [m, c] : diff.terms())
    for (int ord = std::max(c.min_order(), -4); ord <= 0; ++ord)
      if (!c.coeff(ord).is_zero())
        throw std::runtime_error("jacobi_limit: components 0 and 1 disagree");
  BracketExpr red = sym[0].jacobi_reduced();
  BracketExpr out;
  for (const auto& [m, c] : red.terms()) {
    for (int ord = std::max(c.min_order(), -4); ord < 0; ++ord)
      if (!c.coeff(ord).is_zero())
        throw std::runtime_error("jacobi_limit: nonzero pole part after Jacobi reduction");
    FieldElem c0 = c.coeff(0);
    if (!c0.is_zero()) out.add(m, SymScalar(std::move(c0)));
  }
  return out;
}

SymbolVector temporal_symbol_transform(const SymbolVector& sym, const CovectorSym& eta) {
  if (eta[0].is_zero())
    throw std::invalid_argument("temporal_symbol_transform: eta_0 must be invertible");
  SymScalar inv0 = eta[0].inverse();
  SymbolVector out;
  for (int beta = 1; beta < 4; ++beta) {
    out[beta] = sym[beta];
    out[beta] -= (eta[beta] * inv0) * sym[0];
  }
  return out;
}

BridgeResult symbol_transport_bridge(const ConnectionSampler& A, const BrokenTriple& triple,
                                     const BracketExpr& expr, const std::array<Mat, 3>& gens,
                                     double r, double s, int steps) {
  Path leg1(triple.x, triple.y), leg2(triple.y, triple.z);
  std::array<Mat, 3> tb;
  for (int i = 0; i < 3; ++i) tb[i] = adjoint_transport(A, leg1, gens[i], steps);

  auto comm = [](const Mat& a, const Mat& b) -> Mat { return a * b - b * a; };
  auto eval_mono = [&](const Mono& m) -> Mat {
    if (m.deg == 1) return tb[m.g[0]];
    if (m.deg == 2) return comm(tb[m.g[0]], tb[m.g[1]]);
    return comm(tb[m.g[0]], comm(tb[m.g[1]], tb[m.g[2]]));
  };

  const int n = static_cast<int>(gens[0].rows());
  Mat acc = Mat::Zero(n, n);
  for (const auto& [m, c] : expr.terms()) acc += c.eval(r, s) * eval_mono(m);
  BridgeResult res;
  res.value = adjoint_transport(A, leg2, acc, steps);
  res.pt_product_residual =
      (comm(tb[0], tb[1]) - adjoint_transport(A, leg1, comm(gens[0], gens[1]), steps)).norm();
  return res;
}

} // namespace ym
