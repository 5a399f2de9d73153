#include "ym/gform.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ym {

double AlgebraField::max_norm() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

AlgebraField& AlgebraField::operator+=(const AlgebraField& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}
AlgebraField& AlgebraField::operator-=(const AlgebraField& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}
AlgebraField& AlgebraField::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

AlgebraField partial(const AlgebraField& f, int axis) {
  const Grid& g = f.grid();
  AlgebraField out(g, f.algebra());
  const int d = f.dim();
  const std::size_t str = g.stride(axis) * d;
  const double inv2 = 1.0 / (2.0 * g.spacing(axis));
  const int nA = g.n[axis];
  const double* in = f.values().data();
  double* o = out.values().data();
  for (std::size_t p = 0; p < g.size(); ++p) {
    int i = g.unravel(p)[axis];
    std::size_t base = p * d;
    if (i > 0 && i < nA - 1) {
      for (int c = 0; c < d; ++c) o[base + c] = (in[base + str + c] - in[base - str + c]) * inv2;
    } else if (i == 0) {
      for (int c = 0; c < d; ++c)
        o[base + c] = (-3.0 * in[base + c] + 4.0 * in[base + str + c] - in[base + 2 * str + c]) * inv2;
    } else {
      for (int c = 0; c < d; ++c)
        o[base + c] = (3.0 * in[base + c] - 4.0 * in[base - str + c] + in[base - 2 * str + c]) * inv2;
    }
  }
  return out;
}

AlgebraField pointwise_bracket(const AlgebraField& f, const AlgebraField& g) {
  AlgebraField out(f.grid(), f.algebra());
  const LieAlgebra& alg = f.algebra();
  for (std::size_t p = 0; p < f.grid().size(); ++p)
    alg.bracket_coeffs(f.at(p), g.at(p), out.at(p));
  return out;
}

int binomial4(int k) {
  static const int b[5] = {1, 4, 6, 4, 1};
  return b[k];
}

const std::vector<std::array<int, 4>>& multi_indices(int k) {
  static std::vector<std::vector<std::array<int, 4>>> tables = [] {
    std::vector<std::vector<std::array<int, 4>>> t(5);
    for (int k = 0; k <= 4; ++k) {
      for (int mask = 0; mask < 16; ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        std::array<int, 4> idx{-1, -1, -1, -1};
        int pos = 0;
        for (int a = 0; a < 4; ++a)
          if (mask & (1 << a)) idx[pos++] = a;
        t[k].push_back(idx);
      }
      std::sort(t[k].begin(), t[k].end());
    }
    return t;
  }();
  return tables[k];
}

int multi_index_position(int k, std::span<const int> sorted) {
  const auto& table = multi_indices(k);
  for (int i = 0; i < static_cast<int>(table.size()); ++i) {
    bool match = true;
    for (int j = 0; j < k; ++j)
      if (table[i][j] != sorted[j]) match = false;
    if (match) return i;
  }
  throw std::invalid_argument("multi_index_position: bad multi-index");
}

std::pair<int, int> locate_component(int k, std::span<const int> indices) {
  std::array<int, 4> idx{};
  for (int j = 0; j < k; ++j) idx[j] = indices[j];
  int sign = 1;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k - 1 - i; ++j)
      if (idx[j] > idx[j + 1]) {
        std::swap(idx[j], idx[j + 1]);
        sign = -sign;
      }
  for (int j = 0; j + 1 < k; ++j)
    if (idx[j] == idx[j + 1]) return {-1, 0};
  return {multi_index_position(k, std::span<const int>(idx.data(), k)), sign};
}

GForm::GForm(int degree, const Grid& grid, const LieAlgebra& alg) : degree_(degree) {
  if (degree < 0 || degree > 4) throw std::invalid_argument("GForm: degree out of range");
  comps_.reserve(binomial4(degree));
  for (int i = 0; i < binomial4(degree); ++i) comps_.emplace_back(grid, alg);
}

std::pair<const AlgebraField*, int> GForm::component_signed(std::span<const int> indices) const {
  auto [pos, sign] = locate_component(degree_, indices);
  if (sign == 0) return {nullptr, 0};
  return {&comps_[pos], sign};
}

double GForm::max_norm() const {
  double m = 0.0;
  for (const auto& c : comps_) m = std::max(m, c.max_norm());
  return m;
}

double GForm::max_norm_interior() const {
  const Grid& g = grid();
  double m = 0.0;
  for (const auto& c : comps_)
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (!g.interior(g.unravel(p))) continue;
      for (int k = 0; k < c.dim(); ++k) m = std::max(m, std::abs(c.at(p)[k]));
    }
  return m;
}

double GForm::max_norm_where(const std::vector<bool>& mask) const {
  const Grid& g = grid();
  double m = 0.0;
  for (const auto& c : comps_)
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (!mask[p]) continue;
      for (int k = 0; k < c.dim(); ++k) m = std::max(m, std::abs(c.at(p)[k]));
    }
  return m;
}

GForm& GForm::operator+=(const GForm& o) {
  for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
  return *this;
}
GForm& GForm::operator-=(const GForm& o) {
  for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
  return *this;
}
GForm& GForm::operator*=(double s) {
  for (auto& c : comps_) c *= s;
  return *this;
}

GForm GForm::sample(int degree, const Grid& grid, const LieAlgebra& alg, const Sampler& fn) {
  GForm w(degree, grid, alg);
  const auto& table = multi_indices(degree);
  for (int i = 0; i < w.component_count(); ++i) {
    std::span<const int> idx(table[i].data(), degree);
    AlgebraField& c = w.component(i);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      Vec v = fn(grid.point(p), idx);
      for (int k = 0; k < alg.dim(); ++k) c.at(p)[k] = v[k];
    }
  }
  return w;
}

GForm d(const GForm& w) {
  int k = w.degree();
  if (k >= 4) throw std::invalid_argument("d: degree overflow");
  GForm out(k + 1, w.grid(), w.algebra());
  const auto& out_table = multi_indices(k + 1);
  for (int i = 0; i < out.component_count(); ++i) {
    const auto& K = out_table[i];
    for (int pos = 0; pos <= k; ++pos) {
      int axis = K[pos];
      std::array<int, 4> rest{};
      int rpos = 0;
      for (int j = 0; j <= k; ++j)
        if (j != pos) rest[rpos++] = K[j];
      int cpos = multi_index_position(k, std::span<const int>(rest.data(), k));
      double sign = (pos % 2 == 0) ? 1.0 : -1.0;
      AlgebraField der = partial(w.component(cpos), axis);
      if (sign > 0)
        out.component(i) += der;
      else
        out.component(i) -= der;
    }
  }
  return out;
}

GForm graded_bracket(const GForm& w, const GForm& e) {
  int p = w.degree(), q = e.degree();
  if (p + q > 4) throw std::invalid_argument("graded_bracket: degree overflow");
  GForm out(p + q, w.grid(), w.algebra());
  const LieAlgebra& alg = w.algebra();
  const auto& out_table = multi_indices(p + q);
  const std::size_t npts = w.grid().size();
  for (int oc = 0; oc < out.component_count(); ++oc) {
    const auto& K = out_table[oc];
    // all p-subsets of K
    for (int mask = 0; mask < (1 << (p + q)); ++mask) {
      if (__builtin_popcount(mask) != p) continue;
      std::array<int, 4> I{}, J{};
      int ip = 0, jp = 0;
      for (int j = 0; j < p + q; ++j)
        (mask & (1 << j)) ? I[ip++] = K[j] : J[jp++] = K[j];
      int inversions = 0;
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < q; ++b)
          if (I[a] > J[b]) ++inversions;
      double sign = (inversions % 2 == 0) ? 1.0 : -1.0;
      int ci = multi_index_position(p, std::span<const int>(I.data(), p));
      int cj = multi_index_position(q, std::span<const int>(J.data(), q));
      const AlgebraField& wf = w.component(ci);
      const AlgebraField& ef = e.component(cj);
      AlgebraField& of = out.component(oc);
      for (std::size_t pt = 0; pt < npts; ++pt)
        alg.bracket_coeffs_acc(wf.at(pt), ef.at(pt), of.at(pt), sign);
    }
  }
  return out;
}

GForm hodge_star(const GForm& w) {
  int k = w.degree();
  GForm out(4 - k, w.grid(), w.algebra());
  const auto& table = multi_indices(k);
  for (int i = 0; i < w.component_count(); ++i) {
    const auto& I = table[i];
    std::array<int, 4> Ic{};
    int cpos = 0;
    for (int a = 0; a < 4; ++a) {
      bool in_I = false;
      for (int j = 0; j < k; ++j)
        if (I[j] == a) in_I = true;
      if (!in_I) Ic[cpos++] = a;
    }
    double factor = 1.0;
    for (int j = 0; j < k; ++j) factor *= metric_sign(I[j]);
    int inversions = 0;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < 4 - k; ++b)
        if (I[a] > Ic[b]) ++inversions;
    if (inversions % 2 != 0) factor = -factor;
    int oc = multi_index_position(4 - k, std::span<const int>(Ic.data(), 4 - k));
    AlgebraField scaled = w.component(i);
    scaled *= factor;
    out.component(oc) += scaled;
  }
  return out;
}

Connection::Connection(GForm a) : a_(std::move(a)), f_(curvature_of(a_)) {
  if (a_.degree() != 1) throw std::invalid_argument("Connection: expected a 1-form");
}

GForm covariant_d(const Connection& A, const GForm& w) {
  GForm out = d(w);
  out += graded_bracket(A.a(), w);
  return out;
}

GForm covariant_d_star(const Connection& A, const GForm& w) {
  const Grid& g = w.grid();
  const LieAlgebra& alg = w.algebra();
  if (w.degree() == 1) {
    GForm out(0, g, alg);
    AlgebraField& o = out.component(0);
    for (int a = 0; a < 4; ++a) {
      AlgebraField term = partial(w.component(a), a);
      term += pointwise_bracket(A.a().component(a), w.component(a));
      term *= -metric_sign(a);
      o += term;
    }
    return out;
  }
  if (w.degree() == 2) {
    GForm out(1, g, alg);
    for (int beta = 0; beta < 4; ++beta) {
      AlgebraField& o = out.component(beta);
      for (int a = 0; a < 4; ++a) {
        if (a == beta) continue;
        std::array<int, 2> idx{a, beta};
        auto [field, sign] = w.component_signed(idx);
        AlgebraField comp = *field;
        comp *= static_cast<double>(sign);
        AlgebraField term = partial(comp, a);
        term += pointwise_bracket(A.a().component(a), comp);
        term *= -metric_sign(a);
        o += term;
      }
    }
    return out;
  }
  throw std::invalid_argument("covariant_d_star: unsupported degree");
}

GForm covariant_d_star_composed(const Connection& A, const GForm& w) {
  return hodge_star(covariant_d(A, hodge_star(w)));
}

GForm curvature_of(const GForm& a) {
  GForm f = d(a);
  GForm bb = graded_bracket(a, a);
  bb *= 0.5;
  f += bb;
  return f;
}

GForm ym_residual(const Connection& A) {
  const GForm& a = A.a();
  const Grid& g = a.grid();
  const LieAlgebra& alg = a.algebra();

  // first derivatives dA[alpha][beta] = partial_alpha A_beta
  std::array<std::array<AlgebraField, 4>, 4> dA;
  for (int al = 0; al < 4; ++al)
    for (int be = 0; be < 4; ++be) dA[al][be] = partial(a.component(be), al);

  // divergence with raised index
  AlgebraField divA(g, alg);
  for (int al = 0; al < 4; ++al) {
    AlgebraField t = dA[al][al];
    t *= metric_sign(al);
    divA += t;
  }

  GForm out(1, g, alg);
  for (int beta = 0; beta < 4; ++beta) {
    AlgebraField& o = out.component(beta);
    for (int al = 0; al < 4; ++al) {
      double up = metric_sign(al);
      // +partial^alpha partial_beta A_alpha
      AlgebraField t1 = partial(dA[beta][al], al);
      t1 *= up;
      o += t1;
      // -partial^alpha partial_alpha A_beta
      AlgebraField t2 = partial(dA[al][beta], al);
      t2 *= -up;
      o += t2;
      // -2 [A^alpha, partial_alpha A_beta]
      AlgebraField t3 = pointwise_bracket(a.component(al), dA[al][beta]);
      t3 *= -2.0 * up;
      o += t3;
      // +[A^alpha, partial_beta A_alpha]
      AlgebraField t4 = pointwise_bracket(a.component(al), dA[beta][al]);
      t4 *= up;
      o += t4;
      // -[A^alpha, [A_alpha, A_beta]]
      AlgebraField inner = pointwise_bracket(a.component(al), a.component(beta));
      AlgebraField t5 = pointwise_bracket(a.component(al), inner);
      t5 *= -up;
      o += t5;
    }
    // -[div^alpha A_alpha, A_beta]
    AlgebraField t6 = pointwise_bracket(divA, a.component(beta));
    t6 *= -1.0;
    o += t6;
  }
  return out;
}

GForm star_bracket_star(const GForm& x, const GForm& y) {
  if (x.degree() != 1 || y.degree() != 2)
    throw std::invalid_argument("star_bracket_star: expects a 1-form and a 2-form");
  const Grid& g = x.grid();
  const LieAlgebra& alg = x.algebra();
  GForm out(1, g, alg);
  for (int beta = 0; beta < 4; ++beta) {
    AlgebraField& o = out.component(beta);
    for (int a = 0; a < 4; ++a) {
      if (a == beta) continue;
      std::array<int, 2> idx{a, beta};
      auto [field, sign] = y.component_signed(idx);
      AlgebraField comp = *field;
      comp *= -metric_sign(a) * static_cast<double>(sign);
      o += pointwise_bracket(x.component(a), comp);
    }
  }
  return out;
}

IdentityReport expansion_identities(const GForm& x, const GForm& y, const GForm& z,
                                    const Connection& A) {
  IdentityReport rep;
  const Grid& g = x.grid();
  const LieAlgebra& alg = x.algebra();

  // (1) d_A*[X,Z] = [d_A*X,Z] - [X,d_A*Z]
  //     + ([d^a X_b + [A^a,X_b], Z_a] - [X_a, d^a Z_b + [A^a,Z_b]]) dx^b
  {
    GForm lhs = covariant_d_star(A, graded_bracket(x, z));
    GForm rhs = graded_bracket(covariant_d_star(A, x), z);
    rhs -= graded_bracket(x, covariant_d_star(A, z));
    for (int beta = 0; beta < 4; ++beta) {
      AlgebraField& o = rhs.component(beta);
      for (int a = 0; a < 4; ++a) {
        double up = metric_sign(a);
        AlgebraField xa = partial(x.component(beta), a);
        xa += pointwise_bracket(A.a().component(a), x.component(beta));
        AlgebraField t1 = pointwise_bracket(xa, z.component(a));
        t1 *= up;
        o += t1;
        AlgebraField za = partial(z.component(beta), a);
        za += pointwise_bracket(A.a().component(a), z.component(beta));
        AlgebraField t2 = pointwise_bracket(x.component(a), za);
        t2 *= -up;
        o += t2;
      }
    }
    lhs -= rhs;
    rep.dastar_bracket = lhs.max_norm_interior();
  }

  // (2) star[X, star d_A Z] coordinate expansion vs composition
  {
    GForm lhs = hodge_star(graded_bracket(x, hodge_star(covariant_d(A, z))));
    GForm rhs(1, g, alg);
    for (int beta = 0; beta < 4; ++beta) {
      AlgebraField& o = rhs.component(beta);
      for (int a = 0; a < 4; ++a) {
        double up = metric_sign(a);
        AlgebraField za = partial(z.component(beta), a);
        za += pointwise_bracket(A.a().component(a), z.component(beta));
        AlgebraField t1 = pointwise_bracket(x.component(a), za);
        t1 *= -up;
        o += t1;
        AlgebraField zb = partial(z.component(a), beta);
        zb += pointwise_bracket(A.a().component(beta), z.component(a));
        AlgebraField t2 = pointwise_bracket(x.component(a), zb);
        t2 *= up;
        o += t2;
      }
    }
    lhs -= rhs;
    rep.wstardaw = lhs.max_norm_interior();
  }

  // (3) star[X, star[Y,Z]] = (-[X^a,[Y_a,Z_b]] + [X^a,[Y_b,Z_a]]) dx^b
  {
    GForm lhs = hodge_star(graded_bracket(x, hodge_star(graded_bracket(y, z))));
    GForm rhs(1, g, alg);
    for (int beta = 0; beta < 4; ++beta) {
      AlgebraField& o = rhs.component(beta);
      for (int a = 0; a < 4; ++a) {
        double up = metric_sign(a);
        AlgebraField t1 = pointwise_bracket(x.component(a), pointwise_bracket(y.component(a), z.component(beta)));
        t1 *= -up;
        o += t1;
        AlgebraField t2 = pointwise_bracket(x.component(a), pointwise_bracket(y.component(beta), z.component(a)));
        t2 *= up;
        o += t2;
      }
    }
    lhs -= rhs;
    rep.cubic = lhs.max_norm();
  }
  return rep;
}

void write_component_csv(const GForm& w, int comp, std::ostream& os) {
  const Grid& g = w.grid();
  const int d = w.algebra().dim();
  os << "t_idx,x_idx,y_idx,z_idx";
  for (int k = 1; k <= d; ++k) os << ",coeff_" << k;
  os << "\n";
  const AlgebraField& c = w.component(comp);
  for (std::size_t p = 0; p < g.size(); ++p) {
    auto idx = g.unravel(p);
    os << idx[0] << "," << idx[1] << "," << idx[2] << "," << idx[3];
    for (int k = 0; k < d; ++k) os << "," << c.at(p)[k];
    os << "\n";
  }
}

} // namespace ym
