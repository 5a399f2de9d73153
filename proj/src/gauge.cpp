#include "ym/gauge.hpp"

#include "ym/transport.hpp"

#include <cmath>

namespace ym {

GaugeTransform::GaugeTransform(const Grid& grid, int n)
    : grid_(&grid), n_(n), data_(grid.size() * n * n, {0.0, 0.0}) {
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (int i = 0; i < n; ++i) data_[p * n * n + i * n + i] = 1.0;
}

Mat GaugeTransform::at(std::size_t p) const {
  Mat m(n_, n_);
  const std::complex<double>* src = data_.data() + p * n_ * n_;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = src[i * n_ + j];
  return m;
}

void GaugeTransform::set(std::size_t p, const Mat& u) {
  std::complex<double>* dst = data_.data() + p * n_ * n_;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) dst[i * n_ + j] = u(i, j);
}

double GaugeTransform::unitarity_defect() const {
  double m = 0.0;
  for (std::size_t p = 0; p < grid_->size(); ++p) {
    Mat u = at(p);
    m = std::max(m, (u.adjoint() * u - Mat::Identity(n_, n_)).norm());
  }
  return m;
}

GaugeTransform GaugeTransform::sample(const Grid& grid, int n, const PointFn& fn) {
  GaugeTransform u(grid, n);
  for (std::size_t p = 0; p < grid.size(); ++p) u.set(p, fn(grid.point(p)));
  return u;
}

namespace {

// same stencil as the scalar-field partial: centered inside, one-sided at
// the faces, both second order
Mat matrix_partial_at(const GaugeTransform& u, int axis, std::size_t p) {
  const Grid& g = u.grid();
  int i = g.unravel(p)[axis];
  std::size_t str = g.stride(axis);
  double inv2 = 1.0 / (2.0 * g.spacing(axis));
  if (i > 0 && i < g.n[axis] - 1) return (u.at(p + str) - u.at(p - str)) * inv2;
  if (i == 0) return (-3.0 * u.at(p) + 4.0 * u.at(p + str) - u.at(p + 2 * str)) * inv2;
  return (3.0 * u.at(p) - 4.0 * u.at(p - str) + u.at(p - 2 * str)) * inv2;
}

} // namespace

Connection gauge_action(const GaugeTransform& u, const Connection& a) {
  const Grid& g = a.grid();
  const LieAlgebra& alg = a.algebra();
  if (u.grid().n != g.n) throw std::invalid_argument("gauge_action: grid mismatch");
  GForm b(1, g, alg);
  for (int al = 0; al < 4; ++al) {
    AlgebraField& out = b.component(al);
    const AlgebraField& in = a.a().component(al);
    for (std::size_t p = 0; p < g.size(); ++p) {
      Mat up = u.at(p);
      Mat du = matrix_partial_at(u, al, p);
      Mat am = alg.from_coefficients(Eigen::Map<const Vec>(in.at(p), alg.dim()));
      Mat bm = up.adjoint() * du + up.adjoint() * am * up;
      Vec c = alg.project_coefficients(bm);
      for (int k = 0; k < alg.dim(); ++k) out.at(p)[k] = c[k];
    }
  }
  return Connection(std::move(b));
}

TemporalGaugeResult temporal_gauge(const Connection& v) {
  const Grid& g = v.grid();
  const LieAlgebra& alg = v.algebra();
  const int n = alg.matrix_size();
  const int nt = g.n[0];
  GaugeTransform u(g, n);

  const AlgebraField& v0 = v.a().component(0);

  for (int ix = 0; ix < g.n[1]; ++ix)
    for (int iy = 0; iy < g.n[2]; ++iy)
      for (int iz = 0; iz < g.n[3]; ++iz) {
        double x1 = g.coord(1, ix), x2 = g.coord(2, iy), x3 = g.coord(3, iz);
        double ts = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3) - 1.0;
        if (ts < g.origin[0] - 1e-12)
          throw std::invalid_argument("temporal_gauge: grid does not cover the initial surface");

        auto node = [&](int it) { return g.index(it, ix, iy, iz); };
        auto v0_node = [&](int it) {
          return alg.from_coefficients(Eigen::Map<const Vec>(v0.at(node(it)), alg.dim()));
        };
        // quadratic interpolation of V0 in time through three nearest levels
        auto v0_at = [&](double t) -> Mat {
          double s = (t - g.origin[0]) / g.tau;
          int j = std::clamp(static_cast<int>(std::lround(s)), 1, nt - 2);
          double d = s - j;
          Mat m0 = v0_node(j - 1), m1 = v0_node(j), m2 = v0_node(j + 1);
          return 0.5 * d * (d - 1.0) * m0 + (1.0 - d * d) * m1 + 0.5 * d * (d + 1.0) * m2;
        };
        auto rk4 = [&](Mat uu, double t, double dt) -> Mat {
          auto f = [&](double tt, const Mat& w) -> Mat { return -v0_at(tt) * w; };
          Mat k1 = f(t, uu);
          Mat k2 = f(t + 0.5 * dt, uu + 0.5 * dt * k1);
          Mat k3 = f(t + 0.5 * dt, uu + 0.5 * dt * k2);
          Mat k4 = f(t + dt, uu + dt * k3);
          return project_unitary(uu + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        };

        double s0 = (ts - g.origin[0]) / g.tau;
        int i0 = static_cast<int>(std::ceil(s0 - 1e-12));
        if (i0 >= nt) continue; // column entirely below the surface
        if (i0 < 0) i0 = 0;

        Mat uu = Mat::Identity(n, n);
        double frac = g.coord(0, i0) - ts;
        if (frac > 1e-14) uu = rk4(uu, ts, frac);
        u.set(node(i0), uu);
        for (int it = i0 + 1; it < nt; ++it) {
          uu = rk4(uu, g.coord(0, it - 1), g.tau);
          u.set(node(it), uu);
        }
      }

  Connection b = gauge_action(u, v);
  // the ODE gives U^{-1}(dU/dt + V0 U) = 0 exactly; substitute it
  GForm bform = b.a();
  AlgebraField zero(g, alg);
  bform.component(0) = zero;
  return TemporalGaugeResult{Connection(std::move(bform)), std::move(u)};
}

GForm relative_lorenz_residual(const Connection& a, const Connection& v) {
  GForm diff = v.a() - a.a();
  return covariant_d_star(a, diff);
}

double stabilizer_check(const GaugeTransform& u, const Connection& a) {
  const Grid& g = a.grid();
  const LieAlgebra& alg = a.algebra();
  double m = 0.0;
  for (int al = 0; al < 4; ++al) {
    const AlgebraField& in = a.a().component(al);
    for (std::size_t p = 0; p < g.size(); ++p) {
      Mat am = alg.from_coefficients(Eigen::Map<const Vec>(in.at(p), alg.dim()));
      Mat up = u.at(p);
      Mat res = matrix_partial_at(u, al, p) - (am * up - up * am);
      m = std::max(m, res.norm());
    }
  }
  return m;
}

} // namespace ym
