#include "ym/transport.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace ym {

namespace {

double spatial_dist(const SpacetimePoint& a, const SpacetimePoint& b) {
  double s = 0.0;
  for (int i = 1; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void require_lightlike(const SpacetimePoint& a, const SpacetimePoint& b) {
  double dt = b[0] - a[0];
  if (dt <= 0.0) throw std::invalid_argument("BrokenTriple: segments must be future-directed");
  if (std::abs(spatial_dist(a, b) - dt) > 1e-9 * dt)
    throw std::invalid_argument("BrokenTriple: segment not lightlike");
}

// <A(p), v> summed over spacetime components
Mat pairing(const ConnectionSampler& A, const SpacetimePoint& p, const SpacetimePoint& v) {
  Mat m = A(p, 0) * v[0];
  for (int a = 1; a < 4; ++a) m += A(p, a) * v[a];
  return m;
}

} // namespace

ConnectionSampler grid_connection(const Connection& A) {
  const Grid* g = &A.grid();
  const LieAlgebra* alg = &A.algebra();
  const GForm* form = &A.a();
  return [g, alg, form](const SpacetimePoint& p, int alpha) {
    std::array<int, 4> i0;
    std::array<double, 4> w;
    for (int a = 0; a < 4; ++a) {
      double s = (p[a] - g->origin[a]) / g->spacing(a);
      int i = static_cast<int>(std::floor(s));
      i = std::max(0, std::min(i, g->n[a] - 2));
      i0[a] = i;
      w[a] = std::max(0.0, std::min(s - i, 1.0));
    }
    Vec c = Vec::Zero(alg->dim());
    for (int corner = 0; corner < 16; ++corner) {
      double weight = 1.0;
      std::array<int, 4> idx;
      for (int a = 0; a < 4; ++a) {
        int bit = (corner >> a) & 1;
        idx[a] = i0[a] + bit;
        weight *= bit ? w[a] : 1.0 - w[a];
      }
      if (weight == 0.0) continue;
      const double* v = form->component(alpha).at(g->index(idx[0], idx[1], idx[2], idx[3]));
      for (int k = 0; k < alg->dim(); ++k) c[k] += weight * v[k];
    }
    return alg->from_coefficients(c);
  };
}

Path::Path(std::vector<SpacetimePoint> pts) : points(std::move(pts)) {
  if (points.size() < 2) throw std::invalid_argument("Path: need at least 2 points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    double d = 0.0;
    for (int a = 0; a < 4; ++a) d += std::abs(points[i][a] - points[i - 1][a]);
    if (d == 0.0) throw std::invalid_argument("Path: consecutive points must be distinct");
  }
}

Path Path::reversed() const {
  std::vector<SpacetimePoint> pts(points.rbegin(), points.rend());
  return Path(std::move(pts));
}

BrokenTriple::BrokenTriple(const SpacetimePoint& x_, const SpacetimePoint& y_,
                           const SpacetimePoint& z_)
    : x(x_), y(y_), z(z_) {
  require_lightlike(x, y);
  require_lightlike(y, z);
}

Mat project_unitary(const Mat& u) {
  Eigen::JacobiSVD<Mat> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

namespace {

// RK4 across the polyline for Xdot = rhs(t-point, tangent, X).
template <typename Rhs, typename Post>
Mat integrate(const Path& path, int steps, Mat x0, const Rhs& rhs, const Post& post) {
  if (steps < 1) throw std::invalid_argument("transport: steps must be >= 1");
  Mat x = std::move(x0);
  for (int s = 0; s < path.segments(); ++s) {
    const SpacetimePoint& p = path.points[s];
    const SpacetimePoint& q = path.points[s + 1];
    SpacetimePoint tangent;
    for (int a = 0; a < 4; ++a) tangent[a] = q[a] - p[a];
    double dh = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
      auto at = [&](double t) {
        SpacetimePoint r;
        for (int a = 0; a < 4; ++a) r[a] = p[a] + t * tangent[a];
        return r;
      };
      double t0 = i * dh;
      Mat k1 = rhs(at(t0), tangent, x);
      Mat k2 = rhs(at(t0 + 0.5 * dh), tangent, x + 0.5 * dh * k1);
      Mat k3 = rhs(at(t0 + 0.5 * dh), tangent, x + 0.5 * dh * k2);
      Mat k4 = rhs(at(t0 + dh), tangent, x + dh * k3);
      x += (dh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      x = post(std::move(x));
    }
  }
  return x;
}

} // namespace

Mat principal_transport(const ConnectionSampler& A, const Path& path, int steps) {
  Mat id = A(path.points[0], 0);
  int n = static_cast<int>(id.rows());
  return integrate(
      path, steps, Mat::Identity(n, n),
      [&](const SpacetimePoint& p, const SpacetimePoint& v, const Mat& u) -> Mat {
        return -pairing(A, p, v) * u;
      },
      [](Mat u) { return project_unitary(u); });
}

Mat adjoint_transport(const ConnectionSampler& A, const Path& path, const Mat& b, int steps) {
  return integrate(
      path, steps, b,
      [&](const SpacetimePoint& p, const SpacetimePoint& v, const Mat& w) -> Mat {
        Mat a = pairing(A, p, v);
        return -(a * w - w * a);
      },
      [](Mat w) { return w; });
}

Mat broken_transform_principal(const ConnectionSampler& A, const BrokenTriple& t, int steps) {
  Mat u1 = principal_transport(A, Path(t.x, t.y), steps);
  Mat u2 = principal_transport(A, Path(t.y, t.z), steps);
  return u2 * u1;
}

Eigen::MatrixXd broken_transform_adjoint(const ConnectionSampler& A, const LieAlgebra& alg,
                                         const BrokenTriple& t, int steps) {
  Path leg1(t.x, t.y), leg2(t.y, t.z);
  Eigen::MatrixXd m(alg.dim(), alg.dim());
  for (int a = 0; a < alg.dim(); ++a) {
    Mat w = adjoint_transport(A, leg1, alg.basis(a), steps);
    w = adjoint_transport(A, leg2, w, steps);
    m.col(a) = alg.coefficients(w);
  }
  return m;
}

Mat centre_discrepancy(const ConnectionSampler& A, const ConnectionSampler& B,
                       const BrokenTriple& t, int steps) {
  Mat a_yx = principal_transport(A, Path(t.x, t.y), steps);
  Mat a_zy = principal_transport(A, Path(t.y, t.z), steps);
  Mat b_yz = principal_transport(B, Path(t.z, t.y), steps);
  Mat b_xy = principal_transport(B, Path(t.y, t.x), steps);
  return b_xy * b_yz * a_zy * a_yx;
}

double centre_membership(const LieAlgebra& alg, const Mat& u) {
  double m = 0.0;
  for (int a = 0; a < alg.dim(); ++a)
    m = std::max(m, (u * alg.basis(a) - alg.basis(a) * u).norm());
  return m;
}

std::vector<BrokenTriple> sample_broken_triples(const TripleSamplerConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  auto sphere_dir = [&] {
    // rejection in the ball, then normalize
    while (true) {
      double a = sym(rng), b = sym(rng), c = sym(rng);
      double r2 = a * a + b * b + c * c;
      if (r2 > 1e-12 && r2 <= 1.0) {
        double r = std::sqrt(r2);
        return std::array<double, 3>{a / r, b / r, c / r};
      }
    }
  };
  auto in_obs = [&](const SpacetimePoint& p) { return in_observation_set(p, cfg.eps0); };

  std::vector<BrokenTriple> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < cfg.count) {
    if (++attempts > cfg.max_attempts)
      throw std::runtime_error("sample_broken_triples: sampler exhausted");
    SpacetimePoint x{sym(rng), cfg.eps0 * sym(rng), cfg.eps0 * sym(rng), cfg.eps0 * sym(rng)};
    if (!in_obs(x)) continue;
    auto d1 = sphere_dir();
    double ty = x[0] + (1.0 - x[0]) * unit(rng);
    SpacetimePoint y{ty, x[1] + (ty - x[0]) * d1[0], x[2] + (ty - x[0]) * d1[1],
                     x[3] + (ty - x[0]) * d1[2]};
    if (!in_diamond(y) || in_obs(y)) continue;
    auto d2 = sphere_dir();
    double tz = ty + (1.0 - ty) * unit(rng);
    SpacetimePoint z{tz, y[1] + (tz - ty) * d2[0], y[2] + (tz - ty) * d2[1],
                     y[3] + (tz - ty) * d2[2]};
    if (!in_obs(z)) continue;
    if (ty <= x[0] || tz <= ty) continue;
    out.emplace_back(x, y, z);
  }
  return out;
}

} // namespace ym
