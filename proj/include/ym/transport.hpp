#pragma once

#include "ym/gform.hpp"

#include <array>
#include <functional>
#include <random>

namespace ym {

using SpacetimePoint = std::array<double, 4>;

/// Connection evaluated along curves: (point, alpha) -> A_alpha as a matrix.
using ConnectionSampler = std::function<Mat(const SpacetimePoint&, int)>;

/// Multilinear interpolation of a grid connection (clamped to the box).
ConnectionSampler grid_connection(const Connection& A);

/// Polyline with affine parametrization on each segment.
struct Path {
  std::vector<SpacetimePoint> points;

  explicit Path(std::vector<SpacetimePoint> pts);
  Path(const SpacetimePoint& a, const SpacetimePoint& b) : Path(std::vector{a, b}) {}
  int segments() const { return static_cast<int>(points.size()) - 1; }
  Path reversed() const;
};

/// Vertex of the broken light ray: both segments lightlike, time-ordered.
struct BrokenTriple {
  SpacetimePoint x, y, z;
  BrokenTriple(const SpacetimePoint& x_, const SpacetimePoint& y_, const SpacetimePoint& z_);
};

/// Nearest unitary matrix (polar factor).
Mat project_unitary(const Mat& u);

/// U(T) for Udot + <A, gammadot> U = 0, U(0) = id. RK4 with `steps` steps
/// per segment, each followed by projection to the unitary group.
Mat principal_transport(const ConnectionSampler& A, const Path& path, int steps);

/// W(T) for Wdot + [<A, gammadot>, W] = 0, W(0) = b.
Mat adjoint_transport(const ConnectionSampler& A, const Path& path, const Mat& b, int steps);

/// Composite transport z <- y <- x in the principal representation.
Mat broken_transform_principal(const ConnectionSampler& A, const BrokenTriple& t, int steps);

/// Same in the adjoint representation, as a matrix on basis coefficients.
Eigen::MatrixXd broken_transform_adjoint(const ConnectionSampler& A, const LieAlgebra& alg,
                                         const BrokenTriple& t, int steps);

/// u = U^B_{x<-y} U^B_{y<-z} U^A_{z<-y} U^A_{y<-x}; central whenever the
/// adjoint broken transforms of A and B coincide.
Mat centre_discrepancy(const ConnectionSampler& A, const ConnectionSampler& B,
                       const BrokenTriple& t, int steps);

/// max over basis b of ||u b - b u|| (Frobenius); zero iff u commutes with
/// the whole algebra.
double centre_membership(const LieAlgebra& alg, const Mat& u);

struct TripleSamplerConfig {
  double eps0 = 0.9;
  int count = 10;
  std::uint64_t seed = 1;
  int max_attempts = 200000;
};

/// Rejection sampler: endpoints in the observation set, vertex in the
/// diamond but outside it. Throws on exhaustion.
std::vector<BrokenTriple> sample_broken_triples(const TripleSamplerConfig& cfg);

} // namespace ym
