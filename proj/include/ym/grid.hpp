#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ym {

/// Uniform grid on a spacetime box. Axis 0 is time (spacing tau),
/// axes 1..3 are spatial (spacing h).
struct Grid {
  std::array<int, 4> n{3, 3, 3, 3};
  double h = 0.1;
  double tau = 0.05;
  std::array<double, 4> origin{0.0, 0.0, 0.0, 0.0};

  Grid() = default;
  Grid(std::array<int, 4> extents, double spacing, double time_step,
       std::array<double, 4> orig = {0, 0, 0, 0})
      : n(extents), h(spacing), tau(time_step), origin(orig) {
    for (int e : n)
      if (e < 3) throw std::invalid_argument("Grid: extents must be >= 3");
    if (tau > 0.5 * h + 1e-12) throw std::invalid_argument("Grid: CFL bound tau <= 0.5 h violated");
  }

  /// Box [-1,1]^4 with given points per axis; tau chosen as 0.5*h.
  static Grid unit_box(int nt, int nx) {
    double spacing = 2.0 / (nx - 1);
    double dt = 2.0 / (nt - 1);
    if (dt > 0.5 * spacing) throw std::invalid_argument("Grid::unit_box: CFL requires nt >= ~4*nx");
    return Grid({nt, nx, nx, nx}, spacing, dt, {-1.0, -1.0, -1.0, -1.0});
  }

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * n[1] * n[2] * n[3];
  }
  std::size_t index(int it, int ix, int iy, int iz) const {
    return ((static_cast<std::size_t>(it) * n[1] + ix) * n[2] + iy) * n[3] + iz;
  }
  std::array<int, 4> unravel(std::size_t p) const {
    std::array<int, 4> idx;
    idx[3] = static_cast<int>(p % n[3]);
    p /= n[3];
    idx[2] = static_cast<int>(p % n[2]);
    p /= n[2];
    idx[1] = static_cast<int>(p % n[1]);
    idx[0] = static_cast<int>(p / n[1]);
    return idx;
  }
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = 3; a > axis; --a) s *= n[a];
    return s;
  }
  double spacing(int axis) const { return axis == 0 ? tau : h; }
  double coord(int axis, int i) const { return origin[axis] + i * spacing(axis); }
  std::array<double, 4> point(std::size_t p) const {
    auto idx = unravel(p);
    return {coord(0, idx[0]), coord(1, idx[1]), coord(2, idx[2]), coord(3, idx[3])};
  }

  bool interior(const std::array<int, 4>& idx) const {
    for (int a = 0; a < 4; ++a)
      if (idx[a] == 0 || idx[a] == n[a] - 1) return false;
    return true;
  }
};

/// Causal diamond {|x| <= t+1, |x| <= 1-t}.
inline bool in_diamond(const std::array<double, 4>& x) {
  double r = std::sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
  return r <= x[0] + 1.0 && r <= 1.0 - x[0];
}

inline std::vector<bool> causal_mask(const Grid& g) {
  std::vector<bool> mask(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) mask[p] = in_diamond(g.point(p));
  return mask;
}

/// Observation set {|x| < eps0} intersected with the diamond interior.
inline bool in_observation_set(const std::array<double, 4>& x, double eps0) {
  double r = std::sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
  return r < x[0] + 1.0 && r < 1.0 - x[0] && r < eps0;
}

} // namespace ym
