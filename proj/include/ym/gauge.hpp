#pragma once

#include "ym/gform.hpp"

#include <functional>

namespace ym {

/// Grid field of group elements, stored as dense complex matrices.
class GaugeTransform {
public:
  GaugeTransform() = default;
  /// Initialized to the identity everywhere.
  GaugeTransform(const Grid& grid, int n);

  const Grid& grid() const { return *grid_; }
  int matrix_size() const { return n_; }

  Mat at(std::size_t p) const;
  void set(std::size_t p, const Mat& u);

  /// max over points of ||U*U - id||.
  double unitarity_defect() const;

  using PointFn = std::function<Mat(const std::array<double, 4>&)>;
  static GaugeTransform sample(const Grid& grid, int n, const PointFn& fn);

private:
  const Grid* grid_ = nullptr;
  int n_ = 0;
  std::vector<std::complex<double>> data_;
};

/// B = U^{-1} dU + U^{-1} A U with the grid stencils; results are projected
/// back onto the algebra (stencil error leaves small off-algebra parts).
Connection gauge_action(const GaugeTransform& u, const Connection& a);

struct TemporalGaugeResult {
  Connection transformed;
  GaugeTransform transform;
};

/// Gauge transform solving dU/dt = -V_0 U with U = id on the lower cone
/// t = |x| - 1, integrated up each spatial column; the returned connection
/// has exact zero time component (the ODE is substituted analytically).
TemporalGaugeResult temporal_gauge(const Connection& v);

/// d_A*(V - A); vanishes iff V is in Lorenz gauge relative to A.
GForm relative_lorenz_residual(const Connection& a, const Connection& v);

/// max-norm of dU - (A U - U A); zero when U stabilizes the connection.
double stabilizer_check(const GaugeTransform& u, const Connection& a);

} // namespace ym
