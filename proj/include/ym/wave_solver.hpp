#pragma once

#include "ym/gform.hpp"

namespace ym {

/// Smooth compactly supported source bump: coefficient direction times a
/// tensor cutoff in time and in the spatial radius.
struct SourceBump {
  int comp = 1;               // spatial 1-form component, 1..3
  Vec direction;              // algebra coefficients
  std::array<double, 4> centre{0.0, 0.0, 0.0, 0.0};
  double t_radius = 0.2;
  double x_radius = 0.2;
  double amplitude = 1.0;
};

struct SourceSpec {
  std::vector<SourceBump> bumps;

  SourceSpec scaled(double s) const;
  /// J_comp coefficients at a spacetime point (comp in 1..3; comp 0 is
  /// always zero: the time component is solved, never prescribed).
  Vec eval(const LieAlgebra& alg, const std::array<double, 4>& x, int comp) const;
  /// The spatial part as a 1-form on the grid (time component zero).
  GForm sample(const Grid& grid, const LieAlgebra& alg) const;
};

/// Full space-time history of a wave run.
struct WaveHistory {
  GForm w;  // 1-form
  GForm j0; // 0-form
};

/// N(W) = (1/2) d_A*[W,W] + star[W, star d_A W] + (1/2) star[W, star[W,W]].
GForm nonlinearity(const Connection& A, const GForm& w);

/// Box_A w computed from the coordinate expansion of d_A d_A* + d_A* d_A;
/// agrees with the operator composition to second order.
GForm connection_wave_expanded(const Connection& A, const GForm& w);

/// Leapfrog march of Box_A Y + star[Y, star F_A] = f with Y = 0 on the
/// first two levels. First-order-in-time terms use lagged backward
/// differences. Throws on NaN.
GForm solve_linear_wave(const Connection& A, const GForm& f);

/// Solver for the linearized system: the scalar ODE
/// dJ0/dt + [A_0, J0] = f2 first, then the wave equation with source
/// f1 + J0 dt.
WaveHistory linear_system_solve(const Connection& A, const GForm& f1, const GForm& f2);

/// Nonlinear march of the relative-Lorenz system with compatibility ODE:
/// Box_A W + star[W, star F_A] + N(W) = J, with J0 advanced by the
/// trapezoidal rule alongside the leapfrog.
WaveHistory solve_lorenz_system(const Connection& A, const SourceSpec& src);

struct FixedPointReport {
  WaveHistory state;
  int iterations = 0;
  std::vector<double> diffs; // successive max-norm differences
};

/// Picard iteration u <- S K(u, J'); throws when the amplitude guard
/// ||J||_inf T^2 <= 0.1 fails or the iteration diverges.
FixedPointReport solve_fixed_point(const Connection& A, const SourceSpec& src, double tol,
                                   int max_iter);

/// Triangular chain of 1-, 2- and 3-fold linearizations.
struct LinearizedChain {
  std::array<GForm, 3> y1;        // Y_(1), Y_(2), Y_(3)
  std::array<GForm, 3> y2;        // Y_(12), Y_(13), Y_(23)
  GForm y123;
  int order = 1;
};

LinearizedChain linearized_solve(const Connection& A, const std::array<SourceSpec, 3>& families,
                                 int order);

/// Residuals of the temporal-gauge reduction identities for a connection
/// with A_0 = 0: the constraint equation, the reduced equations, the
/// third-order reduced equations, and the replay of their derivation.
struct ConstraintReport {
  double constraint = 0.0;
  double ym_red = 0.0;
  double ym_red2 = 0.0;
  double consistency = 0.0;
};
ConstraintReport temporal_constraint_residuals(const Connection& A);

/// Local energy over shrinking balls B(R - (t - t_start)) and the smallest
/// Gronwall constant C with E(t) <= e^{Ct}E(0) + C int_0^t e^{C(t-s)}F(s)ds.
struct EnergyReport {
  std::vector<double> energy;
  std::vector<double> source;
  double fitted_c = 0.0;
  bool bound_holds = false;
};
EnergyReport energy_report(const GForm& v, const GForm& u, const GForm& f1, const GForm& f2,
                           double R, int start_level);

} // namespace ym
