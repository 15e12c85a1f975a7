#pragma once

#include "vessel/vessel.hpp"

namespace vessel {

/// Matrix exponential (scaling-and-squaring, Pade order 13).
CMat expm(const CMat& m);

/// Sampled trajectories of the associated 2D system on a (t1, t2) product
/// grid. In separated mode u(t1,t2) = u_lambda(t2) e^{lambda t1} by
/// construction, likewise x and y.
struct TrajectoryBundle {
  TimeGrid t1_grid;
  TimeGrid t2_grid;
  cd lambda;
  bool separated = true;
  int dim_in = 0, dim_state = 0, dim_out = 0;
  // Row-major over (i1, i2): index = i1 * t2_grid.points + i2.
  std::vector<CVec> u, x, y;

  int index(int i1, int i2) const { return i1 * t2_grid.points + i2; }
};

/// Separated-variable trajectory at spectral value lambda from the initial
/// input value u0 at (t1 = 0, t2 = t2_grid.t_start).
TrajectoryBundle separated_trajectory(const DiffVessel& v, cd lambda,
                                      const CVec& u0, const TimeGrid& t1_grid,
                                      const TimeGrid& t2_grid);

/// Max-norm residuals of the two state equations, the input and output
/// compatibility PDEs (4th-order interior differences), and the algebraic
/// output equation.
struct PdeResiduals {
  double state_t1 = 0.0;
  double state_t2 = 0.0;
  double input_compat = 0.0;
  double output_compat = 0.0;
  double output_eq = 0.0;
  double max() const {
    return std::max({state_t1, state_t2, input_compat, output_compat,
                     output_eq});
  }
};

PdeResiduals pde_residuals(const DiffVessel& v, const TrajectoryBundle& traj);

/// Free-evolution transition mismatch between the two corner paths
/// (t1 then t2 versus t2 then t1); zero when the Lax axiom holds.
double two_path_consistency(const DiffVessel& v, const CVec& x0, double t1,
                            double t2);

}  // namespace vessel
