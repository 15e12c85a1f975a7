#include "vessel/simulate.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace vessel {

CMat expm(const CMat& m) { return m.exp(); }

TrajectoryBundle separated_trajectory(const DiffVessel& v, cd lambda,
                                      const CVec& u0, const TimeGrid& t1_grid,
                                      const TimeGrid& t2_grid) {
  if (u0.size() != v.sig.dim_in()) {
    throw ShapeError("separated_trajectory: u0 dimension mismatch");
  }
  if (!v.grid().contains(t2_grid.t_start) || !v.grid().contains(t2_grid.t_end)) {
    throw DomainError("separated_trajectory: t2 grid outside the vessel grid");
  }

  TrajectoryBundle b{t1_grid, t2_grid, lambda, true, 0, 0, 0, {}, {}, {}};
  b.dim_in = v.sig.dim_in();
  b.dim_state = v.state_dim();
  b.dim_out = v.sig.dim_out();

  const FundMatrix phi = fundamental_input(v.sig, lambda, t2_grid.t_start);
  const int N1 = t1_grid.points, N2 = t2_grid.points;
  std::vector<CVec> u_l(N2), x_l(N2), y_l(N2);
  for (int i2 = 0; i2 < N2; ++i2) {
    const double t2 = t2_grid.node(i2);
    u_l[i2] = phi(t2) * u0;
    const CMat rhs = v.Bt(t2) * v.sig.sigma1(t2) * u_l[i2];
    const int n = v.state_dim();
    const CMat M = lambda * CMat::Identity(n, n) - v.A1(t2);
    const double smin = smallest_singular_value(M);
    if (n > 0 && smin <= 1e-10 * std::max(v.A1(t2).norm(), 1.0)) {
      throw ResolventError("separated_trajectory: lambda too close to Spec A1",
                           smin);
    }
    x_l[i2] = n > 0 ? CVec(M.partialPivLu().solve(rhs)) : CVec(0);
    y_l[i2] = v.D(t2) * u_l[i2] + v.C(t2) * x_l[i2];
  }

  b.u.resize(N1 * N2);
  b.x.resize(N1 * N2);
  b.y.resize(N1 * N2);
  for (int i1 = 0; i1 < N1; ++i1) {
    const cd mod = std::exp(lambda * t1_grid.node(i1));
    for (int i2 = 0; i2 < N2; ++i2) {
      b.u[b.index(i1, i2)] = mod * u_l[i2];
      b.x[b.index(i1, i2)] = mod * x_l[i2];
      b.y[b.index(i1, i2)] = mod * y_l[i2];
    }
  }
  return b;
}

namespace {

// 4th-order centered first derivative across one axis of the bundle storage.
CVec diff4(const std::vector<CVec>& f, int center, int stride, double h) {
  return (f[center - 2 * stride] - 8.0 * f[center - stride] +
          8.0 * f[center + stride] - f[center + 2 * stride]) /
         (12.0 * h);
}

}  // namespace

PdeResiduals pde_residuals(const DiffVessel& v, const TrajectoryBundle& traj) {
  const int N1 = traj.t1_grid.points, N2 = traj.t2_grid.points;
  if (N1 < 5 || N2 < 5) {
    throw DomainError("pde_residuals: need at least 5 nodes per axis");
  }
  const double h1 = traj.t1_grid.spacing();
  const double h2 = traj.t2_grid.spacing();

  PdeResiduals r;
  for (int i1 = 0; i1 < N1; ++i1) {
    for (int i2 = 0; i2 < N2; ++i2) {
      const double t2 = traj.t2_grid.node(i2);
      const int idx = traj.index(i1, i2);
      r.output_eq = std::max(
          r.output_eq, max_abs(traj.y[idx] - v.D(t2) * traj.u[idx] -
                               v.C(t2) * traj.x[idx]));
      const bool interior1 = i1 >= 2 && i1 + 2 < N1;
      const bool interior2 = i2 >= 2 && i2 + 2 < N2;
      if (interior1) {
        const CVec xt1 = diff4(traj.x, idx, N2, h1);
        r.state_t1 = std::max(
            r.state_t1, max_abs(xt1 - v.A1(t2) * traj.x[idx] -
                                v.Bt(t2) * v.sig.sigma1(t2) * traj.u[idx]));
      }
      if (interior2) {
        const CVec xt2 = diff4(traj.x, idx, 1, h2);
        r.state_t2 = std::max(
            r.state_t2, max_abs(xt2 - v.A2(t2) * traj.x[idx] -
                                v.Bt(t2) * v.sig.sigma2(t2) * traj.u[idx]));
      }
      if (interior1 && interior2) {
        const CVec ut1 = diff4(traj.u, idx, N2, h1);
        const CVec ut2 = diff4(traj.u, idx, 1, h2);
        r.input_compat = std::max(
            r.input_compat,
            max_abs(v.sig.sigma2(t2) * ut1 - v.sig.sigma1(t2) * ut2 +
                    v.sig.gamma(t2) * traj.u[idx]));
        const CVec yt1 = diff4(traj.y, idx, N2, h1);
        const CVec yt2 = diff4(traj.y, idx, 1, h2);
        r.output_compat = std::max(
            r.output_compat,
            max_abs(v.sig.sigma2s(t2) * yt1 - v.sig.sigma1s(t2) * yt2 +
                    v.sig.gammas(t2) * traj.y[idx]));
      }
    }
  }
  return r;
}

double two_path_consistency(const DiffVessel& v, const CVec& x0, double t1,
                            double t2) {
  if (x0.size() != v.state_dim()) {
    throw ShapeError("two_path_consistency: x0 dimension mismatch");
  }
  const double t2_0 = v.grid().t_start;
  const double dt1 = t1;  // paths start at t1 = 0
  const CMat F = evolution_semigroup(v.A2, t2_0, t2);
  const CVec path_a = expm(v.A1(t2) * dt1) * (F * x0);
  const CVec path_b = F * (expm(v.A1(t2_0) * dt1) * x0);
  return max_abs(path_a - path_b);
}

}  // namespace vessel
