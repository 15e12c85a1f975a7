#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "vessel/odeflow.hpp"
#include "vessel/signature.hpp"

namespace vessel {

/// Differential vessel: state-space data (A1, A2, Bt, C, D, Dt) over one grid
/// together with its Signature. Bt and Dt are the tilde'd input/feed-through
/// blocks. Immutable value type.
struct DiffVessel {
  DiffVessel(MatFn A1_, MatFn A2_, MatFn Bt_, MatFn C_, MatFn D_, MatFn Dt_,
             Signature sig_);

  MatFn A1;  // n x n
  MatFn A2;  // n x n
  MatFn Bt;  // n x e
  MatFn C;   // e* x n
  MatFn D;   // e* x e
  MatFn Dt;  // e* x e (square external spaces)
  Signature sig;

  int state_dim() const { return A1.rows(); }
  const TimeGrid& grid() const { return A1.grid(); }

  /// Max 2-norm of A1 over the grid nodes; sets the off-spectrum lambda scale.
  double a1_norm_bound() const;
};

/// Node-wise residuals of the four vessel axioms:
///   (i)   lax:      A1' - (A2 A1 - A1 A2)
///   (ii)  input:    (Bt sigma1)' - A2 Bt sigma1 + A1 Bt sigma2 + Bt gamma
///   (iii) output:   sigma1s C' + sigma1s C A2 - sigma2s C A1 - gammas C
///   (iv)  linkage:  sigma1s D - Dt sigma1;  sigma2s D - Dt sigma2;
///                   Dt gamma - (sigma2s C Bt sigma1 - sigma1s C Bt sigma2
///                               - sigma1s D' + gammas D)
struct ResidualReport {
  double lax = 0.0;
  double input_cond = 0.0;
  double output_cond = 0.0;
  double linkage1 = 0.0;
  double linkage2 = 0.0;
  double linkage3 = 0.0;
  double max_over_grid = 0.0;
  double tol = kDefaultVesselTol;
  bool pass = false;
  /// Per-node values in the order lax, input, output, link1, link2, link3.
  std::vector<std::array<double, 6>> per_node;

  std::string to_string() const;
};

ResidualReport verify_vessel(const DiffVessel& v,
                             double tol = kDefaultVesselTol);

/// Transfer function S(lambda, t2) = D + C (lambda I - A1)^{-1} Bt sigma1,
/// evaluated through a linear solve. Throws ResolventError near Spec A1.
CMat transfer(const DiffVessel& v, cd lambda, double t2);

/// Residual of the transfer-function ODE
///   dS/dt2 = sigma1s^{-1}(sigma2s lambda + gammas) S
///            - S sigma1^{-1}(sigma2 lambda + gamma)
/// with dS/dt2 by 4th-order central differences at the grid spacing.
double transfer_ode_residual(const DiffVessel& v, cd lambda, double t2);

/// || S(lambda,t2) Phi(lambda,t2,t0) - Phi_*(lambda,t2,t0) S(lambda,t0) ||.
double check_intertwining(const DiffVessel& v, cd lambda, double t0, double t2);

using TransferSampler = std::function<CMat(cd, double)>;

/// Class-I membership diagnostics for an arbitrary sampler.
struct ClassIReport {
  double analyticity = 0.0;   // Cauchy-Riemann residual on a lambda circle
  double smoothness = 0.0;    // divided-difference continuity check in t2
  double intertwining = 0.0;  // residual of S Phi = Phi_* S0 for sig's flows
  double tol = 0.0;
  bool pass = false;

  std::string to_string() const;
};

ClassIReport class_I_check(const TransferSampler& sampler, const Signature& sig,
                           double lambda_radius, double tol);

}  // namespace vessel
