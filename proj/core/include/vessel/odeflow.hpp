#pragma once

#include <functional>
#include <vector>

#include "vessel/grid.hpp"

namespace vessel {

struct Signature;  // vessel/signature.hpp

/// Adaptive Dormand-Prince 5(4) settings.
struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  long max_steps = 4000000;
};

using OdeRhs = std::function<CMat(double, const CMat&)>;

/// Integrate y' = f(t, y) from (t0, y0) to t1 (either direction).
CMat integrate(const OdeRhs& f, CMat y0, double t0, double t1,
               const OdeOptions& opts = {});

/// Values of the solution at a strictly monotone list of times, the first of
/// which is the initial time.
std::vector<CMat> integrate_path(const OdeRhs& f, const CMat& y0,
                                 const std::vector<double>& times,
                                 const OdeOptions& opts = {});

/// F(t_to, t_from) solving dF/dt = A2(t) F, F(t_from, t_from) = I.
CMat evolution_semigroup(const MatFn& A2, double t_from, double t_to,
                         const OdeOptions& opts = {});

/// Fundamental solution family of a first-order linear ODE with spectral
/// parameter, sampled as a MatFn over the module grid.
struct FundMatrix {
  cd lambda;
  double base_time;
  MatFn flow;

  CMat operator()(double t2) const { return flow(t2); }
};

/// Input compatibility ODE: flow' = sigma1^{-1} (lambda sigma2 + gamma) flow.
FundMatrix fundamental_input(const Signature& sig, cd lambda, double t0,
                             const OdeOptions& opts = {});

/// Output compatibility ODE, same shape with the starred data.
FundMatrix fundamental_output(const Signature& sig, cd lambda, double t0,
                              const OdeOptions& opts = {});

/// Adjoint input ODE, conjugate-transposed starred data:
///   flow' = sigma1s^H^{-1} (mu sigma2s^H - gammas^H - (sigma1s^H)') flow.
FundMatrix fundamental_adjoint_input(const Signature& sig, cd mu, double t0,
                                     const OdeOptions& opts = {});

/// Adjoint output ODE, the unstarred companion of the adjoint input.
FundMatrix fundamental_adjoint_output(const Signature& sig, cd mu, double t0,
                                      const OdeOptions& opts = {});

enum class ChainSide { output, input };

/// Companion-solution chains. Member 0 solves the homogeneous equation
/// (output ODE at z, or adjoint output ODE at -conj(z) for the input side),
/// member i the inhomogeneous equation driven by member i-1:
///   output:  z sigma2s y - sigma1s y' + gammas y = sigma2s c_{i-1}
///   input:   the adjoint output operator applied to b_i = -sigma2^H b_{i-1}
std::vector<MatFn> solve_companion_chain(const Signature& sig, cd z,
                                         int length, ChainSide side, double t0,
                                         const std::vector<CVec>& seeds,
                                         const OdeOptions& opts = {});

}  // namespace vessel
