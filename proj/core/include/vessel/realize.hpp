#pragma once

#include "vessel/vessel.hpp"

namespace vessel {

/// Jordan-type pole data: member 0 of each chain solves the homogeneous
/// compatibility ODE at the pole (output side at z, input side at -conj(z)),
/// member i the companion equation driven by member i-1.
struct PoleChain {
  cd z;
  int order;
  std::vector<MatFn> out_chain;  // e* column functions c_0*, ..., c_{n-1}*
  std::vector<MatFn> in_chain;   // e  column functions b_0, ..., b_{n-1}
};

/// Max residual of the chain ODE relations, via spline derivatives.
double chain_residual(const PoleChain& chain, const Signature& sig);

/// Build a chain by integrating the companion equations from seeds at t0.
PoleChain make_pole_chain(const Signature& sig, cd z, int order,
                          const std::vector<CVec>& out_seeds,
                          const std::vector<CVec>& in_seeds, double t0);

/// Local pole data in matrix form: S has the local part X (lambda I - T)^{-1}
/// Y sigma1. X solves the output equation with spectral operator parameter T,
/// Y sigma1 the input-side one.
struct PoleTriple {
  MatFn X;  // e* x m
  CMat T;   // m x m, constant
  MatFn Y;  // m x e
};

/// Max residual of the two operator-parameter ODEs of the triple.
double triple_residual(const PoleTriple& triple, const Signature& sig);

/// The matrix form of a chain: T = z I - N with N the one-shift, X the chain
/// columns head first, Y the conjugated input chain head last.
PoleTriple chain_to_triple(const PoleChain& chain);

/// Vessel with a single pole of order <= chain.order at chain.z.
DiffVessel realize_single_pole(const PoleChain& chain, const MatFn& D,
                               const Signature& sig,
                               double chain_tol = 1e-7);

/// Vessel from a full set of pole triples plus the value at infinity; the
/// lambda-free linkage constraints are verified and reported on failure.
DiffVessel realize_mittag_leffler(const std::vector<PoleTriple>& triples,
                                  const MatFn& D, const Signature& sig,
                                  double triple_tol = 1e-7);

enum class PropagationMethod { ode, contour };

/// Propagate a base-point realization (C0, A1, B0) of S(., t0) across the
/// grid, by the operator-parameter ODEs or by resolvent contour integrals
/// against the fundamental matrices. Returns (C, B).
std::pair<MatFn, MatFn> propagate_CB(const CMat& C0, const CMat& B0,
                                     const CMat& A1, const Signature& sig,
                                     PropagationMethod method, double t0);

/// Negative Laurent coefficients of a sampler around z at fixed t2:
/// coefficients[k] multiplies (lambda - z)^{-(k+1)}. Order q is the largest
/// index with a coefficient above 1e-8.
struct LaurentData {
  cd z;
  int order = 0;
  std::vector<CMat> coefficients;
};

LaurentData extract_pole_data(const TransferSampler& sampler, cd z,
                              int max_order, double t2, double radius);

}  // namespace vessel
