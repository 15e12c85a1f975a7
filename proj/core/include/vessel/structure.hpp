#pragma once

#include <array>

#include "vessel/ops.hpp"

namespace vessel {

/// Orthonormal basis of the column span, rank decided by singular values
/// against n * eps * sigma_max * 1e3.
CMat orth_columns(const CMat& m);

/// Orthonormal basis of the kernel (right null space).
CMat kernel_basis(const CMat& m);

/// Principal angles between the column spans of two orthonormal bases.
std::vector<double> principal_angles(const CMat& Q1, const CMat& Q2);

/// Local controllability: Krylov span of {A1^j Bt : j < n} at t2.
CMat controllable_subspace(const DiffVessel& v, double t2);

/// Span over sampled s of F(t2, s) Krylov(s).
CMat global_controllable_subspace(const DiffVessel& v, double t2,
                                  int s_samples);

/// Local unobservable subspace: intersection of Ker C A1^j at t2.
CMat unobservable_subspace(const DiffVessel& v, double t2);

/// Intersection over sampled s of Ker of the stacked observability matrices
/// transported by F(s, t2).
CMat global_unobservable_subspace(const DiffVessel& v, double t2,
                                  int s_samples);

/// Four-block orthogonal splitting of the state space driven by the
/// controllable and unobservable subspaces, with the minimal sub-vessel on
/// the controllable-observable block. Block order: c-unobs, c-obs (minimal),
/// nc-obs, nc-unobs.
struct KalmanDecomp {
  std::array<SubspaceFamily, 4> blocks;
  std::array<int, 4> dims;
  DiffVessel minimal;
  /// Max magnitude below the block diagonal of the transformed A1 at the
  /// anchor time.
  double triangular_residual;
};

KalmanDecomp kalman_decompose(const DiffVessel& v, double t2);

/// Taylor data of the transfer function at infinity: C A1^j Bt, j < kmax.
std::vector<CMat> moments(const DiffVessel& v, double t2, int kmax);

/// Transfer-function equality near infinity, decided through moments up to
/// order n1 + n2 at sampled times. Requires matching signatures and
/// feed-through data.
bool equivalent(const DiffVessel& v1, const DiffVessel& v2, int t2_samples,
                double tol);

/// Similarity between minimal vessels with equal transfer functions, built by
/// matching Krylov generators in least squares. Throws NoSimilarityError when
/// the intertwining residuals exceed tol.
MatFn build_similarity(const DiffVessel& v1, const DiffVessel& v2, double t2,
                       double tol = kDefaultVesselTol);

}  // namespace vessel
