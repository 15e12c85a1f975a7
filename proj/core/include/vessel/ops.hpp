#pragma once

#include <optional>

#include "vessel/vessel.hpp"

namespace vessel {

enum class SubspaceKind { invariant, co_invariant };

/// A t2-family of subspaces, held as orthonormal basis columns per node.
struct SubspaceFamily {
  SubspaceFamily(MatFn basis_, SubspaceKind kind_);

  MatFn basis;  // n x k, orthonormal columns at every node
  SubspaceKind kind;

  int ambient_dim() const { return basis.rows(); }
  int rank() const { return basis.cols(); }
};

struct InvarianceReport {
  double a1_residual = 0.0;    // ||(I-P) A1 P|| over nodes (A1x for co-inv.)
  double flow_residual = 0.0;  // ||(I-P(t)) F(t,s) P(s)|| over sampled pairs
  double max() const { return std::max(a1_residual, flow_residual); }
};

/// Series connection: the output of v1 feeds v2. Requires the compatibility
/// conditions sigma1s' = sigma1'', sigma2s' = sigma2'', gammas' = gamma''
/// node-wise within 1e-10. Transfer functions compose as S = S2 * S1.
DiffVessel cascade(const DiffVessel& v1, const DiffVessel& v2);

/// Vessel whose transfer is the pointwise inverse of v's. Needs D, Dt
/// invertible; the starred and unstarred signature families swap roles.
DiffVessel invert(const DiffVessel& v);

/// Adjoint vessel; transfer S_*(mu) = Dt^H - Bt^H (mu I + A1^H)^{-1} C^H
/// sigma1s^H, tied to S by S(lambda,t2) = sigma1s^{-1} S_*^H(-conj(lambda),t2) sigma1.
DiffVessel adjoint(const DiffVessel& v);

/// State change of basis by an invertible family T(t2): A1 -> T A1 T^{-1},
/// A2 -> T A2 T^{-1} + T' T^{-1}, Bt -> T Bt, C -> C T^{-1}. Transfer
/// invariant.
DiffVessel gauge_transform(const DiffVessel& v, const MatFn& T,
                           double cond_limit = kDefaultCondLimit);

/// Invariance diagnostics: A1-stability and flow covariance of the family
/// (the inverse-system operators A1x, Fx for co-invariant families).
InvarianceReport check_invariant(const DiffVessel& v, const SubspaceFamily& G);

/// Restriction to an invariant family, in the basis coordinates of G. Keeps
/// the input data and D, Dt; the output data is recomputed from the linkage
/// conditions.
DiffVessel project(const DiffVessel& v, const SubspaceFamily& G,
                   double pre_tol = kDefaultVesselTol);

/// Feed-through split for compression: the compressed (first) factor carries
/// `first`, the projected complement carries `second`. Defaults to (D, I).
struct FeedthroughSplit {
  MatFn first;
  MatFn second;
};

/// Compression onto a co-invariant family. Keeps the output data; the input
/// data is recomputed from the linkage conditions. With the default split,
/// cascade(compress(v, Gx), project(v, G)) reproduces v's transfer whenever
/// G and Gx are complementary invariant/co-invariant families.
DiffVessel compress(const DiffVessel& v, const SubspaceFamily& Gx,
                    const std::optional<FeedthroughSplit>& split = std::nullopt,
                    double pre_tol = kDefaultVesselTol);

}  // namespace vessel
