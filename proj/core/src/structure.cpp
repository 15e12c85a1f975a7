#include "vessel/structure.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace vessel {

namespace {

double rank_threshold(const CMat& m, const Eigen::VectorXd& sv) {
  const double smax = sv.size() ? sv(0) : 0.0;
  const double n = static_cast<double>(std::max(m.rows(), m.cols()));
  return n * std::numeric_limits<double>::epsilon() * smax * 1e3;
}

}  // namespace

CMat orth_columns(const CMat& m) {
  if (m.cols() == 0 || m.rows() == 0) return CMat(m.rows(), 0);
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues();
  const double thr = rank_threshold(m, sv);
  int r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;
  return svd.matrixU().leftCols(r);
}

CMat kernel_basis(const CMat& m) {
  if (m.rows() == 0) return CMat::Identity(m.cols(), m.cols());
  if (m.cols() == 0) return CMat(0, 0);
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double thr = rank_threshold(m, sv);
  int r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;
  return svd.matrixV().rightCols(m.cols() - r);
}

std::vector<double> principal_angles(const CMat& Q1, const CMat& Q2) {
  const int k = static_cast<int>(std::min(Q1.cols(), Q2.cols()));
  if (k == 0) return {};
  Eigen::JacobiSVD<CMat> svd(Q1.adjoint() * Q2);
  std::vector<double> angles(k);
  for (int i = 0; i < k; ++i) {
    const double c = std::min(1.0, svd.singularValues()(i));
    angles[i] = std::acos(c);
  }
  return angles;
}

namespace {

CMat krylov_matrix(const CMat& A, const CMat& B) {
  const int n = static_cast<int>(A.rows());
  CMat K(n, n * B.cols());
  CMat cur = B;
  for (int j = 0; j < n; ++j) {
    K.middleCols(j * B.cols(), B.cols()) = cur;
    cur = A * cur;
  }
  return K;
}

CMat observability_stack(const CMat& A, const CMat& C) {
  const int n = static_cast<int>(A.rows());
  CMat O(n * C.rows(), n);
  CMat cur = C;
  for (int j = 0; j < n; ++j) {
    O.middleRows(j * C.rows(), C.rows()) = cur;
    cur = cur * A;
  }
  return O;
}

std::vector<double> interior_samples(const TimeGrid& g, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(g.t_start +
                  (g.t_end - g.t_start) * (i + 0.5) / static_cast<double>(count));
  }
  return out;
}

}  // namespace

CMat controllable_subspace(const DiffVessel& v, double t2) {
  return orth_columns(krylov_matrix(v.A1(t2), v.Bt(t2)));
}

CMat global_controllable_subspace(const DiffVessel& v, double t2,
                                  int s_samples) {
  if (s_samples < 2) {
    throw DomainError("global_controllable_subspace: need at least 2 samples");
  }
  const int n = v.state_dim();
  std::vector<CMat> pieces;
  int cols = 0;
  for (double s : interior_samples(v.grid(), s_samples)) {
    const CMat F = evolution_semigroup(v.A2, s, t2);
    pieces.push_back(F * krylov_matrix(v.A1(s), v.Bt(s)));
    cols += static_cast<int>(pieces.back().cols());
  }
  CMat all(n, cols);
  int off = 0;
  for (const CMat& p : pieces) {
    if (p.cols() > 0) all.middleCols(off, p.cols()) = p;
    off += static_cast<int>(p.cols());
  }
  return orth_columns(all);
}

CMat unobservable_subspace(const DiffVessel& v, double t2) {
  return kernel_basis(observability_stack(v.A1(t2), v.C(t2)));
}

CMat global_unobservable_subspace(const DiffVessel& v, double t2,
                                  int s_samples) {
  if (s_samples < 2) {
    throw DomainError("global_unobservable_subspace: need at least 2 samples");
  }
  const int n = v.state_dim();
  std::vector<CMat> pieces;
  int rows = 0;
  for (double s : interior_samples(v.grid(), s_samples)) {
    const CMat F = evolution_semigroup(v.A2, t2, s);
    pieces.push_back(observability_stack(v.A1(s), v.C(s)) * F);
    rows += static_cast<int>(pieces.back().rows());
  }
  CMat stack(rows, n);
  int off = 0;
  for (const CMat& p : pieces) {
    if (p.rows() > 0) stack.middleRows(off, p.rows()) = p;
    off += static_cast<int>(p.rows());
  }
  return kernel_basis(stack);
}

namespace {

CMat hcat(const std::vector<CMat>& parts, int rows) {
  int cols = 0;
  for (const CMat& p : parts) cols += static_cast<int>(p.cols());
  CMat out(rows, cols);
  int off = 0;
  for (const CMat& p : parts) {
    if (p.cols() > 0) out.middleCols(off, p.cols()) = p;
    off += static_cast<int>(p.cols());
  }
  return out;
}

// Component of span(Q) orthogonal to span(S). Unlike orth_columns, the rank
// cut is taken against the unit scale of the orthonormal inputs, so a pure
// roundoff residual yields the empty basis.
CMat complement_within(const CMat& S, const CMat& Q) {
  if (Q.cols() == 0) return Q;
  if (S.cols() == 0) return Q;
  const CMat residual = Q - S * (S.adjoint() * Q);
  Eigen::JacobiSVD<CMat> svd(residual, Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues();
  const double thr = static_cast<double>(std::max(Q.rows(), Q.cols())) *
                     std::numeric_limits<double>::epsilon() * 1e3;
  int r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;
  return svd.matrixU().leftCols(r);
}

// Intersection of two orthonormal column spans via principal vectors.
CMat intersect_spans(const CMat& Q1, const CMat& Q2) {
  if (Q1.cols() == 0 || Q2.cols() == 0) return CMat(Q1.rows(), 0);
  Eigen::JacobiSVD<CMat> svd(Q1.adjoint() * Q2, Eigen::ComputeThinU);
  int r = 0;
  while (r < svd.singularValues().size() &&
         svd.singularValues()(r) > 1.0 - 1e-9) {
    ++r;
  }
  return Q1 * svd.matrixU().leftCols(r);
}

// Transport an anchor basis along the evolution semigroup and re-orthonormalize.
MatFn transported_family(const DiffVessel& v, const CMat& Q0, double anchor) {
  const TimeGrid& g = v.grid();
  const int n = v.state_dim();
  std::vector<double> times{anchor};
  for (int i = 0; i < g.points; ++i) {
    if (g.node(i) > anchor) times.push_back(g.node(i));
  }
  auto rhs = [&v](double t, const CMat& y) -> CMat { return v.A2(t) * y; };
  const auto fwd = integrate_path(rhs, CMat::Identity(n, n), times);
  std::vector<double> back{anchor};
  for (int i = g.points - 1; i >= 0; --i) {
    if (g.node(i) < anchor) back.push_back(g.node(i));
  }
  const auto bwd = integrate_path(rhs, CMat::Identity(n, n), back);

  std::vector<CMat> samples(g.points);
  std::size_t r = 1, l = 1;
  for (int i = 0; i < g.points; ++i) {
    CMat F;
    if (g.node(i) > anchor) F = fwd[r++];
    else if (g.node(i) < anchor) F = bwd[back.size() - (l++)];
    else F = CMat::Identity(n, n);
    if (Q0.cols() == 0) {
      samples[i] = CMat(n, 0);
    } else {
      Eigen::HouseholderQR<CMat> qr(F * Q0);
      samples[i] = CMat(qr.householderQ()).leftCols(Q0.cols());
    }
  }
  return MatFn(g, std::move(samples));
}

}  // namespace

KalmanDecomp kalman_decompose(const DiffVessel& v, double t2) {
  const int n = v.state_dim();
  const CMat Qc = controllable_subspace(v, t2);
  const CMat Qu = unobservable_subspace(v, t2);

  const CMat X_c_unobs = intersect_spans(Qc, Qu);
  const CMat X_c_obs = complement_within(X_c_unobs, Qc);
  const CMat Qc_perp = kernel_basis(Qc.adjoint());
  const CMat X_nc_unobs = intersect_spans(Qc_perp, Qu);
  const CMat used = hcat({X_c_unobs, X_c_obs, X_nc_unobs}, n);
  const CMat X_nc_obs = kernel_basis(used.adjoint());

  // Triangularity of A1 at the anchor in the order
  // (c-unobs, c-obs, nc-obs, nc-unobs).
  const CMat blocks_mat = hcat({X_c_unobs, X_c_obs, X_nc_obs, X_nc_unobs}, n);
  const CMat A1t = blocks_mat.adjoint() * v.A1(t2) * blocks_mat;
  double tri = 0.0;
  const int offs[5] = {0, static_cast<int>(X_c_unobs.cols()),
                       static_cast<int>(X_c_unobs.cols() + X_c_obs.cols()),
                       static_cast<int>(X_c_unobs.cols() + X_c_obs.cols() +
                                        X_nc_obs.cols()),
                       n};
  for (int bi = 0; bi < 4; ++bi) {
    for (int bj = 0; bj < bi; ++bj) {
      const CMat blk = A1t.block(offs[bi], offs[bj], offs[bi + 1] - offs[bi],
                                 offs[bj + 1] - offs[bj]);
      tri = std::max(tri, max_abs(blk));
    }
  }

  SubspaceFamily f_c_unobs(transported_family(v, X_c_unobs, t2),
                           SubspaceKind::invariant);
  SubspaceFamily f_c_obs(transported_family(v, X_c_obs, t2),
                         SubspaceKind::invariant);
  SubspaceFamily f_nc_obs(transported_family(v, X_nc_obs, t2),
                          SubspaceKind::invariant);
  SubspaceFamily f_nc_unobs(transported_family(v, X_nc_unobs, t2),
                            SubspaceKind::invariant);

  const MatFn& Q = f_c_obs.basis;
  const MatFn QH = Q.adjoint();
  DiffVessel minimal(QH * v.A1 * Q, QH * v.A2 * Q - QH * Q.derivative(),
                     QH * v.Bt, v.C * Q, v.D, v.Dt, v.sig);

  return KalmanDecomp{
      {std::move(f_c_unobs), std::move(f_c_obs), std::move(f_nc_obs),
       std::move(f_nc_unobs)},
      {static_cast<int>(X_c_unobs.cols()), static_cast<int>(X_c_obs.cols()),
       static_cast<int>(X_nc_obs.cols()), static_cast<int>(X_nc_unobs.cols())},
      std::move(minimal),
      tri};
}

std::vector<CMat> moments(const DiffVessel& v, double t2, int kmax) {
  if (kmax < 1) throw DomainError("moments: kmax must be positive");
  const CMat A = v.A1(t2);
  const CMat B = v.Bt(t2);
  const CMat C = v.C(t2);
  std::vector<CMat> out;
  out.reserve(kmax);
  CMat cur = B;
  for (int k = 0; k < kmax; ++k) {
    out.push_back(C * cur);
    cur = A * cur;
  }
  return out;
}

bool equivalent(const DiffVessel& v1, const DiffVessel& v2, int t2_samples,
                double tol) {
  if (Signature::distance(v1.sig, v2.sig) > tol) {
    throw PreconditionError("equivalent: signatures differ");
  }
  if ((v1.D - v2.D).max_norm() > tol || (v1.Dt - v2.Dt).max_norm() > tol) {
    throw PreconditionError("equivalent: feed-through data differ");
  }
  const int order = v1.state_dim() + v2.state_dim();
  if (order == 0) return true;
  for (double t : interior_samples(v1.grid(), std::max(1, t2_samples))) {
    const auto m1 = moments(v1, t, order);
    const auto m2 = moments(v2, t, order);
    for (int k = 0; k < order; ++k) {
      if (max_abs(m1[k] - m2[k]) > tol) return false;
    }
  }
  return true;
}

MatFn build_similarity(const DiffVessel& v1, const DiffVessel& v2, double t2,
                       double tol) {
  const int n1 = v1.state_dim();
  const int n2 = v2.state_dim();
  if (n1 != n2) {
    throw PreconditionError("build_similarity: state dimensions differ");
  }
  {
    const CMat Qc = controllable_subspace(v1, t2);
    const CMat Qu = unobservable_subspace(v1, t2);
    const CMat Qc2 = controllable_subspace(v2, t2);
    const CMat Qu2 = unobservable_subspace(v2, t2);
    if (Qc.cols() != n1 || Qu.cols() != 0 || Qc2.cols() != n2 ||
        Qu2.cols() != 0) {
      throw PreconditionError("build_similarity: vessels must be minimal");
    }
  }
  if (!equivalent(v1, v2, 3, std::max(tol, 1e-8))) {
    throw NoSimilarityError(
        "build_similarity: transfer functions differ, no similarity exists");
  }

  const TimeGrid& g = v1.grid();
  std::vector<CMat> T(g.points);
  for (int i = 0; i < g.points; ++i) {
    const double t = g.node(i);
    const CMat K1 = krylov_matrix(v1.A1(t), v1.Bt(t));
    const CMat K2 = krylov_matrix(v2.A1(t), v2.Bt(t));
    // T K1 = K2 in least squares over the generators.
    T[i] = K1.adjoint()
               .colPivHouseholderQr()
               .solve(K2.adjoint())
               .adjoint();
  }
  MatFn Tfn(g, std::move(T));

  const MatFn Td = Tfn.derivative();
  double res = 0.0;
  res = std::max(res, (v2.A1 * Tfn - Tfn * v1.A1).max_norm());
  res = std::max(res, (Tfn * v1.Bt - v2.Bt).max_norm());
  res = std::max(res, (v2.C * Tfn - v1.C).max_norm());
  res = std::max(res, (v2.A2 * Tfn - Tfn * v1.A2 - Td).max_norm());
  if (res > tol) {
    std::ostringstream os;
    os << "build_similarity: intertwining residual " << res << " exceeds "
       << tol;
    throw NoSimilarityError(os.str());
  }
  return Tfn;
}

}  // namespace vessel
