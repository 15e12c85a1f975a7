#include "vessel/ops.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace vessel {

SubspaceFamily::SubspaceFamily(MatFn basis_, SubspaceKind kind_)
    : basis(std::move(basis_)), kind(kind_) {
  const int k = basis.cols();
  for (int i = 0; i < basis.points(); ++i) {
    const CMat& Q = basis.sample_at(i);
    const double dev =
        k == 0 ? 0.0 : max_abs(Q.adjoint() * Q - CMat::Identity(k, k));
    if (dev > 1e-10) {
      std::ostringstream os;
      os << "SubspaceFamily: basis columns not orthonormal at node " << i
         << " (deviation " << dev << ")";
      throw PreconditionError(os.str());
    }
  }
}

DiffVessel cascade(const DiffVessel& v1, const DiffVessel& v2) {
  if (v1.sig.dim_out() != v2.sig.dim_in()) {
    throw PreconditionError(
        "cascade: output dimension of v1 differs from input dimension of v2");
  }
  if (!(v1.grid() == v2.grid())) {
    throw PreconditionError("cascade: vessels live on different grids");
  }
  const char* names[3] = {"sigma1s'/sigma1''", "sigma2s'/sigma2''",
                          "gammas'/gamma''"};
  const MatFn* left[3] = {&v1.sig.sigma1s, &v1.sig.sigma2s, &v1.sig.gammas};
  const MatFn* right[3] = {&v2.sig.sigma1, &v2.sig.sigma2, &v2.sig.gamma};
  for (int d = 0; d < 3; ++d) {
    for (int i = 0; i < v1.grid().points; ++i) {
      const double dev = max_abs(left[d]->sample_at(i) - right[d]->sample_at(i));
      if (dev > 1e-10) {
        std::ostringstream os;
        os << "cascade: compatibility violated for " << names[d] << " at node "
           << i << " (deviation " << dev << ")";
        throw PreconditionError(os.str());
      }
    }
  }

  const int n1 = v1.state_dim(), n2 = v2.state_dim();
  const int n = n1 + n2;
  const TimeGrid& g = v1.grid();
  std::vector<CMat> A1(g.points), A2(g.points), Bt(g.points), C(g.points),
      D(g.points), Dt(g.points);
  for (int i = 0; i < g.points; ++i) {
    const CMat coupling1 =
        v2.Bt.sample_at(i) * v2.sig.sigma1.sample_at(i) * v1.C.sample_at(i);
    const CMat coupling2 =
        v2.Bt.sample_at(i) * v2.sig.sigma2.sample_at(i) * v1.C.sample_at(i);
    CMat a1 = CMat::Zero(n, n), a2 = CMat::Zero(n, n);
    a1.topLeftCorner(n1, n1) = v1.A1.sample_at(i);
    a1.bottomLeftCorner(n2, n1) = coupling1;
    a1.bottomRightCorner(n2, n2) = v2.A1.sample_at(i);
    a2.topLeftCorner(n1, n1) = v1.A2.sample_at(i);
    a2.bottomLeftCorner(n2, n1) = coupling2;
    a2.bottomRightCorner(n2, n2) = v2.A2.sample_at(i);
    A1[i] = a1;
    A2[i] = a2;

    CMat bt(n, v1.sig.dim_in());
    bt.topRows(n1) = v1.Bt.sample_at(i);
    bt.bottomRows(n2) = v2.Bt.sample_at(i) * v1.Dt.sample_at(i);
    Bt[i] = bt;

    CMat c(v2.sig.dim_out(), n);
    c.leftCols(n1) = v2.D.sample_at(i) * v1.C.sample_at(i);
    c.rightCols(n2) = v2.C.sample_at(i);
    C[i] = c;

    D[i] = v2.D.sample_at(i) * v1.D.sample_at(i);
    Dt[i] = v2.Dt.sample_at(i) * v1.Dt.sample_at(i);
  }
  Signature sig(v1.sig.sigma1, v1.sig.sigma2, v1.sig.gamma, v2.sig.sigma1s,
                v2.sig.sigma2s, v2.sig.gammas);
  return DiffVessel(MatFn(g, std::move(A1)), MatFn(g, std::move(A2)),
                    MatFn(g, std::move(Bt)), MatFn(g, std::move(C)),
                    MatFn(g, std::move(D)), MatFn(g, std::move(Dt)),
                    std::move(sig));
}

DiffVessel invert(const DiffVessel& v) {
  const MatFn Dinv = v.D.inverse();
  const MatFn Dtinv = v.Dt.inverse();
  const MatFn A1x = v.A1 - v.Bt * v.sig.sigma1 * Dinv * v.C;
  const MatFn A2x = v.A2 - v.Bt * v.sig.sigma2 * Dinv * v.C;
  return DiffVessel(A1x, A2x, v.Bt * Dtinv, -(Dinv * v.C), Dinv, Dtinv,
                    v.sig.swapped());
}

DiffVessel adjoint(const DiffVessel& v) {
  const MatFn s1H = v.sig.sigma1.adjoint();
  const MatFn s1sH = v.sig.sigma1s.adjoint();
  Signature sig(s1sH, v.sig.sigma2s.adjoint(),
                -(v.sig.gammas.adjoint() + s1sH.derivative()), s1H,
                v.sig.sigma2.adjoint(),
                -(v.sig.gamma.adjoint() + s1H.derivative()));
  return DiffVessel(-v.A1.adjoint(), -v.A2.adjoint(), -v.C.adjoint(),
                    v.Bt.adjoint(), v.Dt.adjoint(), v.D.adjoint(),
                    std::move(sig));
}

DiffVessel gauge_transform(const DiffVessel& v, const MatFn& T,
                           double cond_limit) {
  if (T.rows() != v.state_dim() || T.cols() != v.state_dim()) {
    throw ShapeError("gauge_transform: T must be state_dim x state_dim");
  }
  const MatFn Tinv = T.inverse(cond_limit);
  const MatFn Td = T.derivative();
  return DiffVessel(T * v.A1 * Tinv, T * v.A2 * Tinv + Td * Tinv, T * v.Bt,
                    v.C * Tinv, v.D, v.Dt, v.sig);
}

namespace {

// Flow covariance residual ||(I - P(t)) F(t,s) P(s)|| on sampled pairs.
double flow_covariance_residual(const MatFn& generator, const MatFn& basis) {
  const TimeGrid& g = generator.grid();
  const int n = generator.rows();
  const double times[3] = {g.t_start, 0.5 * (g.t_start + g.t_end), g.t_end};
  double res = 0.0;
  for (double s : times) {
    for (double t : times) {
      if (s == t) continue;
      const CMat F = evolution_semigroup(generator, s, t);
      const CMat Qs = basis(s);
      const CMat Qt = basis(t);
      const CMat P_t = Qt * Qt.adjoint();
      res = std::max(res,
                     max_abs((CMat::Identity(n, n) - P_t) * F * (Qs * Qs.adjoint())));
    }
  }
  return res;
}

}  // namespace

InvarianceReport check_invariant(const DiffVessel& v, const SubspaceFamily& G) {
  if (G.ambient_dim() != v.state_dim()) {
    throw ShapeError("check_invariant: subspace ambient dimension mismatch");
  }
  InvarianceReport rep;
  const int n = v.state_dim();

  MatFn main_op = v.A1;
  MatFn generator = v.A2;
  if (G.kind == SubspaceKind::co_invariant) {
    const MatFn Dinv = v.D.inverse();
    main_op = v.A1 - v.Bt * v.sig.sigma1 * Dinv * v.C;
    generator = v.A2 - v.Bt * v.sig.sigma2 * Dinv * v.C;
  }
  for (int i = 0; i < v.grid().points; ++i) {
    const CMat& Q = G.basis.sample_at(i);
    const CMat P = Q * Q.adjoint();
    rep.a1_residual =
        std::max(rep.a1_residual,
                 max_abs((CMat::Identity(n, n) - P) * main_op.sample_at(i) * P));
  }
  rep.flow_residual = flow_covariance_residual(generator, G.basis);
  return rep;
}

namespace {

struct SubspaceCoords {
  MatFn a1, a2, b, c;
};

// Vessel data restricted to the family's coordinates. The evolution generator
// picks up the frame-motion term -Q^H Q'.
SubspaceCoords restrict_to(const DiffVessel& v, const MatFn& Q) {
  const MatFn QH = Q.adjoint();
  const MatFn Qd = Q.derivative();
  return SubspaceCoords{QH * v.A1 * Q, QH * v.A2 * Q - QH * Qd, QH * v.Bt,
                        v.C * Q};
}

}  // namespace

DiffVessel project(const DiffVessel& v, const SubspaceFamily& G,
                   double pre_tol) {
  if (G.kind != SubspaceKind::invariant) {
    throw PreconditionError("project: subspace family must be invariant");
  }
  const InvarianceReport inv = check_invariant(v, G);
  if (inv.max() > pre_tol) {
    std::ostringstream os;
    os << "project: family fails the invariance check (residual " << inv.max()
       << " > " << pre_tol << ")";
    throw PreconditionError(os.str());
  }

  const SubspaceCoords rc = restrict_to(v, G.basis);
  const MatFn Dinv = v.D.inverse();
  const MatFn Dd = v.D.derivative();
  const MatFn cb = rc.c * rc.b;

  const MatFn sigma1s_p = v.Dt * v.sig.sigma1 * Dinv;
  const MatFn sigma2s_p = v.Dt * v.sig.sigma2 * Dinv;
  const MatFn gammas_p =
      (v.Dt * v.sig.gamma - sigma2s_p * cb * v.sig.sigma1 +
       sigma1s_p * cb * v.sig.sigma2 + sigma1s_p * Dd) *
      Dinv;

  Signature sig(v.sig.sigma1, v.sig.sigma2, v.sig.gamma, sigma1s_p, sigma2s_p,
                gammas_p);
  return DiffVessel(rc.a1, rc.a2, rc.b, rc.c, v.D, v.Dt, std::move(sig));
}

DiffVessel compress(const DiffVessel& v, const SubspaceFamily& Gx,
                    const std::optional<FeedthroughSplit>& split,
                    double pre_tol) {
  if (Gx.kind != SubspaceKind::co_invariant) {
    throw PreconditionError("compress: subspace family must be co-invariant");
  }
  const InvarianceReport inv = check_invariant(v, Gx);
  if (inv.max() > pre_tol) {
    std::ostringstream os;
    os << "compress: family fails the co-invariance check (residual "
       << inv.max() << " > " << pre_tol << ")";
    throw PreconditionError(os.str());
  }

  const int es = v.sig.dim_out();
  const MatFn D_first = split ? split->first : v.D;
  const MatFn D_second =
      split ? split->second : MatFn::identity(v.grid(), es);
  const MatFn Dsec_inv = D_second.inverse();

  const SubspaceCoords rc = restrict_to(v, Gx.basis);
  const MatFn c = Dsec_inv * rc.c;

  // Dt splits alongside D; the default split leaves it untouched.
  const MatFn Dt2 = v.sig.sigma1s * D_second * v.sig.sigma1s.inverse();
  const MatFn Dt_c = Dt2.inverse() * v.Dt;
  const MatFn Dtc_inv = Dt_c.inverse();
  const MatFn Dfd = D_first.derivative();

  const MatFn sigma1_c = Dtc_inv * v.sig.sigma1s * D_first;
  const MatFn sigma2_c = Dtc_inv * v.sig.sigma2s * D_first;
  const MatFn cb = c * rc.b;
  const MatFn gamma_c =
      Dtc_inv * (v.sig.sigma2s * cb * sigma1_c - v.sig.sigma1s * cb * sigma2_c -
                 v.sig.sigma1s * Dfd + v.sig.gammas * D_first);

  Signature sig(sigma1_c, sigma2_c, gamma_c, v.sig.sigma1s, v.sig.sigma2s,
                v.sig.gammas);
  return DiffVessel(rc.a1, rc.a2, rc.b, c, D_first, Dt_c, std::move(sig));
}

}  // namespace vessel
