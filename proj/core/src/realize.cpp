#include "vessel/realize.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace vessel {

namespace {

// Output-side companion residual: sigma1s c_i' - (z sigma2s + gammas) c_i
// + sigma2s c_{i-1}.
double out_chain_residual(const std::vector<MatFn>& chain, const Signature& sig,
                          cd z) {
  double res = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    MatFn r = sig.sigma1s * chain[i].derivative() -
              (z * sig.sigma2s + sig.gammas) * chain[i];
    if (i > 0) r = r + sig.sigma2s * chain[i - 1];
    res = std::max(res, r.max_norm());
  }
  return res;
}

// Input side, conjugate-transposed data at -conj(z):
// sigma1^H b_i' - (-conj(z) sigma2^H - gamma^H - (sigma1^H)') b_i
// - sigma2^H b_{i-1}.
double in_chain_residual(const std::vector<MatFn>& chain, const Signature& sig,
                         cd z) {
  const cd mu = -std::conj(z);
  const MatFn s1H = sig.sigma1.adjoint();
  const MatFn s1Hd = s1H.derivative();
  const MatFn s2H = sig.sigma2.adjoint();
  const MatFn gH = sig.gamma.adjoint();
  double res = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    MatFn r = s1H * chain[i].derivative() -
              (mu * s2H - gH + cd(-1.0, 0.0) * s1Hd) * chain[i];
    if (i > 0) r = r - s2H * chain[i - 1];
    res = std::max(res, r.max_norm());
  }
  return res;
}

}  // namespace

double chain_residual(const PoleChain& chain, const Signature& sig) {
  if (static_cast<int>(chain.out_chain.size()) != chain.order ||
      static_cast<int>(chain.in_chain.size()) != chain.order) {
    throw ShapeError("chain_residual: chain lengths must equal the order");
  }
  return std::max(out_chain_residual(chain.out_chain, sig, chain.z),
                  in_chain_residual(chain.in_chain, sig, chain.z));
}

PoleChain make_pole_chain(const Signature& sig, cd z, int order,
                          const std::vector<CVec>& out_seeds,
                          const std::vector<CVec>& in_seeds, double t0) {
  PoleChain chain;
  chain.z = z;
  chain.order = order;
  chain.out_chain =
      solve_companion_chain(sig, z, order, ChainSide::output, t0, out_seeds);
  chain.in_chain =
      solve_companion_chain(sig, z, order, ChainSide::input, t0, in_seeds);
  return chain;
}

PoleTriple chain_to_triple(const PoleChain& chain) {
  const int n = chain.order;
  const TimeGrid& g = chain.out_chain.front().grid();
  const int es = chain.out_chain.front().rows();
  const int e = chain.in_chain.front().rows();

  CMat T = chain.z * CMat::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) T(i, i + 1) -= 1.0;  // z I - N

  std::vector<CMat> X(g.points), Y(g.points);
  for (int k = 0; k < g.points; ++k) {
    CMat x(es, n), y(n, e);
    for (int j = 0; j < n; ++j) {
      x.col(j) = chain.out_chain[j].sample_at(k);
      // input chain head sits in the last row
      y.row(n - 1 - j) = chain.in_chain[j].sample_at(k).adjoint();
    }
    X[k] = x;
    Y[k] = y;
  }
  return PoleTriple{MatFn(g, std::move(X)), T, MatFn(g, std::move(Y))};
}

double triple_residual(const PoleTriple& triple, const Signature& sig) {
  // sigma1s X' = sigma2s X T + gammas X
  const MatFn rx = sig.sigma1s * triple.X.derivative() -
                   sig.sigma2s * (triple.X * triple.T) - sig.gammas * triple.X;
  // (Y sigma1)' = -T Y sigma2 - Y gamma
  const MatFn ry = (triple.Y * sig.sigma1).derivative() +
                   triple.T * (triple.Y * sig.sigma2) + triple.Y * sig.gamma;
  return std::max(rx.max_norm(), ry.max_norm());
}

namespace {

// Assembles the vessel (A1 = diag(T_i), A2 = 0, Bt = stack(Y_i),
// C = [X_1 ... X_p]) and checks the lambda-free linkage constraints.
DiffVessel assemble_realization(const std::vector<PoleTriple>& triples,
                                const MatFn& D, const Signature& sig) {
  const TimeGrid& g = sig.grid();
  int n = 0;
  for (const PoleTriple& t : triples) n += static_cast<int>(t.T.rows());

  CMat A1c = CMat::Zero(n, n);
  {
    int off = 0;
    for (const PoleTriple& t : triples) {
      const int m = static_cast<int>(t.T.rows());
      A1c.block(off, off, m, m) = t.T;
      off += m;
    }
  }

  std::vector<CMat> C(g.points), Bt(g.points);
  for (int k = 0; k < g.points; ++k) {
    CMat c(sig.dim_out(), n), b(n, sig.dim_in());
    int off = 0;
    for (const PoleTriple& t : triples) {
      const int m = static_cast<int>(t.T.rows());
      c.middleCols(off, m) = t.X.sample_at(k);
      b.middleRows(off, m) = t.Y.sample_at(k);
      off += m;
    }
    C[k] = c;
    Bt[k] = b;
  }
  MatFn Cfn(g, std::move(C));
  MatFn Btfn(g, std::move(Bt));
  MatFn A1 = MatFn::constant(g, A1c);
  MatFn A2 = MatFn::zero(g, n, n);

  // Dt is pinned by the first linkage condition; the remaining two are the
  // lambda-free constraints on the supplied D.
  const MatFn Dt = sig.sigma1s * D * sig.sigma1.inverse();
  const double link2 = (sig.sigma2s * D - Dt * sig.sigma2).max_norm();
  const MatFn CB = Cfn * Btfn;
  const double link3 =
      (Dt * sig.gamma - (sig.sigma2s * CB * sig.sigma1 -
                         sig.sigma1s * CB * sig.sigma2 -
                         sig.sigma1s * D.derivative() + sig.gammas * D))
          .max_norm();
  const double worst = std::max(link2, link3);
  if (worst > 1e-6) {
    std::ostringstream os;
    os << "realization: lambda-free linkage conditions fail (sigma2 condition "
       << link2 << ", gamma condition " << link3 << ")";
    throw LinkageError(os.str(), worst);
  }

  return DiffVessel(std::move(A1), std::move(A2), std::move(Btfn),
                    std::move(Cfn), D, Dt, sig);
}

}  // namespace

DiffVessel realize_single_pole(const PoleChain& chain, const MatFn& D,
                               const Signature& sig, double chain_tol) {
  const double res = chain_residual(chain, sig);
  if (res > chain_tol) {
    std::ostringstream os;
    os << "realize_single_pole: chain ODE residual " << res << " exceeds "
       << chain_tol;
    throw PreconditionError(os.str());
  }
  return assemble_realization({chain_to_triple(chain)}, D, sig);
}

DiffVessel realize_mittag_leffler(const std::vector<PoleTriple>& triples,
                                  const MatFn& D, const Signature& sig,
                                  double triple_tol) {
  if (triples.empty()) {
    throw DomainError("realize_mittag_leffler: at least one pole triple");
  }
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const double res = triple_residual(triples[i], sig);
    if (res > triple_tol) {
      std::ostringstream os;
      os << "realize_mittag_leffler: triple " << i << " ODE residual " << res
         << " exceeds " << triple_tol;
      throw PreconditionError(os.str());
    }
  }
  return assemble_realization(triples, D, sig);
}

std::pair<MatFn, MatFn> propagate_CB(const CMat& C0, const CMat& B0,
                                     const CMat& A1, const Signature& sig,
                                     PropagationMethod method, double t0) {
  const TimeGrid& g = sig.grid();
  const int n = static_cast<int>(A1.rows());
  if (C0.cols() != n || B0.rows() != n) {
    throw ShapeError("propagate_CB: base realization dimensions mismatch");
  }

  if (method == PropagationMethod::ode) {
    const MatFn s1sinv = sig.sigma1s.inverse();
    auto c_rhs = [&](double t, const CMat& y) -> CMat {
      return s1sinv(t) * (sig.sigma2s(t) * y * A1 + sig.gammas(t) * y);
    };
    // W = B sigma1 solves W' = -A1 W sigma1^{-1} sigma2 - W sigma1^{-1} gamma.
    const MatFn s1inv = sig.sigma1.inverse();
    auto w_rhs = [&](double t, const CMat& y) -> CMat {
      const CMat inv = s1inv(t);
      return (-A1) * y * (inv * sig.sigma2(t)) - y * (inv * sig.gamma(t));
    };

    auto sample_matrix_ode = [&](const OdeRhs& rhs, const CMat& y0) {
      std::vector<double> right{t0}, left{t0};
      for (int i = 0; i < g.points; ++i)
        if (g.node(i) > t0) right.push_back(g.node(i));
      for (int i = g.points - 1; i >= 0; --i)
        if (g.node(i) < t0) left.push_back(g.node(i));
      const auto rv = integrate_path(rhs, y0, right);
      const auto lv = integrate_path(rhs, y0, left);
      std::vector<CMat> samples(g.points);
      std::size_t r = 1, l = 1;
      for (int i = 0; i < g.points; ++i) {
        if (g.node(i) > t0) samples[i] = rv[r++];
        else if (g.node(i) < t0) samples[i] = lv[left.size() - (l++)];
        else samples[i] = y0;
      }
      return MatFn(g, std::move(samples));
    };

    const MatFn C = sample_matrix_ode(c_rhs, C0);
    const MatFn W = sample_matrix_ode(w_rhs, B0 * sig.sigma1(t0));
    const MatFn B = W * sig.sigma1.inverse();
    return {C, B};
  }

  // Contour route: C(t) = (1/2 pi i) oint Phi_*(lambda, t, t0) C0 R(lambda)
  // and B(t) sigma1(t) = (1/2 pi i) oint R(lambda) B0 sigma1(t0)
  // Phi^{-1}(lambda, t, t0), on a circle enclosing Spec A1.
  const double radius = 1.5 * A1.norm() + 1.0;
  {
    Eigen::ComplexEigenSolver<CMat> es(A1);
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(std::abs(es.eigenvalues()(i)) - radius);
      if (d < 1e-3 * radius) {
        throw ContourError(
            "propagate_CB: contour passes too close to Spec A1");
      }
      if (std::abs(es.eigenvalues()(i)) > radius) {
        throw ContourError("propagate_CB: contour does not enclose Spec A1");
      }
    }
  }

  auto quadrature = [&](int nodes) -> std::pair<MatFn, MatFn> {
    std::vector<CMat> Cacc(g.points,
                           CMat::Zero(sig.dim_out(), n)),
        Wacc(g.points, CMat::Zero(n, sig.dim_in()));
    const CMat s1_t0 = sig.sigma1(t0);
    for (int j = 0; j < nodes; ++j) {
      const double th = 2.0 * M_PI * j / nodes;
      const cd lam = radius * cd(std::cos(th), std::sin(th));
      const CMat R = (lam * CMat::Identity(n, n) - A1)
                         .partialPivLu()
                         .solve(CMat::Identity(n, n));
      const FundMatrix phis = fundamental_output(sig, lam, t0);
      const FundMatrix phi = fundamental_input(sig, lam, t0);
      for (int i = 0; i < g.points; ++i) {
        const double t = g.node(i);
        const CMat phi_inv =
            phi(t).partialPivLu().solve(CMat::Identity(sig.dim_in(),
                                                       sig.dim_in()));
        Cacc[i] += (lam / static_cast<double>(nodes)) * (phis(t) * C0 * R);
        Wacc[i] += (lam / static_cast<double>(nodes)) * (R * B0 * s1_t0 * phi_inv);
      }
    }
    MatFn Cfn(g, std::move(Cacc));
    MatFn Wfn(g, std::move(Wacc));
    return {Cfn, Wfn * sig.sigma1.inverse()};
  };

  const auto coarse = quadrature(128);
  const auto fine = quadrature(256);
  const double delta = std::max((coarse.first - fine.first).max_norm(),
                                (coarse.second - fine.second).max_norm());
  if (delta > 1e-8) {
    std::ostringstream os;
    os << "propagate_CB: contour quadrature did not converge (node-doubling "
       << "difference " << delta << ")";
    throw ContourError(os.str());
  }
  return fine;
}

LaurentData extract_pole_data(const TransferSampler& sampler, cd z,
                              int max_order, double t2, double radius) {
  if (max_order < 1) {
    throw DomainError("extract_pole_data: max_order must be positive");
  }
  const int M = 256;
  const int probe = max_order + 2;
  CMat first = sampler(z + radius, t2);
  std::vector<CMat> acc(probe, CMat::Zero(first.rows(), first.cols()));
  for (int j = 0; j < M; ++j) {
    const double th = 2.0 * M_PI * j / M;
    const cd w = radius * cd(std::cos(th), std::sin(th));
    const CMat S = sampler(z + w, t2);
    cd wk = w;
    for (int k = 0; k < probe; ++k) {
      acc[k] += (wk / static_cast<double>(M)) * S;
      wk *= w;
    }
  }
  for (int k = probe - 1; k >= max_order; --k) {
    if (max_abs(acc[k]) > 1e-8) {
      std::ostringstream os;
      os << "extract_pole_data: coefficient of order " << (k + 1)
         << " still present beyond max_order " << max_order;
      throw OrderOverflowError(os.str());
    }
  }
  LaurentData out;
  out.z = z;
  out.coefficients.assign(acc.begin(), acc.begin() + max_order);
  out.order = 0;
  for (int k = 0; k < max_order; ++k) {
    if (max_abs(out.coefficients[k]) > 1e-8) out.order = k + 1;
  }
  return out;
}

}  // namespace vessel
