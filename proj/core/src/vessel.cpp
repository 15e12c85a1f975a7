#include "vessel/vessel.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace vessel {

Signature::Signature(MatFn sigma1_, MatFn sigma2_, MatFn gamma_, MatFn sigma1s_,
                     MatFn sigma2s_, MatFn gammas_)
    : sigma1(std::move(sigma1_)),
      sigma2(std::move(sigma2_)),
      gamma(std::move(gamma_)),
      sigma1s(std::move(sigma1s_)),
      sigma2s(std::move(sigma2s_)),
      gammas(std::move(gammas_)) {
  if (sigma1.rows() != sigma1.cols() || sigma1s.rows() != sigma1s.cols()) {
    throw ShapeError("Signature: sigma1 and sigma1s must be square");
  }
  const MatFn* all[] = {&sigma1, &sigma2, &gamma, &sigma1s, &sigma2s, &gammas};
  for (const MatFn* f : all) {
    if (!(f->grid() == sigma1.grid())) {
      throw ShapeError("Signature: all six data functions must share a grid");
    }
  }
  const int e = sigma1.rows();
  const int es = sigma1s.rows();
  if (sigma2.rows() != e || sigma2.cols() != e || gamma.rows() != e ||
      gamma.cols() != e || sigma2s.rows() != es || sigma2s.cols() != es ||
      gammas.rows() != es || gammas.cols() != es) {
    throw ShapeError("Signature: data dimensions are inconsistent");
  }
}

double Signature::distance(const Signature& a, const Signature& b) {
  if (!(a.grid() == b.grid()) || a.dim_in() != b.dim_in() ||
      a.dim_out() != b.dim_out()) {
    return std::numeric_limits<double>::infinity();
  }
  double d = 0.0;
  d = std::max(d, (a.sigma1 - b.sigma1).max_norm());
  d = std::max(d, (a.sigma2 - b.sigma2).max_norm());
  d = std::max(d, (a.gamma - b.gamma).max_norm());
  d = std::max(d, (a.sigma1s - b.sigma1s).max_norm());
  d = std::max(d, (a.sigma2s - b.sigma2s).max_norm());
  d = std::max(d, (a.gammas - b.gammas).max_norm());
  return d;
}

Signature Signature::swapped() const {
  return Signature(sigma1s, sigma2s, gammas, sigma1, sigma2, gamma);
}

DiffVessel::DiffVessel(MatFn A1_, MatFn A2_, MatFn Bt_, MatFn C_, MatFn D_,
                       MatFn Dt_, Signature sig_)
    : A1(std::move(A1_)),
      A2(std::move(A2_)),
      Bt(std::move(Bt_)),
      C(std::move(C_)),
      D(std::move(D_)),
      Dt(std::move(Dt_)),
      sig(std::move(sig_)) {
  const int n = A1.rows();
  const int e = sig.dim_in();
  const int es = sig.dim_out();
  if (A1.cols() != n || A2.rows() != n || A2.cols() != n) {
    throw ShapeError("DiffVessel: A1/A2 must be square of the state dim");
  }
  if (Bt.rows() != n || Bt.cols() != e) {
    throw ShapeError("DiffVessel: Bt must be state_dim x dim_in");
  }
  if (C.rows() != es || C.cols() != n) {
    throw ShapeError("DiffVessel: C must be dim_out x state_dim");
  }
  if (D.rows() != es || D.cols() != e || Dt.rows() != es || Dt.cols() != e) {
    throw ShapeError("DiffVessel: D and Dt must be dim_out x dim_in");
  }
  const MatFn* all[] = {&A1, &A2, &Bt, &C, &D, &Dt};
  for (const MatFn* f : all) {
    if (!(f->grid() == sig.grid())) {
      throw ShapeError("DiffVessel: all data must share the signature grid");
    }
  }
}

double DiffVessel::a1_norm_bound() const {
  double m = 0.0;
  for (int i = 0; i < grid().points; ++i) {
    m = std::max(m, A1.sample_at(i).operatorNorm());
  }
  return m;
}

ResidualReport verify_vessel(const DiffVessel& v, double tol) {
  const MatFn A1d = v.A1.derivative();
  const MatFn BtS1d = (v.Bt * v.sig.sigma1).derivative();
  const MatFn Cd = v.C.derivative();
  const MatFn Dd = v.D.derivative();

  ResidualReport rep;
  rep.tol = tol;
  const int N = v.grid().points;
  rep.per_node.resize(N);
  for (int i = 0; i < N; ++i) {
    const CMat& A1 = v.A1.sample_at(i);
    const CMat& A2 = v.A2.sample_at(i);
    const CMat& Bt = v.Bt.sample_at(i);
    const CMat& C = v.C.sample_at(i);
    const CMat& D = v.D.sample_at(i);
    const CMat& Dt = v.Dt.sample_at(i);
    const CMat& s1 = v.sig.sigma1.sample_at(i);
    const CMat& s2 = v.sig.sigma2.sample_at(i);
    const CMat& g = v.sig.gamma.sample_at(i);
    const CMat& s1s = v.sig.sigma1s.sample_at(i);
    const CMat& s2s = v.sig.sigma2s.sample_at(i);
    const CMat& gs = v.sig.gammas.sample_at(i);

    const double lax = max_abs(A1d.sample_at(i) - (A2 * A1 - A1 * A2));
    const double input =
        max_abs(BtS1d.sample_at(i) - A2 * Bt * s1 + A1 * Bt * s2 + Bt * g);
    const double output =
        max_abs(s1s * Cd.sample_at(i) + s1s * C * A2 - s2s * C * A1 - gs * C);
    const double l1 = max_abs(s1s * D - Dt * s1);
    const double l2 = max_abs(s2s * D - Dt * s2);
    const double l3 = max_abs(Dt * g - (s2s * C * Bt * s1 - s1s * C * Bt * s2 -
                                        s1s * Dd.sample_at(i) + gs * D));

    rep.per_node[i] = {lax, input, output, l1, l2, l3};
    rep.lax = std::max(rep.lax, lax);
    rep.input_cond = std::max(rep.input_cond, input);
    rep.output_cond = std::max(rep.output_cond, output);
    rep.linkage1 = std::max(rep.linkage1, l1);
    rep.linkage2 = std::max(rep.linkage2, l2);
    rep.linkage3 = std::max(rep.linkage3, l3);
  }
  rep.max_over_grid =
      std::max({rep.lax, rep.input_cond, rep.output_cond, rep.linkage1,
                rep.linkage2, rep.linkage3});
  rep.pass = rep.max_over_grid <= tol;
  return rep;
}

std::string ResidualReport::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "lax:           " << lax << "\n"
     << "input_cond:    " << input_cond << "\n"
     << "output_cond:   " << output_cond << "\n"
     << "linkage1:      " << linkage1 << "\n"
     << "linkage2:      " << linkage2 << "\n"
     << "linkage3:      " << linkage3 << "\n"
     << "max_over_grid: " << max_over_grid << "\n"
     << "tol:           " << tol << "\n"
     << "pass:          " << (pass ? "true" : "false") << "\n";
  return os.str();
}

namespace {

// Resolvent solve (lambda I - A1(t2)) X = rhs with a spectrum-distance guard.
CMat resolvent_solve(const DiffVessel& v, cd lambda, double t2,
                     const CMat& rhs) {
  const CMat A1 = v.A1(t2);
  const int n = v.state_dim();
  if (n == 0) return CMat::Zero(0, rhs.cols());
  const CMat M = lambda * CMat::Identity(n, n) - A1;
  const double smin = smallest_singular_value(M);
  const double scale = std::max(A1.norm(), 1.0);
  if (smin <= 1e-10 * scale) {
    std::ostringstream os;
    os << "transfer: lambda " << lambda << " is numerically in Spec A1 "
       << "(distance estimate " << smin << ")";
    throw ResolventError(os.str(), smin);
  }
  return M.partialPivLu().solve(rhs);
}

}  // namespace

CMat transfer(const DiffVessel& v, cd lambda, double t2) {
  const CMat rhs = v.Bt(t2) * v.sig.sigma1(t2);
  const CMat X = resolvent_solve(v, lambda, t2, rhs);
  return v.D(t2) + v.C(t2) * X;
}

double transfer_ode_residual(const DiffVessel& v, cd lambda, double t2) {
  const double h = v.grid().spacing();
  if (t2 - 2 * h < v.grid().t_start - 1e-12 ||
      t2 + 2 * h > v.grid().t_end + 1e-12) {
    throw DomainError(
        "transfer_ode_residual: t2 must be at least two grid steps inside");
  }
  const CMat Sm2 = transfer(v, lambda, t2 - 2 * h);
  const CMat Sm1 = transfer(v, lambda, t2 - h);
  const CMat Sp1 = transfer(v, lambda, t2 + h);
  const CMat Sp2 = transfer(v, lambda, t2 + 2 * h);
  const CMat dS = (Sm2 - 8.0 * Sm1 + 8.0 * Sp1 - Sp2) / (12.0 * h);

  const CMat S = transfer(v, lambda, t2);
  const CMat lhs_out = v.sig.sigma1s(t2).partialPivLu().solve(
      (lambda * v.sig.sigma2s(t2) + v.sig.gammas(t2)) * S);
  const CMat rhs_in = S * v.sig.sigma1(t2).partialPivLu().solve(
                              lambda * v.sig.sigma2(t2) + v.sig.gamma(t2));
  return max_abs(dS - (lhs_out - rhs_in));
}

double check_intertwining(const DiffVessel& v, cd lambda, double t0,
                          double t2) {
  const FundMatrix phi = fundamental_input(v.sig, lambda, t0);
  const FundMatrix phis = fundamental_output(v.sig, lambda, t0);
  const CMat S_t = transfer(v, lambda, t2);
  const CMat S_0 = transfer(v, lambda, t0);
  return max_abs(S_t * phi(t2) - phis(t2) * S_0);
}

ClassIReport class_I_check(const TransferSampler& sampler, const Signature& sig,
                           double lambda_radius, double tol) {
  ClassIReport rep;
  rep.tol = tol;
  const TimeGrid& g = sig.grid();
  const std::vector<double> t_samples = {g.t_start, 0.5 * (g.t_start + g.t_end),
                                         g.t_end};

  // (1) analyticity near infinity: Cauchy-Riemann residual on a circle of
  // twice the radius, via centered differences in the two real directions.
  {
    const double R = 2.0 * lambda_radius;
    const double delta = 1e-5 * R;
    const int M = 8;
    for (int j = 0; j < M; ++j) {
      const double th = 2.0 * M_PI * j / M;
      const cd lam = R * cd(std::cos(th), std::sin(th));
      for (double t : t_samples) {
        const CMat fx =
            (sampler(lam + delta, t) - sampler(lam - delta, t)) / (2 * delta);
        const CMat fy = (sampler(lam + cd(0, delta), t) -
                         sampler(lam - cd(0, delta), t)) /
                        (2 * delta);
        rep.analyticity =
            std::max(rep.analyticity, max_abs(0.5 * (fx + cd(0, 1) * fy)));
      }
    }
  }

  // (2) absolute continuity in t2: first differences must shrink with the
  // step. Compares full-grid against half-grid increments.
  {
    const cd lam = cd(1.7 * lambda_radius, 0.9 * lambda_radius);
    std::vector<CMat> vals(g.points);
    for (int i = 0; i < g.points; ++i) vals[i] = sampler(lam, g.node(i));
    double d1 = 0.0, d2 = 0.0, mag = 0.0;
    for (int i = 0; i + 1 < g.points; ++i) {
      d1 = std::max(d1, max_abs(vals[i + 1] - vals[i]));
      mag = std::max(mag, max_abs(vals[i]));
    }
    for (int i = 0; i + 2 < g.points; i += 2) {
      d2 = std::max(d2, max_abs(vals[i + 2] - vals[i]));
    }
    if (d2 > 1e-12 * (1.0 + mag)) {
      rep.smoothness = std::max(0.0, d1 / d2 - 0.75);
    }
  }

  // (3) intertwining against the signature's input/output flows.
  {
    const double t0 = g.t_start;
    for (int j = 0; j < 4; ++j) {
      const double th = 2.0 * M_PI * j / 4 + 0.3;
      const cd lam = 1.5 * lambda_radius * cd(std::cos(th), std::sin(th));
      const FundMatrix phi = fundamental_input(sig, lam, t0);
      const FundMatrix phis = fundamental_output(sig, lam, t0);
      const CMat S0 = sampler(lam, t0);
      for (double t : t_samples) {
        rep.intertwining = std::max(
            rep.intertwining, max_abs(sampler(lam, t) * phi(t) - phis(t) * S0));
      }
    }
  }

  rep.pass = rep.analyticity <= tol && rep.smoothness <= tol &&
             rep.intertwining <= tol;
  return rep;
}

std::string ClassIReport::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "analyticity:   " << analyticity << "\n"
     << "smoothness:    " << smoothness << "\n"
     << "intertwining:  " << intertwining << "\n"
     << "pass:          " << (pass ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace vessel
