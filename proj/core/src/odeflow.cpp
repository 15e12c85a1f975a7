#include "vessel/odeflow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vessel/signature.hpp"

namespace vessel {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th-order weights (b7 = 1/40 hits the trailing stage).
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

struct Stepper {
  const OdeRhs& f;
  const OdeOptions& opts;
  double t;
  CMat y;
  double h = 0.0;
  long steps = 0;

  void init_step(double span) {
    h = span / 128.0;
  }

  // One accepted step, no farther than t_target.
  void step_towards(double t_target) {
    const double dir = t_target > t ? 1.0 : -1.0;
    for (;;) {
      if (++steps > opts.max_steps) {
        throw SolverError("ode integration exceeded the step budget");
      }
      double hs = dir * std::min(std::abs(h), std::abs(t_target - t));
      if (std::abs(hs) < 1e-15 * (std::abs(t) + 1.0)) {
        throw SolverError("ode integration step size underflow");
      }
      const CMat k1 = f(t, y);
      const CMat k2 = f(t + c2 * hs, y + hs * (a21 * k1));
      const CMat k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
      const CMat k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      const CMat k5 =
          f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const CMat k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 +
                                          a64 * k4 + a65 * k5));
      const CMat y5 =
          y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const CMat k7 = f(t + hs, y5);
      const CMat y4 =
          y + hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err = 0.0;
      for (int r = 0; r < y.rows(); ++r) {
        for (int c = 0; c < y.cols(); ++c) {
          const double scale =
              opts.atol +
              opts.rtol * std::max(std::abs(y(r, c)), std::abs(y5(r, c)));
          err = std::max(err, std::abs(y5(r, c) - y4(r, c)) / scale);
        }
      }
      const double factor =
          err > 0.0 ? 0.9 * std::pow(err, -0.2)
                    : 5.0;
      if (err <= 1.0) {
        t = t + hs;
        y = y5;
        h = hs * std::min(5.0, std::max(0.2, factor));
        return;
      }
      h = hs * std::max(0.2, factor);
    }
  }

  void advance_to(double t_target) {
    const double eps = 1e-14 * (std::abs(t_target) + 1.0);
    while (std::abs(t_target - t) > eps) step_towards(t_target);
    t = t_target;
  }
};

}  // namespace

CMat integrate(const OdeRhs& f, CMat y0, double t0, double t1,
               const OdeOptions& opts) {
  if (t0 == t1) return y0;
  Stepper s{f, opts, t0, std::move(y0)};
  s.init_step(t1 - t0);
  s.advance_to(t1);
  return s.y;
}

std::vector<CMat> integrate_path(const OdeRhs& f, const CMat& y0,
                                 const std::vector<double>& times,
                                 const OdeOptions& opts) {
  std::vector<CMat> out;
  out.reserve(times.size());
  out.push_back(y0);
  if (times.size() < 2) return out;
  Stepper s{f, opts, times[0], y0};
  s.init_step(times.back() - times.front());
  for (std::size_t i = 1; i < times.size(); ++i) {
    s.advance_to(times[i]);
    out.push_back(s.y);
  }
  return out;
}

CMat evolution_semigroup(const MatFn& A2, double t_from, double t_to,
                         const OdeOptions& opts) {
  if (!A2.grid().contains(t_from) || !A2.grid().contains(t_to)) {
    throw DomainError("evolution_semigroup: time outside the grid interval");
  }
  const int n = A2.rows();
  auto rhs = [&A2](double t, const CMat& y) -> CMat { return A2(t) * y; };
  return integrate(rhs, CMat::Identity(n, n), t_from, t_to, opts);
}

namespace {

// Samples flow' = coeff(t) flow with flow(t0) = I onto the signature grid,
// integrating left and right from the base time.
MatFn sample_flow(const TimeGrid& g, const OdeRhs& rhs, int dim, double t0,
                  const OdeOptions& opts) {
  if (!g.contains(t0)) {
    throw DomainError("fundamental matrix: base time outside the grid");
  }
  std::vector<CMat> samples(g.points);
  const CMat eye = CMat::Identity(dim, dim);

  std::vector<double> right{t0};
  for (int i = 0; i < g.points; ++i) {
    if (g.node(i) > t0) right.push_back(g.node(i));
  }
  std::vector<double> left{t0};
  for (int i = g.points - 1; i >= 0; --i) {
    if (g.node(i) < t0) left.push_back(g.node(i));
  }
  const auto right_vals = integrate_path(rhs, eye, right, opts);
  const auto left_vals = integrate_path(rhs, eye, left, opts);

  std::size_t r = 1, l = 1;
  for (int i = 0; i < g.points; ++i) {
    const double t = g.node(i);
    if (t > t0) {
      samples[i] = right_vals[r++];
    } else if (t < t0) {
      // left path visits nodes in decreasing order
      samples[i] = left_vals[left.size() - (l++)];
    } else {
      samples[i] = eye;
    }
  }
  for (int i = 0; i < g.points; ++i) {
    if (condition_number(samples[i]) > 1e12) {
      std::ostringstream os;
      os << "fundamental matrix lost invertibility at node " << i;
      throw SolverError(os.str());
    }
  }
  return MatFn(g, std::move(samples));
}

}  // namespace

FundMatrix fundamental_input(const Signature& sig, cd lambda, double t0,
                             const OdeOptions& opts) {
  const MatFn s1inv = sig.sigma1.inverse();
  auto rhs = [&, lambda](double t, const CMat& y) -> CMat {
    return s1inv(t) * (lambda * sig.sigma2(t) + sig.gamma(t)) * y;
  };
  return FundMatrix{lambda, t0,
                    sample_flow(sig.grid(), rhs, sig.dim_in(), t0, opts)};
}

FundMatrix fundamental_output(const Signature& sig, cd lambda, double t0,
                              const OdeOptions& opts) {
  const MatFn s1sinv = sig.sigma1s.inverse();
  auto rhs = [&, lambda](double t, const CMat& y) -> CMat {
    return s1sinv(t) * (lambda * sig.sigma2s(t) + sig.gammas(t)) * y;
  };
  return FundMatrix{lambda, t0,
                    sample_flow(sig.grid(), rhs, sig.dim_out(), t0, opts)};
}

FundMatrix fundamental_adjoint_input(const Signature& sig, cd mu, double t0,
                                     const OdeOptions& opts) {
  const MatFn s1sH = sig.sigma1s.adjoint();
  const MatFn s1sHinv = s1sH.inverse();
  const MatFn s1sHd = s1sH.derivative();
  const MatFn s2sH = sig.sigma2s.adjoint();
  const MatFn gsH = sig.gammas.adjoint();
  auto rhs = [=, &sig](double t, const CMat& y) -> CMat {
    return s1sHinv(t) * (mu * s2sH(t) - gsH(t) - s1sHd(t)) * y;
  };
  return FundMatrix{mu, t0,
                    sample_flow(sig.grid(), rhs, sig.dim_out(), t0, opts)};
}

FundMatrix fundamental_adjoint_output(const Signature& sig, cd mu, double t0,
                                      const OdeOptions& opts) {
  const MatFn s1H = sig.sigma1.adjoint();
  const MatFn s1Hinv = s1H.inverse();
  const MatFn s1Hd = s1H.derivative();
  const MatFn s2H = sig.sigma2.adjoint();
  const MatFn gH = sig.gamma.adjoint();
  auto rhs = [=, &sig](double t, const CMat& y) -> CMat {
    return s1Hinv(t) * (mu * s2H(t) - gH(t) - s1Hd(t)) * y;
  };
  return FundMatrix{mu, t0,
                    sample_flow(sig.grid(), rhs, sig.dim_in(), t0, opts)};
}

std::vector<MatFn> solve_companion_chain(const Signature& sig, cd z, int length,
                                         ChainSide side, double t0,
                                         const std::vector<CVec>& seeds,
                                         const OdeOptions& opts) {
  if (length < 1) {
    throw DomainError("solve_companion_chain: length must be at least 1");
  }
  if (static_cast<int>(seeds.size()) != length) {
    throw DomainError("solve_companion_chain: one seed per chain member");
  }
  const int dim = side == ChainSide::output ? sig.dim_out() : sig.dim_in();
  for (const CVec& s : seeds) {
    if (s.size() != dim) {
      throw ShapeError("solve_companion_chain: seed dimension mismatch");
    }
  }

  // Stacked linear system: member i is driven by member i-1.
  OdeRhs rhs;
  if (side == ChainSide::output) {
    const MatFn s1sinv = sig.sigma1s.inverse();
    rhs = [=, &sig](double t, const CMat& y) -> CMat {
      const CMat inv = s1sinv(t);
      const CMat hom = inv * (z * sig.sigma2s(t) + sig.gammas(t));
      const CMat drv = inv * sig.sigma2s(t);
      CMat dy(y.rows(), 1);
      for (int i = 0; i < length; ++i) {
        CMat yi = y.block(i * dim, 0, dim, 1);
        CMat d = hom * yi;
        if (i > 0) d -= drv * y.block((i - 1) * dim, 0, dim, 1);
        dy.block(i * dim, 0, dim, 1) = d;
      }
      return dy;
    };
  } else {
    const cd mu = -std::conj(z);
    const MatFn s1H = sig.sigma1.adjoint();
    const MatFn s1Hinv = s1H.inverse();
    const MatFn s1Hd = s1H.derivative();
    const MatFn s2H = sig.sigma2.adjoint();
    const MatFn gH = sig.gamma.adjoint();
    rhs = [=, &sig](double t, const CMat& y) -> CMat {
      const CMat inv = s1Hinv(t);
      const CMat hom = inv * (mu * s2H(t) - gH(t) - s1Hd(t));
      const CMat drv = inv * s2H(t);
      CMat dy(y.rows(), 1);
      for (int i = 0; i < length; ++i) {
        CMat yi = y.block(i * dim, 0, dim, 1);
        CMat d = hom * yi;
        if (i > 0) d += drv * y.block((i - 1) * dim, 0, dim, 1);
        dy.block(i * dim, 0, dim, 1) = d;
      }
      return dy;
    };
  }

  CMat y0(dim * length, 1);
  for (int i = 0; i < length; ++i) y0.block(i * dim, 0, dim, 1) = seeds[i];

  const MatFn stacked = [&] {
    auto flow_rhs = rhs;
    const TimeGrid& g = sig.grid();
    std::vector<double> right{t0}, left{t0};
    for (int i = 0; i < g.points; ++i)
      if (g.node(i) > t0) right.push_back(g.node(i));
    for (int i = g.points - 1; i >= 0; --i)
      if (g.node(i) < t0) left.push_back(g.node(i));
    const auto rv = integrate_path(flow_rhs, y0, right, opts);
    const auto lv = integrate_path(flow_rhs, y0, left, opts);
    std::vector<CMat> samples(g.points);
    std::size_t r = 1, l = 1;
    for (int i = 0; i < g.points; ++i) {
      const double t = g.node(i);
      if (t > t0) samples[i] = rv[r++];
      else if (t < t0) samples[i] = lv[left.size() - (l++)];
      else samples[i] = y0;
    }
    return MatFn(g, std::move(samples));
  }();

  std::vector<MatFn> chain;
  chain.reserve(length);
  for (int i = 0; i < length; ++i) {
    std::vector<CMat> member(sig.grid().points);
    for (int k = 0; k < sig.grid().points; ++k) {
      member[k] = stacked.sample_at(k).block(i * dim, 0, dim, 1);
    }
    chain.emplace_back(sig.grid(), std::move(member));
  }
  return chain;
}

}  // namespace vessel
