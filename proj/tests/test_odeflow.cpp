#include <doctest.h>

#include "support/builders.hpp"
#include "vessel/fixtures.hpp"
#include "vessel/odeflow.hpp"

using namespace vessel;
using vlabtest::Rng;

namespace {
MatFn konst(const TimeGrid& g, cd v) {
  CMat m(1, 1);
  m(0, 0) = v;
  return MatFn::constant(g, m);
}
}  // namespace

TEST_CASE("evolution semigroup basics") {
  const TimeGrid g(0.0, 1.0, 33);
  SUBCASE("zero generator gives the identity") {
    const CMat F = evolution_semigroup(MatFn::zero(g, 2, 2), 0.0, 1.0);
    CHECK(max_abs(F - CMat::Identity(2, 2)) < 1e-14);
  }
  SUBCASE("constant scalar generator is the exponential") {
    const cd a(0.3, -0.4);
    const CMat F = evolution_semigroup(konst(g, a), 0.0, 1.0);
    CHECK(std::abs(F(0, 0) - std::exp(a)) < 1e-9);
  }
  SUBCASE("outside the grid interval") {
    CHECK_THROWS_AS(evolution_semigroup(konst(g, 1.0), 0.0, 2.0), DomainError);
  }
}

TEST_CASE("cocycle identity on random constant generators") {
  Rng rng(5);
  const TimeGrid g(0.0, 1.0, 33);
  for (int rep = 0; rep < 5; ++rep) {
    CMat A(3, 3);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        A(r, c) = 0.3 * vlabtest::random_unit(rng);
      }
    }
    const MatFn A2 = MatFn::constant(g, A);
    const CMat Fts = evolution_semigroup(A2, 0.4, 1.0);
    const CMat Fsr = evolution_semigroup(A2, 0.0, 0.4);
    const CMat Ftr = evolution_semigroup(A2, 0.0, 1.0);
    CHECK(max_abs(Fts * Fsr - Ftr) < 1e-8);
  }
}

TEST_CASE("input fundamental matrix") {
  SUBCASE("v0 data: flow is constant one") {
    const Signature sig = fixtures::v0().sig;
    const FundMatrix phi = fundamental_input(sig, cd(2.0, 1.0), 0.0);
    for (double t : {0.0, 0.3, 0.9}) {
      CHECK(std::abs(phi(t)(0, 0) - cd(1.0)) < 1e-12);
    }
  }
  SUBCASE("va data: flow is exp(lambda t)") {
    const Signature sig = fixtures::va(1.0).sig;
    const cd lam(1.0, 1.0);
    const FundMatrix phi = fundamental_input(sig, lam, 0.0);
    CHECK(std::abs(phi(0.7)(0, 0) - std::exp(lam * 0.7)) < 1e-8);
  }
  SUBCASE("initial condition is exact") {
    const Signature sig = fixtures::va(1.0).sig;
    const FundMatrix phi = fundamental_input(sig, cd(0.5, -2.0), 0.0);
    CHECK(max_abs(phi(0.0) - CMat::Identity(1, 1)) == 0.0);
  }
}

TEST_CASE("output fundamental matrix") {
  SUBCASE("vg data: flow is exp((lambda+g) t)") {
    const double gval = 0.7;
    const Signature sig = fixtures::vg(gval).sig;
    const cd lam(0.8, 0.3);
    const FundMatrix phis = fundamental_output(sig, lam, 0.0);
    CHECK(std::abs(phis(0.6)(0, 0) - std::exp((lam + gval) * 0.6)) < 1e-8);
  }
  SUBCASE("g = 0 reduces to the input flow of va") {
    const Signature sig = fixtures::vg(0.0).sig;
    const cd lam(1.3, -0.2);
    const FundMatrix a = fundamental_output(sig, lam, 0.0);
    const FundMatrix b = fundamental_input(fixtures::va(0.0).sig, lam, 0.0);
    double err = 0.0;
    for (double t : {0.1, 0.5, 1.0}) {
      err = std::max(err, max_abs(a(t) - b(t)));
    }
    CHECK(err < 1e-9);
  }
  SUBCASE("inverse flow satisfies its own differential equation") {
    const Signature sig = fixtures::vg(1.0).sig;
    const cd lam(1.1, 0.4);
    const FundMatrix phis = fundamental_output(sig, lam, 0.0);
    const MatFn inv = phis.flow.inverse();
    const MatFn lhs = inv.derivative();
    const MatFn rhs =
        -(inv * sig.sigma1s.inverse() * (lam * sig.sigma2s + sig.gammas));
    CHECK((lhs - rhs).max_norm() < 1e-7);
  }
}

TEST_CASE("fundamental matrix identities on random data") {
  Rng rng(17);
  const TimeGrid g = fixtures::default_grid();
  for (int rep = 0; rep < 3; ++rep) {
    const auto data = vlabtest::random_scalar_data(rng, 2.0, false);
    const Signature sig = vlabtest::make_signature(g, 1, data);
    const cd lam = 1.5 * vlabtest::random_unit(rng);

    const FundMatrix phi = fundamental_input(sig, lam, 0.0);
    const MatFn coeff = sig.sigma1.inverse() * (lam * sig.sigma2 + sig.gamma);

    // flow' = coeff flow
    CHECK((phi.flow.derivative() - coeff * phi.flow).max_norm() < 1e-7);
    // (flow^{-1})' = -flow^{-1} coeff
    const MatFn inv = phi.flow.inverse();
    CHECK((inv.derivative() + inv * coeff).max_norm() < 1e-7);
    // adjoint pair of relations
    const MatFn flowH = phi.flow.adjoint();
    const MatFn coeffH = coeff.adjoint();
    CHECK((flowH.derivative() - flowH * coeffH).max_norm() < 1e-7);
    const MatFn invH = inv.adjoint();
    CHECK((invH.derivative() + coeffH * invH).max_norm() < 1e-7);

    // multiplying by a constant vector stays a solution of the input ODE
    CVec e(1);
    e(0) = vlabtest::random_unit(rng);
    const MatFn sol = phi.flow * CMat(e);
    const MatFn res = lam * (sig.sigma2 * sol) - sig.sigma1 * sol.derivative() +
                      sig.gamma * sol;
    CHECK(res.max_norm() < 1e-7);
  }
}

TEST_CASE("adjoint output flow matches the conjugated inverse input flow") {
  Rng rng(21);
  const TimeGrid g = fixtures::default_grid();
  const auto data = vlabtest::random_scalar_data(rng, 1.0, false);
  const Signature sig = vlabtest::make_signature(g, 1, data);
  const cd lam(0.6, -0.8);
  const FundMatrix phi = fundamental_input(sig, lam, 0.0);
  const FundMatrix psis = fundamental_adjoint_output(sig, -std::conj(lam), 0.0);
  const MatFn s1invH = sig.sigma1.inverse().adjoint();
  double err = 0.0;
  for (double t : {0.25, 0.6, 1.0}) {
    const CMat lhs = s1invH(t) * phi(t).adjoint().inverse();
    const CMat rhs = psis(t) * s1invH(0.0);
    err = std::max(err, max_abs(lhs - rhs));
  }
  CHECK(err < 1e-7);
}

TEST_CASE("adjoint input flow matches the conjugated inverse output flow") {
  SUBCASE("v0 data gives the constant flow") {
    const Signature sig = fixtures::v0().sig;
    const FundMatrix psi = fundamental_adjoint_input(sig, cd(1.2, 0.5), 0.0);
    CHECK(std::abs(psi(0.8)(0, 0) - cd(1.0)) < 1e-12);
    CHECK(max_abs(psi(0.0) - CMat::Identity(1, 1)) == 0.0);
  }
  SUBCASE("sigma1s^{-H} Phi_*^{-H}(lambda) = Psi(-conj(lambda)) sigma1s^{-H}") {
    const Signature sig = fixtures::vg(1.0).sig;
    const cd lam(0.9, 0.7);
    const FundMatrix phis = fundamental_output(sig, lam, 0.0);
    const FundMatrix psi =
        fundamental_adjoint_input(sig, -std::conj(lam), 0.0);
    const MatFn s1sinvH = sig.sigma1s.inverse().adjoint();
    double err = 0.0;
    for (double t : {0.2, 0.5, 1.0}) {
      const CMat lhs = s1sinvH(t) * phis(t).adjoint().inverse();
      const CMat rhs = psi(t) * s1sinvH(0.0);
      err = std::max(err, max_abs(lhs - rhs));
    }
    CHECK(err < 1e-7);
  }
}

TEST_CASE("companion chains") {
  SUBCASE("hand-solved scalar chain on symmetric data") {
    // sigma's all one, gammas zero; z arbitrary. Member 0 is kappa e^{zt},
    // member 1 is (alpha - kappa t) e^{zt}.
    const Signature sig = fixtures::vg(0.0).sig;
    const cd z(0.4, 0.3);
    const cd kappa(1.3, -0.2), alpha(0.5, 0.1);
    CVec s0(1), s1(1);
    s0(0) = kappa;
    s1(0) = alpha;
    const auto chain =
        solve_companion_chain(sig, z, 2, ChainSide::output, 0.0, {s0, s1});
    double err = 0.0;
    for (double t : {0.0, 0.25, 0.6, 1.0}) {
      err = std::max(err,
                     std::abs(chain[0](t)(0, 0) - kappa * std::exp(z * t)));
      err = std::max(err, std::abs(chain[1](t)(0, 0) -
                                   (alpha - kappa * t) * std::exp(z * t)));
    }
    CHECK(err < 1e-8);
  }
  SUBCASE("length one is a homogeneous flow column") {
    const Signature sig = fixtures::va(0.0).sig;
    const cd z(0.8, -0.1);
    CVec seed(1);
    seed(0) = cd(2.0, 1.0);
    const auto chain =
        solve_companion_chain(sig, z, 1, ChainSide::output, 0.0, {seed});
    const FundMatrix phis = fundamental_output(sig, z, 0.0);
    double err = 0.0;
    for (double t : {0.3, 0.9}) {
      err = std::max(err, max_abs(chain[0](t) - phis(t) * CMat(seed)));
    }
    CHECK(err < 1e-9);
  }
  SUBCASE("vanishing sigma2s removes the driving term") {
    const Signature sig = fixtures::v0().sig;
    const cd z(0.5, 0.2);
    CVec s0(1), s1(1), s2(1);
    s0(0) = 1.0;
    s1(0) = cd(0.3, 0.4);
    s2(0) = cd(-1.0, 0.1);
    const auto chain = solve_companion_chain(sig, z, 3, ChainSide::output, 0.0,
                                             {s0, s1, s2});
    // every member solves the same homogeneous equation
    for (const MatFn& member : chain) {
      const MatFn res = z * (sig.sigma2s * member) -
                        sig.sigma1s * member.derivative() +
                        sig.gammas * member;
      CHECK(res.max_norm() < 1e-9);
    }
  }
}
