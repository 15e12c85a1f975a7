// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "support/builders.hpp"
#include "vessel/fixtures.hpp"
#include "vessel/io.hpp"
#include "vessel/simulate.hpp"
#include "vessel/structure.hpp"

using namespace vessel;
using vlabtest::Rng;

namespace {

struct Outcome {
  int id;
  std::string name;
  double worst;
  double tol;
  bool pass;
  std::string note;
};

std::vector<Outcome> results;

void record(int id, const std::string& name, double worst, double tol,
            const std::string& note = "") {
  results.push_back(Outcome{id, name, worst, tol, worst <= tol, note});
}

void record_flag(int id, const std::string& name, bool pass,
                 const std::string& note = "") {
  results.push_back(Outcome{id, name, pass ? 0.0 : 1.0, 0.5, pass, note});
}

std::vector<DiffVessel> fixture_population() {
  return {fixtures::v0(), fixtures::va(1.0), fixtures::vg(1.0),
          fixtures::vc2()};
}

double intertwining_max(const DiffVessel& v, const std::vector<cd>& lambdas,
                        const std::vector<double>& times) {
  double worst = 0.0;
  for (const cd lam : lambdas) {
    const FundMatrix phi = fundamental_input(v.sig, lam, 0.0);
    const FundMatrix phis = fundamental_output(v.sig, lam, 0.0);
    const CMat S0 = transfer(v, lam, 0.0);
    for (double t : times) {
      worst = std::max(
          worst, max_abs(transfer(v, lam, t) * phi(t) - phis(t) * S0));
    }
  }
  return worst;
}

// ---------------------------------------------------------------- criteria

void criterion_1_and_2(const std::vector<DiffVessel>& population, Rng& rng) {
  double worst_axiom = 0.0, worst_ode = 0.0, worst_intertwine = 0.0;
  for (const DiffVessel& v : population) {
    worst_axiom = std::max(worst_axiom, verify_vessel(v, 1e-6).max_over_grid);
    const auto lambdas = vlabtest::lambda_samples(v, 10, rng);
    for (const cd lam : lambdas) {
      worst_ode = std::max(worst_ode, transfer_ode_residual(v, lam, 0.5));
    }
    worst_intertwine = std::max(
        worst_intertwine, intertwining_max(v, lambdas, {0.25, 0.5, 1.0}));
  }
  record(1, "axiom residuals < 1e-6 and transfer ODE < 1e-5 on the population",
         std::max(worst_axiom, worst_ode / 10.0), 1e-6,
         "axioms " + format_float(worst_axiom) + ", ode " +
             format_float(worst_ode) + " vs 1e-5");
  record(2, "intertwining relation (SPhi = Phi*S0) < 1e-6", worst_intertwine,
         1e-6);
}

void criterion_3(Rng& rng) {
  double worst = 0.0;
  // closed form for the cascade fixture
  const DiffVessel vc2 = fixtures::vc2();
  double fixture_gap = 0.0;
  for (const cd lam : vlabtest::lambda_samples(vc2, 20, rng)) {
    const cd expected = (1.0 + 1.0 / lam) * (1.0 + 1.0 / lam);
    fixture_gap = std::max(
        fixture_gap, std::abs(transfer(vc2, lam, 0.5)(0, 0) - expected));
  }
  for (int rep = 0; rep < 5; ++rep) {
    const auto [v1, v2] = vlabtest::random_compatible_pair(rng, rep % 2 ? 2 : 1);
    const DiffVessel casc = cascade(v1, v2);
    for (const cd lam : vlabtest::lambda_samples(casc, 20, rng)) {
      for (double t : {0.25, 0.6, 0.9}) {
        worst = std::max(worst,
                         max_abs(transfer(casc, lam, t) -
                                 transfer(v2, lam, t) * transfer(v1, lam, t)));
      }
    }
  }
  record(3, "cascade multiplicativity < 1e-8 (fixture closed form < 1e-10)",
         std::max(worst, fixture_gap * 1e2), 1e-8,
         "fixture " + format_float(fixture_gap) + " vs 1e-10");
}

void criterion_4(Rng& rng) {
  const DiffVessel v0 = fixtures::v0();
  const DiffVessel v0x = invert(v0);
  double fixture_gap = 0.0;
  for (const cd lam : vlabtest::lambda_samples(v0, 10, rng)) {
    fixture_gap = std::max(
        fixture_gap,
        std::abs(transfer(v0x, lam, 0.5)(0, 0) - lam / (lam + 1.0)));
  }
  double worst = 0.0;
  std::vector<DiffVessel> pop = fixture_population();
  for (int i = 0; i < 5; ++i) pop.push_back(vlabtest::random_vessel(rng, 2));
  for (const DiffVessel& v : pop) {
    const DiffVessel vx = invert(v);
    const double extra = vx.a1_norm_bound();
    for (const cd lam : vlabtest::lambda_samples(v, 20, rng, extra)) {
      for (double t : {0.3, 0.8}) {
        worst = std::max(
            worst,
            max_abs(transfer(vx, lam, t) * transfer(v, lam, t) -
                    CMat::Identity(v.sig.dim_in(), v.sig.dim_in())));
      }
    }
  }
  record(4, "inverse reciprocity < 1e-8 (fixture closed form < 1e-10)",
         std::max(worst, fixture_gap * 1e2), 1e-8,
         "fixture " + format_float(fixture_gap) + " vs 1e-10");
}

void criterion_5(const std::vector<DiffVessel>& population, Rng& rng) {
  double worst = 0.0;
  int used = 0;
  for (const DiffVessel& v : population) {
    if (used++ > 24) break;  // fixtures + 20 random vessels
    const DiffVessel adj = adjoint(v);
    for (const cd lam : vlabtest::lambda_samples(v, 4, rng)) {
      for (double t : {0.25, 0.75}) {
        const CMat lhs = v.sig.sigma1s(t).partialPivLu().solve(
            CMat(transfer(adj, -std::conj(lam), t).adjoint()) *
            v.sig.sigma1(t));
        worst = std::max(worst, max_abs(lhs - transfer(v, lam, t)));
      }
    }
  }
  record(5, "adjoint transfer flip relation < 1e-8", worst, 1e-8);
}

void criterion_6(Rng& rng) {
  // diagonal textbook example: exact block sizes and transfer = D
  const TimeGrid g = fixtures::default_grid();
  CMat a1(2, 2), bt(2, 1), c(1, 2), one(1, 1);
  a1 << 1, 0, 0, 2;
  bt << 1, 0;
  c << 0, 1;
  one << 1;
  const DiffVessel diag(MatFn::constant(g, a1), MatFn::zero(g, 2, 2),
                        MatFn::constant(g, bt), MatFn::constant(g, c),
                        MatFn::constant(g, one), MatFn::constant(g, one),
                        fixtures::v0().sig);
  const KalmanDecomp kd = kalman_decompose(diag, 0.5);
  const bool dims_ok =
      kd.dims[0] == 1 && kd.dims[1] == 0 && kd.dims[2] == 1 && kd.dims[3] == 0;
  const double exact_gap = max_abs(transfer(kd.minimal, cd(4.0, 0.0), 0.5) -
                                   diag.D(0.5));

  double worst = 0.0;
  std::vector<DiffVessel> pop = fixture_population();
  for (int i = 0; i < 5; ++i) pop.push_back(vlabtest::random_vessel(rng, 2));
  pop.push_back(cascade(diag, fixtures::v0()));
  for (const DiffVessel& v : pop) {
    const KalmanDecomp k = kalman_decompose(v, 0.5);
    for (const cd lam : vlabtest::lambda_samples(v, 20, rng)) {
      for (double t : {0.25, 0.7}) {
        worst = std::max(worst, max_abs(transfer(k.minimal, lam, t) -
                                        transfer(v, lam, t)));
      }
    }
  }
  record(6, "Kalman minimal part preserves the transfer < 1e-8",
         worst + (dims_ok ? 0.0 : 1.0) + exact_gap, 1e-8,
         dims_ok ? "diag example dims (1,0,1,0), S = D exactly"
                 : "diag example block dims WRONG");
}

void criterion_7(Rng& rng) {
  bool ok = true;
  std::string note;
  double worst = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const DiffVessel v = vlabtest::random_vessel(rng, 2);
    const MatFn T0 = MatFn::sample(v.grid(), [&](double t) {
      CMat m(2, 2);
      m << cd(1.0 + 0.25 * std::sin(t + rep)), cd(0.2, 0.1), cd(0.05 * t),
          cd(1.3);
      return m;
    });
    const DiffVessel gauged = gauge_transform(v, T0);
    if (!equivalent(v, gauged, 5, 1e-7)) {
      ok = false;
      note = "gauge pair tested non-equivalent";
      continue;
    }
    const MatFn T = build_similarity(v, gauged, 0.5, 1e-6);
    worst = std::max(worst, (gauged.A1 * T - T * v.A1).max_norm());
    worst = std::max(worst, (T * v.Bt - gauged.Bt).max_norm());
    worst = std::max(worst, (gauged.C * T - v.C).max_norm());
    worst = std::max(worst,
                     (gauged.A2 * T - T * v.A2 - T.derivative()).max_norm());
  }
  // pole-shifted vessels must test non-equivalent
  const Signature sig = fixtures::v0().sig;
  const PoleChain chain = make_pole_chain(sig, cd(0.7, 0.0), 1,
                                          {CVec::Ones(1)}, {CVec::Ones(1)},
                                          0.0);
  const DiffVessel shifted = realize_single_pole(
      chain, MatFn::identity(fixtures::default_grid(), 1), sig);
  if (equivalent(fixtures::v0(), shifted, 5, 1e-7)) {
    ok = false;
    note = "pole-shifted vessel tested equivalent";
  }
  record(7, "gauge equivalence and similarity residuals < 1e-6",
         ok ? worst : 1.0, 1e-6, note);
}

void criterion_8(const std::vector<DiffVessel>& population) {
  double worst_angle = 0.0;
  bool ranks_ok = true;
  for (const DiffVessel& v : population) {
    for (int k = 0; k < 5; ++k) {
      const double t =
          v.grid().t_start +
          (v.grid().t_end - v.grid().t_start) * (k + 0.5) / 5.0;
      const CMat lc = controllable_subspace(v, t);
      const CMat gc = global_controllable_subspace(v, t, 5);
      const CMat lo = unobservable_subspace(v, t);
      const CMat go = global_unobservable_subspace(v, t, 5);
      if (lc.cols() != gc.cols() || lo.cols() != go.cols()) {
        ranks_ok = false;
        continue;
      }
      for (double a : principal_angles(lc, gc)) {
        worst_angle = std::max(worst_angle, a);
      }
      for (double a : principal_angles(lo, go)) {
        worst_angle = std::max(worst_angle, a);
      }
    }
  }
  record(8, "local and global subspaces agree (rank and angles < 1e-6)",
         ranks_ok ? worst_angle : 1.0, 1e-6);
}

void criterion_9(Rng& rng) {
  double worst = 0.0;
  std::string note;

  // (a) realize -> transfer -> extract recovers the supplied Laurent data
  for (int rep = 0; rep < 6; ++rep) {
    const auto data = vlabtest::random_scalar_data(rng, 0.3, false);
    const Signature sig =
        vlabtest::make_signature(fixtures::default_grid(), 1, data);
    const cd z = vlabtest::uniform(rng, 0.2, 0.6) * vlabtest::random_unit(rng);
    CVec cs(1), bs(1);
    cs(0) = vlabtest::random_unit(rng);
    bs(0) = vlabtest::random_unit(rng);
    const PoleChain chain = make_pole_chain(sig, z, 1, {cs}, {bs}, 0.0);
    const MatFn D =
        vlabtest::linkage_feedthrough(fixtures::default_grid(), 1, data);
    const DiffVessel v = realize_single_pole(chain, D, sig);
    const auto sampler = [&](cd lam, double t) { return transfer(v, lam, t); };
    const double t_probe = 0.5;
    const LaurentData got = extract_pole_data(sampler, z, 2, t_probe, 0.25);
    const CMat supplied = chain.out_chain[0](t_probe) *
                          chain.in_chain[0](t_probe).adjoint() *
                          sig.sigma1(t_probe);
    worst = std::max(worst, max_abs(got.coefficients[0] - supplied));
    if (got.order != 1) worst = std::max(worst, 1.0);
  }

  // order-two chain: both supplied coefficients, alternating head sign
  {
    const Signature sig = fixtures::vg(0.0).sig;
    const PoleChain chain = make_pole_chain(sig, cd(0.0, 0.0), 2,
                                            {CVec::Ones(1), CVec::Zero(1)},
                                            {CVec::Ones(1), CVec::Zero(1)},
                                            0.0);
    const DiffVessel v = realize_single_pole(
        chain, MatFn::identity(fixtures::default_grid(), 1), sig);
    const auto sampler = [&](cd lam, double t) { return transfer(v, lam, t); };
    const LaurentData got = extract_pole_data(sampler, cd(0, 0), 2, 0.5, 0.4);
    const double t = 0.5;
    const CMat s_m1 = chain.out_chain[0](t) * chain.in_chain[1](t).adjoint() +
                      chain.out_chain[1](t) * chain.in_chain[0](t).adjoint();
    const CMat s_m2 =
        -chain.out_chain[0](t) * chain.in_chain[0](t).adjoint();
    worst = std::max(worst, max_abs(got.coefficients[0] - s_m1));
    worst = std::max(worst, max_abs(got.coefficients[1] - s_m2));
  }

  // (b) propagation methods agree
  for (int rep = 0; rep < 2; ++rep) {
    CMat A1(2, 2);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) A1(r, c) = 0.4 * vlabtest::random_unit(rng);
    }
    CMat C0(1, 2), B0(2, 1);
    for (int i = 0; i < 2; ++i) {
      C0(0, i) = vlabtest::random_unit(rng);
      B0(i, 0) = vlabtest::random_unit(rng);
    }
    const Signature sig = fixtures::va(1.0).sig;
    const auto [Co, Bo] =
        propagate_CB(C0, B0, A1, sig, PropagationMethod::ode, 0.0);
    const auto [Cc, Bc] =
        propagate_CB(C0, B0, A1, sig, PropagationMethod::contour, 0.0);
    worst = std::max(worst, (Co - Cc).max_norm());
    worst = std::max(worst, (Bo - Bc).max_norm());
  }

  record(9, "realization round trips and propagation agreement < 1e-6", worst,
         1e-6, note);
}

void criterion_10(Rng& rng) {
  double worst = 0.0;
  std::vector<DiffVessel> pop = {fixtures::vc2()};
  for (int i = 0; i < 3; ++i) {
    pop.push_back(vlabtest::random_factorizable_vessel(rng));
  }
  for (const DiffVessel& v : pop) {
    CMat e1 = CMat::Zero(2, 1), e2 = CMat::Zero(2, 1);
    e1(0, 0) = 1.0;
    e2(1, 0) = 1.0;
    const SubspaceFamily Gx(MatFn::constant(v.grid(), e1),
                            SubspaceKind::co_invariant);
    const SubspaceFamily G(MatFn::constant(v.grid(), e2),
                           SubspaceKind::invariant);
    const DiffVessel recon = cascade(compress(v, Gx), project(v, G));
    for (const cd lam : vlabtest::lambda_samples(v, 20, rng)) {
      for (double t : {0.2, 0.5, 0.8}) {
        worst = std::max(
            worst, max_abs(transfer(recon, lam, t) - transfer(v, lam, t)));
      }
    }
  }
  record(10, "compress/project factorization reproduces the transfer < 1e-7",
         worst, 1e-7);
}

void criterion_11() {
  const TimeGrid bundle(0.0, 0.5, 33);
  double worst_pde = 0.0;
  struct Probe {
    DiffVessel v;
    cd lambda;
  };
  const std::vector<Probe> probes = {{fixtures::v0(), cd(1.0, 0.0)},
                                     {fixtures::va(1.0), cd(2.0, 0.0)},
                                     {fixtures::vg(1.0), cd(-2.0, 0.0)},
                                     {fixtures::vc2(), cd(1.5, 0.5)}};
  for (const Probe& p : probes) {
    const TrajectoryBundle b = separated_trajectory(
        p.v, p.lambda, CVec::Ones(p.v.sig.dim_in()), bundle, bundle);
    worst_pde = std::max(worst_pde, pde_residuals(p.v, b).max());
  }
  double worst_path = 0.0;
  for (const DiffVessel& v : fixture_population()) {
    CVec x0 = CVec::Ones(v.state_dim());
    worst_path =
        std::max(worst_path, two_path_consistency(v, x0, 0.6, 0.9));
  }
  record(11, "simulator residuals (pde < 1e-6, two-path < 1e-8)",
         std::max(worst_pde, worst_path * 1e2), 1e-6,
         "pde " + format_float(worst_pde) + ", two-path " +
             format_float(worst_path) + " vs 1e-8");
}

#ifndef VESSEL_LAB_BIN
#define VESSEL_LAB_BIN ""
#endif

void criterion_12() {
  namespace fs = std::filesystem;
  const std::string bin = VESSEL_LAB_BIN;
  if (bin.empty() || !fs::exists(bin)) {
    record_flag(12, "CLI determinism", false, "vessel-lab binary not found");
    return;
  }
  const fs::path dir =
      fs::temp_directory_path() / ("vessel_lab_acc_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string vpath = (dir / "v.json").string();
  save_vessel(fixtures::vg(1.0), vpath);
  auto run = [&](const std::string& out) {
    const std::string cmd = bin + " transfer " + vpath +
                            " --lambda-grid -3:5:9 --im 0.7 --t2-samples 4 "
                            "--out " + out + " > " + out + ".log 2>&1";
    return std::system(cmd.c_str());
  };
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  bool ok = run(a) == 0 && run(b) == 0;
  if (ok) {
    std::ifstream fa(a), fb(b);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    ok = !sa.str().empty() && sa.str() == sb.str();
  }
  fs::remove_all(dir);
  record_flag(12, "repeated CLI runs are byte-identical", ok);
}

}  // namespace

int main() {
  Rng rng(2024);

  std::vector<DiffVessel> population = fixture_population();
  for (int i = 0; i < 50; ++i) {
    const int dim = i % 3 == 2 ? 2 : 1;
    population.push_back(vlabtest::random_vessel(rng, 1 + i % 3, dim));
  }

  criterion_1_and_2(population, rng);
  criterion_3(rng);
  criterion_4(rng);
  criterion_5(population, rng);
  criterion_6(rng);
  criterion_7(rng);
  criterion_8(population);
  criterion_9(rng);
  criterion_10(rng);
  criterion_11();
  criterion_12();

  std::sort(results.begin(), results.end(),
            [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  int failures = 0;
  for (const Outcome& r : results) {
    if (!r.pass) ++failures;
    std::printf("[%s] criterion %2d: %s (worst %.3e vs tol %.0e)%s%s\n",
                r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.worst, r.tol,
                r.note.empty() ? "" : " -- ", r.note.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures;
}
