// vessel-lab: command-line front end for the vessel library.
//
// Exit codes: 0 success, 1 numeric failure (residual above tolerance,
// singular data, solver breakdown), 2 usage or file errors.

#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>
#include <vector>

#include "vessel/io.hpp"
#include "vessel/ops.hpp"
#include "vessel/simulate.hpp"
#include "vessel/structure.hpp"

namespace {

using namespace vessel;

int thread_budget() {
  if (const char* env = std::getenv("VESSEL_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Ordered parallel map: results land by input index, independent of the
// execution order.
template <typename T, typename F>
std::vector<T> parallel_map(int count, const F& f) {
  std::vector<T> out(count);
  const int workers = std::min(thread_budget(), std::max(1, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          out[i] = f(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string fmt_complex_cols(const CMat& m) {
  std::string out;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      out += ",";
      out += format_float(m(r, c).real());
      out += ",";
      out += format_float(m(r, c).imag());
    }
  }
  return out;
}

int cmd_verify(const std::string& path, double tol) {
  const DiffVessel v = load_vessel(path, &std::cerr, tol);
  const ResidualReport rep = verify_vessel(v, tol);
  std::cout << rep.to_string();
  return rep.pass ? 0 : 1;
}

int cmd_transfer(const std::string& path, const std::string& lambda_grid,
                 double im, int t2_samples, const std::string& out_path) {
  const DiffVessel v = load_vessel(path, &std::cerr);

  double re0 = 0, re1 = 0;
  int count = 0;
  {
    char c1 = 0, c2 = 0;
    std::istringstream is(lambda_grid);
    if (!(is >> re0 >> c1 >> re1 >> c2 >> count) || c1 != ':' || c2 != ':' ||
        count < 1) {
      throw CLI::ValidationError("--lambda-grid expects RE0:RE1:N");
    }
  }
  if (t2_samples < 1) {
    throw CLI::ValidationError("--t2-samples must be positive");
  }

  std::vector<cd> lambdas(count);
  for (int i = 0; i < count; ++i) {
    const double re =
        count == 1 ? re0 : re0 + (re1 - re0) * i / static_cast<double>(count - 1);
    lambdas[i] = cd(re, im);
  }
  std::vector<double> times(t2_samples);
  const TimeGrid& g = v.grid();
  for (int i = 0; i < t2_samples; ++i) {
    times[i] = t2_samples == 1
                   ? g.t_start
                   : g.t_start + (g.t_end - g.t_start) * i /
                                     static_cast<double>(t2_samples - 1);
  }

  struct Row {
    double t2;
    cd lambda;
    CMat S;
  };
  const int total = count * t2_samples;
  const auto rows = parallel_map<Row>(total, [&](int idx) {
    const int it = idx / count;
    const int il = idx % count;
    return Row{times[it], lambdas[il], transfer(v, lambdas[il], times[it])};
  });

  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  out << "t2,re_lambda,im_lambda";
  for (int r = 0; r < v.sig.dim_out(); ++r) {
    for (int c = 0; c < v.sig.dim_in(); ++c) {
      out << ",re_S_" << r << "_" << c << ",im_S_" << r << "_" << c;
    }
  }
  out << "\n";
  for (const Row& row : rows) {
    out << format_float(row.t2) << "," << format_float(row.lambda.real()) << ","
        << format_float(row.lambda.imag()) << fmt_complex_cols(row.S) << "\n";
  }
  return 0;
}

int cmd_kalman(const std::string& path, double t2,
               const std::optional<std::string>& out_path) {
  const DiffVessel v = load_vessel(path, &std::cerr);
  const KalmanDecomp kd = kalman_decompose(v, t2);
  std::cout << "dims: c_unobs=" << kd.dims[0] << " co=" << kd.dims[1]
            << " nc_obs=" << kd.dims[2] << " nc_unobs=" << kd.dims[3] << "\n";
  std::cout << "triangular_residual: " << format_float(kd.triangular_residual)
            << "\n";
  if (out_path) save_vessel(kd.minimal, *out_path);
  return 0;
}

int cmd_realize(const std::string& poles_path, const std::string& sig_path,
                const std::string& d_path, const std::string& out_path) {
  const Signature sig = load_signature(sig_path);
  const MatFn D = load_matfn(d_path);
  const std::vector<PoleChain> poles = load_pole_data(poles_path);
  if (poles.empty()) throw IoError("pole-data file contains no poles");
  std::vector<PoleTriple> triples;
  triples.reserve(poles.size());
  for (const PoleChain& p : poles) {
    const double res = chain_residual(p, sig);
    if (res > 1e-7) {
      std::ostringstream os;
      os << "pole chain at z=(" << p.z.real() << "," << p.z.imag()
         << ") fails its ODE relations (residual " << res << ")";
      throw PreconditionError(os.str());
    }
    triples.push_back(chain_to_triple(p));
  }
  const DiffVessel v = realize_mittag_leffler(triples, D, sig);
  save_vessel(v, out_path);
  const ResidualReport rep = verify_vessel(v);
  std::cout << rep.to_string();
  return rep.pass ? 0 : 1;
}

int cmd_simulate(const std::string& path, const std::string& lambda_str,
                 const std::string& u0_path, const std::string& out_path,
                 int t1_points, double t1_end, int t2_points) {
  const DiffVessel v = load_vessel(path, &std::cerr);
  double re = 0, im = 0;
  {
    char comma = 0;
    std::istringstream is(lambda_str);
    if (!(is >> re >> comma >> im) || comma != ',') {
      throw CLI::ValidationError("--lambda expects RE,IM");
    }
  }
  const CVec u0 = load_vector(u0_path);
  const TimeGrid t1(0.0, t1_end, t1_points);
  const TimeGrid t2(v.grid().t_start, v.grid().t_end, t2_points);
  const TrajectoryBundle b = separated_trajectory(v, cd(re, im), u0, t1, t2);

  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  out << "t1,t2";
  auto head = [&](const char* base, int dim) {
    for (int i = 0; i < dim; ++i) out << ",re_" << base << i << ",im_" << base << i;
  };
  head("u", b.dim_in);
  head("x", b.dim_state);
  head("y", b.dim_out);
  out << "\n";
  for (int i1 = 0; i1 < t1.points; ++i1) {
    for (int i2 = 0; i2 < t2.points; ++i2) {
      const int idx = b.index(i1, i2);
      out << format_float(t1.node(i1)) << "," << format_float(t2.node(i2))
          << fmt_complex_cols(b.u[idx]) << fmt_complex_cols(b.x[idx])
          << fmt_complex_cols(b.y[idx]) << "\n";
    }
  }

  const PdeResiduals res = pde_residuals(v, b);
  std::cout << "state_t1:      " << format_float(res.state_t1) << "\n"
            << "state_t2:      " << format_float(res.state_t2) << "\n"
            << "input_compat:  " << format_float(res.input_compat) << "\n"
            << "output_compat: " << format_float(res.output_compat) << "\n"
            << "output_eq:     " << format_float(res.output_eq) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vessel-lab: overdetermined 2D t1-invariant systems toolkit"};
  app.require_subcommand(1);

  std::string in1, in2, out_path, t_path;
  double tol = kDefaultVesselTol;
  std::string lambda_grid, lambda_str, u0_path;
  double im = 0.0, t2_at = 0.0;
  int t2_samples = 1;
  std::optional<std::string> kalman_out;
  std::string poles_path, sig_path, d_path;
  int eq_samples = 5;
  int t1_points = 33, t2_points = 33;
  double t1_end = 0.5;

  auto* verify = app.add_subcommand("verify", "Check the vessel axioms");
  verify->add_option("vessel", in1)->required();
  verify->add_option("--tol", tol);

  auto* transfer_cmd =
      app.add_subcommand("transfer", "Sample the transfer function to CSV");
  transfer_cmd->add_option("vessel", in1)->required();
  transfer_cmd->add_option("--lambda-grid", lambda_grid, "RE0:RE1:N")
      ->required();
  transfer_cmd->add_option("--im", im);
  transfer_cmd->add_option("--t2-samples", t2_samples);
  transfer_cmd->add_option("--out", out_path)->required();

  auto* cascade_cmd =
      app.add_subcommand("cascade", "Series connection of two vessels");
  cascade_cmd->add_option("v1", in1)->required();
  cascade_cmd->add_option("v2", in2)->required();
  cascade_cmd->add_option("--out", out_path)->required();

  auto* invert_cmd = app.add_subcommand("invert", "Inverse-system vessel");
  invert_cmd->add_option("vessel", in1)->required();
  invert_cmd->add_option("--out", out_path)->required();

  auto* adjoint_cmd = app.add_subcommand("adjoint", "Adjoint vessel");
  adjoint_cmd->add_option("vessel", in1)->required();
  adjoint_cmd->add_option("--out", out_path)->required();

  auto* gauge_cmd =
      app.add_subcommand("gauge", "Gauge transform by an invertible family");
  gauge_cmd->add_option("vessel", in1)->required();
  gauge_cmd->add_option("--T", t_path)->required();
  gauge_cmd->add_option("--out", out_path)->required();

  auto* kalman_cmd =
      app.add_subcommand("kalman", "Kalman decomposition and minimal part");
  kalman_cmd->add_option("vessel", in1)->required();
  kalman_cmd->add_option("--t2", t2_at)->required();
  kalman_cmd->add_option("--out", kalman_out);

  auto* equiv_cmd =
      app.add_subcommand("equiv", "Transfer-function equality test");
  equiv_cmd->add_option("v1", in1)->required();
  equiv_cmd->add_option("v2", in2)->required();
  equiv_cmd->add_option("--t2-samples", eq_samples);
  equiv_cmd->add_option("--tol", tol);

  auto* realize_cmd =
      app.add_subcommand("realize", "Build a vessel from pole data");
  realize_cmd->add_option("--poles", poles_path)->required();
  realize_cmd->add_option("--sig", sig_path)->required();
  realize_cmd->add_option("--D", d_path)->required();
  realize_cmd->add_option("--out", out_path)->required();

  auto* simulate_cmd =
      app.add_subcommand("simulate", "Separated trajectory and residuals");
  simulate_cmd->add_option("vessel", in1)->required();
  simulate_cmd->add_option("--lambda", lambda_str, "RE,IM")->required();
  simulate_cmd->add_option("--u0", u0_path)->required();
  simulate_cmd->add_option("--out", out_path)->required();
  simulate_cmd->add_option("--t1-points", t1_points);
  simulate_cmd->add_option("--t1-end", t1_end);
  simulate_cmd->add_option("--t2-points", t2_points);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (*verify) return cmd_verify(in1, tol);
    if (*transfer_cmd) {
      return cmd_transfer(in1, lambda_grid, im, t2_samples, out_path);
    }
    if (*cascade_cmd) {
      const DiffVessel v1 = load_vessel(in1, &std::cerr), v2 = load_vessel(in2, &std::cerr);
      save_vessel(cascade(v1, v2), out_path);
      return 0;
    }
    if (*invert_cmd) {
      save_vessel(invert(load_vessel(in1, &std::cerr)), out_path);
      return 0;
    }
    if (*adjoint_cmd) {
      save_vessel(adjoint(load_vessel(in1, &std::cerr)), out_path);
      return 0;
    }
    if (*gauge_cmd) {
      save_vessel(gauge_transform(load_vessel(in1, &std::cerr), load_matfn(t_path)),
                  out_path);
      return 0;
    }
    if (*kalman_cmd) return cmd_kalman(in1, t2_at, kalman_out);
    if (*equiv_cmd) {
      const DiffVessel v1 = load_vessel(in1, &std::cerr), v2 = load_vessel(in2, &std::cerr);
      return equivalent(v1, v2, eq_samples, tol) ? 0 : 1;
    }
    if (*realize_cmd) {
      return cmd_realize(poles_path, sig_path, d_path, out_path);
    }
    if (*simulate_cmd) {
      return cmd_simulate(in1, lambda_str, u0_path, out_path, t1_points, t1_end,
                          t2_points);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
