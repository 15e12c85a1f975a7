#include "vessel/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace vessel {

using nlohmann::json;

namespace {

constexpr const char* kVesselFormat = "vessel-lab/vessel-1";
constexpr const char* kSignatureFormat = "vessel-lab/signature-1";
constexpr const char* kMatFnFormat = "vessel-lab/matfn-1";
constexpr const char* kPoleFormat = "vessel-lab/poledata-1";
constexpr const char* kVectorFormat = "vessel-lab/vector-1";

json encode_cmat(const CMat& m) {
  json entries = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      entries.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
  }
  return entries;
}

CMat decode_cmat(const json& j, int rows, int cols, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols) {
    throw IoError("block '" + where + "': wrong entry count");
  }
  CMat m(rows, cols);
  int k = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c, ++k) {
      const json& e = j[k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
          !e[1].is_number()) {
        throw IoError("block '" + where + "': entries must be [re, im] pairs");
      }
      m(r, c) = cd(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

json encode_matfn_block(const MatFn& f) {
  json nodes = json::array();
  for (int i = 0; i < f.points(); ++i) nodes.push_back(encode_cmat(f.sample_at(i)));
  return nodes;
}

MatFn decode_matfn_block(const json& j, const TimeGrid& g, int rows, int cols,
                         const std::string& name) {
  if (!j.is_array() || static_cast<int>(j.size()) != g.points) {
    throw IoError("block '" + name + "': sample count does not match grid");
  }
  std::vector<CMat> samples;
  samples.reserve(g.points);
  for (int i = 0; i < g.points; ++i) {
    samples.push_back(decode_cmat(j[i], rows, cols, name));
  }
  return MatFn(g, std::move(samples));
}

json encode_grid(const TimeGrid& g) {
  return json{{"t_start", g.t_start}, {"t_end", g.t_end}, {"points", g.points}};
}

TimeGrid decode_grid(const json& j) {
  if (!j.contains("t_start") || !j.contains("t_end") || !j.contains("points")) {
    throw IoError("grid: t_start, t_end and points are required");
  }
  try {
    return TimeGrid(j["t_start"].get<double>(), j["t_end"].get<double>(),
                    j["points"].get<int>());
  } catch (const DomainError& e) {
    throw IoError(std::string("grid: ") + e.what());
  }
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "parse error in '" << path << "' at byte " << e.byte << ": "
       << e.what();
    throw IoError(os.str());
  }
}

void write_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(1) << "\n";
}

void expect_format(const json& j, const char* fmt, const std::string& path) {
  if (!j.contains("format_version") || j["format_version"] != fmt) {
    throw IoError("'" + path + "': unrecognized format_version (expected " +
                  fmt + ")");
  }
}

}  // namespace

void save_vessel(const DiffVessel& v, const std::string& path) {
  json j;
  j["format_version"] = kVesselFormat;
  j["dims"] = {{"state", v.state_dim()},
               {"input", v.sig.dim_in()},
               {"output", v.sig.dim_out()},
               {"aux_in", v.sig.dim_in()},
               {"aux_out", v.sig.dim_out()}};
  j["grid"] = encode_grid(v.grid());
  j["matrices"] = {{"A1", encode_matfn_block(v.A1)},
                   {"A2", encode_matfn_block(v.A2)},
                   {"B", encode_matfn_block(v.Bt)},
                   {"C", encode_matfn_block(v.C)},
                   {"D", encode_matfn_block(v.D)},
                   {"Dt", encode_matfn_block(v.Dt)},
                   {"sigma1", encode_matfn_block(v.sig.sigma1)},
                   {"sigma2", encode_matfn_block(v.sig.sigma2)},
                   {"gamma", encode_matfn_block(v.sig.gamma)},
                   {"sigma1s", encode_matfn_block(v.sig.sigma1s)},
                   {"sigma2s", encode_matfn_block(v.sig.sigma2s)},
                   {"gammas", encode_matfn_block(v.sig.gammas)}};
  write_file(j, path);
}

DiffVessel load_vessel(const std::string& path, std::ostream* warnings,
                       double warn_tol) {
  const json j = parse_file(path);
  expect_format(j, kVesselFormat, path);
  if (!j.contains("dims") || !j.contains("grid") || !j.contains("matrices")) {
    throw IoError("'" + path + "': dims, grid and matrices are required");
  }
  const TimeGrid g = decode_grid(j["grid"]);
  const json& d = j["dims"];
  const int n = d.at("state").get<int>();
  const int e = d.at("input").get<int>();
  const int es = d.at("output").get<int>();
  const json& m = j["matrices"];
  auto block = [&](const char* name, int rows, int cols) {
    if (!m.contains(name)) {
      throw IoError("'" + path + "': missing matrix block '" + name + "'");
    }
    try {
      return decode_matfn_block(m[name], g, rows, cols, name);
    } catch (const ShapeError& err) {
      throw IoError("'" + path + "': " + err.what());
    }
  };

  Signature sig(block("sigma1", e, e), block("sigma2", e, e),
                block("gamma", e, e), block("sigma1s", es, es),
                block("sigma2s", es, es), block("gammas", es, es));
  DiffVessel v(block("A1", n, n), block("A2", n, n), block("B", n, e),
               block("C", es, n), block("D", es, e), block("Dt", es, e),
               std::move(sig));

  if (warnings) {
    for (int i = 0; i < g.points; ++i) {
      if (condition_number(v.sig.sigma1.sample_at(i)) > kDefaultCondLimit) {
        *warnings << "warning: sigma1 singular or ill-conditioned at node " << i
                  << "\n";
      }
      if (condition_number(v.sig.sigma1s.sample_at(i)) > kDefaultCondLimit) {
        *warnings << "warning: sigma1s singular or ill-conditioned at node "
                  << i << "\n";
      }
    }
    const ResidualReport rep = verify_vessel(v, warn_tol);
    if (!rep.pass) {
      *warnings << "warning: vessel axioms fail at tolerance " << warn_tol
                << " (max residual " << rep.max_over_grid << ")\n";
    }
  }
  return v;
}

void save_signature(const Signature& sig, const std::string& path) {
  json j;
  j["format_version"] = kSignatureFormat;
  j["dims"] = {{"input", sig.dim_in()}, {"output", sig.dim_out()}};
  j["grid"] = encode_grid(sig.grid());
  j["matrices"] = {{"sigma1", encode_matfn_block(sig.sigma1)},
                   {"sigma2", encode_matfn_block(sig.sigma2)},
                   {"gamma", encode_matfn_block(sig.gamma)},
                   {"sigma1s", encode_matfn_block(sig.sigma1s)},
                   {"sigma2s", encode_matfn_block(sig.sigma2s)},
                   {"gammas", encode_matfn_block(sig.gammas)}};
  write_file(j, path);
}

Signature load_signature(const std::string& path) {
  const json j = parse_file(path);
  expect_format(j, kSignatureFormat, path);
  const TimeGrid g = decode_grid(j.at("grid"));
  const int e = j.at("dims").at("input").get<int>();
  const int es = j.at("dims").at("output").get<int>();
  const json& m = j.at("matrices");
  auto block = [&](const char* name, int rows, int cols) {
    if (!m.contains(name)) {
      throw IoError("'" + path + "': missing matrix block '" + name + "'");
    }
    return decode_matfn_block(m[name], g, rows, cols, name);
  };
  return Signature(block("sigma1", e, e), block("sigma2", e, e),
                   block("gamma", e, e), block("sigma1s", es, es),
                   block("sigma2s", es, es), block("gammas", es, es));
}

void save_matfn(const MatFn& f, const std::string& path) {
  json j;
  j["format_version"] = kMatFnFormat;
  j["dims"] = {{"rows", f.rows()}, {"cols", f.cols()}};
  j["grid"] = encode_grid(f.grid());
  j["samples"] = encode_matfn_block(f);
  write_file(j, path);
}

MatFn load_matfn(const std::string& path) {
  const json j = parse_file(path);
  expect_format(j, kMatFnFormat, path);
  const TimeGrid g = decode_grid(j.at("grid"));
  const int rows = j.at("dims").at("rows").get<int>();
  const int cols = j.at("dims").at("cols").get<int>();
  return decode_matfn_block(j.at("samples"), g, rows, cols, "samples");
}

void save_pole_data(const std::vector<PoleChain>& poles, const TimeGrid& grid,
                    const std::string& path) {
  json j;
  j["format_version"] = kPoleFormat;
  j["grid"] = encode_grid(grid);
  json list = json::array();
  for (const PoleChain& p : poles) {
    json entry;
    entry["z"] = json::array({p.z.real(), p.z.imag()});
    entry["order"] = p.order;
    json oc = json::array(), ic = json::array();
    for (const MatFn& f : p.out_chain) oc.push_back(encode_matfn_block(f));
    for (const MatFn& f : p.in_chain) ic.push_back(encode_matfn_block(f));
    entry["out_chain"] = oc;
    entry["in_chain"] = ic;
    entry["dims"] = {{"out", p.out_chain.front().rows()},
                     {"in", p.in_chain.front().rows()}};
    list.push_back(entry);
  }
  j["poles"] = list;
  write_file(j, path);
}

std::vector<PoleChain> load_pole_data(const std::string& path) {
  const json j = parse_file(path);
  expect_format(j, kPoleFormat, path);
  const TimeGrid g = decode_grid(j.at("grid"));
  if (!j.contains("poles") || !j["poles"].is_array()) {
    throw IoError("'" + path + "': poles list is required");
  }
  std::vector<PoleChain> out;
  for (const json& entry : j["poles"]) {
    PoleChain p;
    const json& z = entry.at("z");
    p.z = cd(z.at(0).get<double>(), z.at(1).get<double>());
    p.order = entry.at("order").get<int>();
    const int eo = entry.at("dims").at("out").get<int>();
    const int ei = entry.at("dims").at("in").get<int>();
    const json& oc = entry.at("out_chain");
    const json& ic = entry.at("in_chain");
    if (static_cast<int>(oc.size()) != p.order ||
        static_cast<int>(ic.size()) != p.order) {
      throw IoError("'" + path + "': chain lengths must equal the pole order");
    }
    for (const json& f : oc) {
      p.out_chain.push_back(decode_matfn_block(f, g, eo, 1, "out_chain"));
    }
    for (const json& f : ic) {
      p.in_chain.push_back(decode_matfn_block(f, g, ei, 1, "in_chain"));
    }
    out.push_back(std::move(p));
  }
  return out;
}

void save_vector(const CVec& v, const std::string& path) {
  json j;
  j["format_version"] = kVectorFormat;
  j["size"] = static_cast<int>(v.size());
  j["values"] = encode_cmat(v);
  write_file(j, path);
}

CVec load_vector(const std::string& path) {
  const json j = parse_file(path);
  expect_format(j, kVectorFormat, path);
  const int size = j.at("size").get<int>();
  const CMat m = decode_cmat(j.at("values"), size, 1, "values");
  return CVec(m.col(0));
}

std::string format_float(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace vessel
