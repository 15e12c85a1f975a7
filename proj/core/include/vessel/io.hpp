#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vessel/realize.hpp"

namespace vessel {

/// Human-readable JSON file formats. Complex entries are stored as [re, im]
/// pairs in row-major order, one list per grid node, so save/load round-trips
/// are bit-exact.

void save_vessel(const DiffVessel& v, const std::string& path);

/// Loads and shape-checks a vessel file. verify_vessel runs automatically;
/// residuals above warn_tol and singular sigma1/sigma1s nodes are reported to
/// `warnings` when given.
DiffVessel load_vessel(const std::string& path, std::ostream* warnings = nullptr,
                       double warn_tol = kDefaultVesselTol);

void save_signature(const Signature& sig, const std::string& path);
Signature load_signature(const std::string& path);

void save_matfn(const MatFn& f, const std::string& path);
MatFn load_matfn(const std::string& path);

void save_pole_data(const std::vector<PoleChain>& poles, const TimeGrid& grid,
                    const std::string& path);
std::vector<PoleChain> load_pole_data(const std::string& path);

/// One complex vector, shared by the simulate subcommand's --u0 input.
void save_vector(const CVec& v, const std::string& path);
CVec load_vector(const std::string& path);

/// Floating-point text formatting used by every CSV and report emitter:
/// 17 significant digits, '.' decimal separator.
std::string format_float(double x);

}  // namespace vessel
