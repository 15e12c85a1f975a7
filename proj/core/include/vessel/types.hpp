#pragma once

#include <complex>
#include <Eigen/Dense>

namespace vessel {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kDefaultCondLimit = 1e8;
inline constexpr double kDefaultVesselTol = 1e-6;

/// Largest absolute entry; the norm used for residual reports.
inline double max_abs(const CMat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const CMat& m) {
  return m.allFinite();
}

}  // namespace vessel
