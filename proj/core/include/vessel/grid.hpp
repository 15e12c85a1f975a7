#pragma once

#include <functional>
#include <vector>

#include "vessel/errors.hpp"
#include "vessel/types.hpp"

namespace vessel {

/// Uniform sampling grid on a closed interval of the t2 axis.
struct TimeGrid {
  TimeGrid(double t_start, double t_end, int points);

  double t_start;
  double t_end;
  int points;

  double spacing() const { return (t_end - t_start) / (points - 1); }
  double node(int i) const { return t_start + i * spacing(); }
  bool contains(double t) const;

  bool operator==(const TimeGrid& o) const {
    return t_start == o.t_start && t_end == o.t_end && points == o.points;
  }
};

/// Matrix-valued function of t2: uniform-grid samples joined by a cubic
/// spline (clamped with finite-difference end slopes, so polynomials up to
/// degree three are reproduced exactly and node derivatives superconverge).
/// Immutable after construction; safe to read from multiple threads.
class MatFn {
 public:
  MatFn(const TimeGrid& grid, std::vector<CMat> samples);

  static MatFn sample(const TimeGrid& grid,
                      const std::function<CMat(double)>& f);
  static MatFn constant(const TimeGrid& grid, const CMat& value);
  static MatFn zero(const TimeGrid& grid, int rows, int cols);
  static MatFn identity(const TimeGrid& grid, int n);
  /// Scalar-valued convenience (1x1 samples).
  static MatFn scalar(const TimeGrid& grid,
                      const std::function<cd(double)>& f);

  const TimeGrid& grid() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int points() const { return grid_.points; }

  const CMat& sample_at(int i) const { return samples_[i]; }
  const std::vector<CMat>& samples() const { return samples_; }

  /// Spline evaluation; exact (bitwise) at grid nodes.
  CMat operator()(double t2) const;

  /// Derivative of the interpolant, sampled back onto the same grid.
  MatFn derivative() const;

  /// Pointwise inverse; throws InvertibilityError naming the first bad node.
  MatFn inverse(double cond_limit = kDefaultCondLimit) const;

  /// Pointwise conjugate transpose.
  MatFn adjoint() const;

  MatFn transform(const std::function<CMat(const CMat&)>& f) const;

  friend MatFn operator+(const MatFn& a, const MatFn& b);
  friend MatFn operator-(const MatFn& a, const MatFn& b);
  friend MatFn operator*(const MatFn& a, const MatFn& b);
  friend MatFn operator*(const cd& s, const MatFn& a);
  friend MatFn operator*(const MatFn& a, const CMat& m);
  friend MatFn operator*(const CMat& m, const MatFn& a);
  MatFn operator-() const;

  double max_norm() const;

 private:
  void build_spline();

  TimeGrid grid_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<CMat> samples_;
  std::vector<CMat> moments_;  // spline second derivatives at the nodes
};

/// Condition number (2-norm); infinity when singular.
double condition_number(const CMat& m);

/// Smallest singular value.
double smallest_singular_value(const CMat& m);

}  // namespace vessel
