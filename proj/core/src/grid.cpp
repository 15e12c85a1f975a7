#include "vessel/grid.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace vessel {

TimeGrid::TimeGrid(double t_start_, double t_end_, int points_)
    : t_start(t_start_), t_end(t_end_), points(points_) {
  if (!(t_start < t_end)) {
    throw DomainError("TimeGrid: t_start must be strictly below t_end");
  }
  if (points < 4) {
    throw DomainError("TimeGrid: at least 4 points are required");
  }
}

bool TimeGrid::contains(double t) const {
  const double eps = 1e-12 * (std::abs(t_start) + std::abs(t_end) + 1.0);
  return t >= t_start - eps && t <= t_end + eps;
}

MatFn::MatFn(const TimeGrid& grid, std::vector<CMat> samples) : grid_(grid) {
  if (static_cast<int>(samples.size()) != grid.points) {
    throw ShapeError("MatFn: sample count does not match grid points");
  }
  rows_ = static_cast<int>(samples.front().rows());
  cols_ = static_cast<int>(samples.front().cols());
  for (int i = 0; i < grid.points; ++i) {
    if (samples[i].rows() != rows_ || samples[i].cols() != cols_) {
      std::ostringstream os;
      os << "MatFn: sample " << i << " has inconsistent shape";
      throw ShapeError(os.str());
    }
    if (!all_finite(samples[i])) {
      std::ostringstream os;
      os << "MatFn: sample " << i << " contains non-finite entries";
      throw DomainError(os.str());
    }
  }
  samples_ = std::move(samples);
  build_spline();
}

MatFn MatFn::sample(const TimeGrid& grid, const std::function<CMat(double)>& f) {
  std::vector<CMat> s;
  s.reserve(grid.points);
  for (int i = 0; i < grid.points; ++i) s.push_back(f(grid.node(i)));
  return MatFn(grid, std::move(s));
}

MatFn MatFn::constant(const TimeGrid& grid, const CMat& value) {
  return MatFn(grid, std::vector<CMat>(grid.points, value));
}

MatFn MatFn::zero(const TimeGrid& grid, int rows, int cols) {
  return constant(grid, CMat::Zero(rows, cols));
}

MatFn MatFn::identity(const TimeGrid& grid, int n) {
  return constant(grid, CMat::Identity(n, n));
}

MatFn MatFn::scalar(const TimeGrid& grid, const std::function<cd(double)>& f) {
  return sample(grid, [&](double t) {
    CMat m(1, 1);
    m(0, 0) = f(t);
    return m;
  });
}

namespace {

// One-sided derivative estimate at the first node; `sign` mirrors it for the
// last node. 6th order when 7 samples exist, 3rd order (exact on cubics)
// otherwise.
CMat end_slope(const std::vector<CMat>& y, double h, bool left) {
  const int n = static_cast<int>(y.size());
  auto at = [&](int k) -> const CMat& { return left ? y[k] : y[n - 1 - k]; };
  const double s = left ? 1.0 : -1.0;
  if (n >= 7) {
    CMat d = (-49.0 / 20.0) * at(0) + 6.0 * at(1) + (-15.0 / 2.0) * at(2) +
             (20.0 / 3.0) * at(3) + (-15.0 / 4.0) * at(4) + (6.0 / 5.0) * at(5) +
             (-1.0 / 6.0) * at(6);
    return (s / h) * d;
  }
  CMat d = (-11.0 / 6.0) * at(0) + 3.0 * at(1) + (-3.0 / 2.0) * at(2) +
           (1.0 / 3.0) * at(3);
  return (s / h) * d;
}

}  // namespace

// Clamped cubic spline moments via the Thomas algorithm, one tridiagonal
// solve shared entrywise.
void MatFn::build_spline() {
  const int n = grid_.points;
  const double h = grid_.spacing();

  const CMat s0 = end_slope(samples_, h, true);
  const CMat sn = end_slope(samples_, h, false);

  std::vector<double> diag(n), upper(n - 1), lower(n - 1);
  std::vector<CMat> rhs(n);
  diag[0] = 2.0;
  upper[0] = 1.0;
  rhs[0] = (6.0 / h) * ((samples_[1] - samples_[0]) / h - s0);
  for (int i = 1; i + 1 < n; ++i) {
    lower[i - 1] = 1.0;
    diag[i] = 4.0;
    upper[i] = 1.0;
    rhs[i] = (6.0 / (h * h)) *
             (samples_[i - 1] - 2.0 * samples_[i] + samples_[i + 1]);
  }
  lower[n - 2] = 1.0;
  diag[n - 1] = 2.0;
  rhs[n - 1] = (6.0 / h) * (sn - (samples_[n - 1] - samples_[n - 2]) / h);

  // Forward elimination.
  for (int i = 1; i < n; ++i) {
    const double w = lower[i - 1] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  moments_.assign(n, CMat());
  moments_[n - 1] = rhs[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i) {
    moments_[i] = (rhs[i] - upper[i] * moments_[i + 1]) / diag[i];
  }
}

CMat MatFn::operator()(double t2) const {
  if (!grid_.contains(t2)) {
    std::ostringstream os;
    os << "MatFn: evaluation time " << t2 << " outside [" << grid_.t_start
       << ", " << grid_.t_end << "]";
    throw DomainError(os.str());
  }
  const double h = grid_.spacing();
  const int n = grid_.points;

  // Node hits return the stored sample bit-exactly.
  int nearest = static_cast<int>(std::lround((t2 - grid_.t_start) / h));
  if (nearest >= 0 && nearest < n && grid_.node(nearest) == t2) {
    return samples_[nearest];
  }

  int i = static_cast<int>(std::floor((t2 - grid_.t_start) / h));
  i = std::max(0, std::min(i, n - 2));
  const double a = grid_.node(i);
  const double b = grid_.node(i + 1);
  const double wa = b - t2;
  const double wb = t2 - a;
  return moments_[i] * (wa * wa * wa / (6.0 * h)) +
         moments_[i + 1] * (wb * wb * wb / (6.0 * h)) +
         (samples_[i] / h - moments_[i] * (h / 6.0)) * wa +
         (samples_[i + 1] / h - moments_[i + 1] * (h / 6.0)) * wb;
}

MatFn MatFn::derivative() const {
  const int n = grid_.points;
  const double h = grid_.spacing();
  std::vector<CMat> d(n);
  for (int i = 0; i + 1 < n; ++i) {
    d[i] = (samples_[i + 1] - samples_[i]) / h -
           (h / 6.0) * (2.0 * moments_[i] + moments_[i + 1]);
  }
  d[n - 1] = (samples_[n - 1] - samples_[n - 2]) / h +
             (h / 6.0) * (moments_[n - 2] + 2.0 * moments_[n - 1]);
  return MatFn(grid_, std::move(d));
}

MatFn MatFn::inverse(double cond_limit) const {
  if (rows_ != cols_) {
    throw ShapeError("MatFn::inverse: function is not square-valued");
  }
  std::vector<CMat> inv(grid_.points);
  for (int i = 0; i < grid_.points; ++i) {
    const double c = condition_number(samples_[i]);
    if (!(c <= cond_limit)) {
      std::ostringstream os;
      os << "MatFn::inverse: sample at node " << i << " (t2=" << grid_.node(i)
         << ") is singular or ill-conditioned (cond=" << c << ")";
      throw InvertibilityError(os.str(), i);
    }
    inv[i] = samples_[i].partialPivLu().solve(CMat::Identity(rows_, rows_));
  }
  return MatFn(grid_, std::move(inv));
}

MatFn MatFn::adjoint() const {
  std::vector<CMat> a(grid_.points);
  for (int i = 0; i < grid_.points; ++i) a[i] = samples_[i].adjoint();
  return MatFn(grid_, std::move(a));
}

MatFn MatFn::transform(const std::function<CMat(const CMat&)>& f) const {
  std::vector<CMat> out(grid_.points);
  for (int i = 0; i < grid_.points; ++i) out[i] = f(samples_[i]);
  return MatFn(grid_, std::move(out));
}

namespace {
void require_same_grid(const MatFn& a, const MatFn& b, const char* op) {
  if (!(a.grid() == b.grid())) {
    throw ShapeError(std::string("MatFn ") + op + ": grids differ");
  }
}
}  // namespace

MatFn operator+(const MatFn& a, const MatFn& b) {
  require_same_grid(a, b, "+");
  std::vector<CMat> s(a.points());
  for (int i = 0; i < a.points(); ++i) s[i] = a.sample_at(i) + b.sample_at(i);
  return MatFn(a.grid(), std::move(s));
}

MatFn operator-(const MatFn& a, const MatFn& b) {
  require_same_grid(a, b, "-");
  std::vector<CMat> s(a.points());
  for (int i = 0; i < a.points(); ++i) s[i] = a.sample_at(i) - b.sample_at(i);
  return MatFn(a.grid(), std::move(s));
}

MatFn operator*(const MatFn& a, const MatFn& b) {
  require_same_grid(a, b, "*");
  std::vector<CMat> s(a.points());
  for (int i = 0; i < a.points(); ++i) s[i] = a.sample_at(i) * b.sample_at(i);
  return MatFn(a.grid(), std::move(s));
}

MatFn operator*(const cd& s, const MatFn& a) {
  std::vector<CMat> out(a.points());
  for (int i = 0; i < a.points(); ++i) out[i] = s * a.sample_at(i);
  return MatFn(a.grid(), std::move(out));
}

MatFn operator*(const MatFn& a, const CMat& m) {
  std::vector<CMat> out(a.points());
  for (int i = 0; i < a.points(); ++i) out[i] = a.sample_at(i) * m;
  return MatFn(a.grid(), std::move(out));
}

MatFn operator*(const CMat& m, const MatFn& a) {
  std::vector<CMat> out(a.points());
  for (int i = 0; i < a.points(); ++i) out[i] = m * a.sample_at(i);
  return MatFn(a.grid(), std::move(out));
}

MatFn MatFn::operator-() const { return cd(-1.0, 0.0) * (*this); }

double MatFn::max_norm() const {
  double m = 0.0;
  for (const CMat& s : samples_) m = std::max(m, max_abs(s));
  return m;
}

double condition_number(const CMat& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

double smallest_singular_value(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(m.rows() < m.cols() ? m.rows() - 1
                                                  : m.cols() - 1);
}

}  // namespace vessel
