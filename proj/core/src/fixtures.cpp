#include "vessel/fixtures.hpp"

#include <cmath>

#include "vessel/ops.hpp"

namespace vessel::fixtures {

TimeGrid default_grid() { return TimeGrid(0.0, 1.0, 129); }

namespace {

MatFn konst(const TimeGrid& g, cd value) {
  CMat m(1, 1);
  m(0, 0) = value;
  return MatFn::constant(g, m);
}

}  // namespace

DiffVessel v0() {
  const TimeGrid g = default_grid();
  Signature sig(konst(g, 1.0), konst(g, 0.0), konst(g, 0.0), konst(g, 1.0),
                konst(g, 0.0), konst(g, 0.0));
  return DiffVessel(konst(g, 0.0), konst(g, 0.0), konst(g, 1.0), konst(g, 1.0),
                    konst(g, 1.0), konst(g, 1.0), std::move(sig));
}

DiffVessel va(double a) {
  const TimeGrid g = default_grid();
  Signature sig(konst(g, 1.0), konst(g, 1.0), konst(g, 0.0), konst(g, 1.0),
                konst(g, 1.0), konst(g, 0.0));
  return DiffVessel(konst(g, a), konst(g, 0.0),
                    MatFn::scalar(g, [a](double t) { return std::exp(-a * t); }),
                    MatFn::scalar(g, [a](double t) { return std::exp(a * t); }),
                    konst(g, 1.0), konst(g, 1.0), std::move(sig));
}

DiffVessel vg(double gval) {
  const TimeGrid g = default_grid();
  Signature sig(konst(g, 1.0), konst(g, 1.0), konst(g, 0.0), konst(g, 1.0),
                konst(g, 1.0), konst(g, gval));
  auto eg = [gval](double t) { return cd(std::exp(gval * t)); };
  return DiffVessel(konst(g, 0.0), konst(g, 0.0), konst(g, 1.0),
                    MatFn::scalar(g, eg), MatFn::scalar(g, eg),
                    MatFn::scalar(g, eg), std::move(sig));
}

DiffVessel vc2() { return cascade(v0(), v0()); }

}  // namespace vessel::fixtures
