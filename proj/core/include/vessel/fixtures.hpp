#pragma once

#include "vessel/vessel.hpp"

namespace vessel::fixtures {

/// Canonical scalar vessels on [0,1] with 129 nodes. Closed-form transfers:
///   v0:      S = 1 + 1/lambda
///   va(a):   S = 1 + 1/(lambda - a)
///   vg(g):   S = e^{g t2} (1 + 1/lambda)
///   vc2:     cascade(v0, v0), S = (1 + 1/lambda)^2
TimeGrid default_grid();

DiffVessel v0();
DiffVessel va(double a);
DiffVessel vg(double g);
DiffVessel vc2();

}  // namespace vessel::fixtures
