#pragma once

#include "vessel/grid.hpp"

namespace vessel {

/// The six external-data functions of a vessel. sigma1 and sigma1s are square
/// so that their inverses are well defined; all six share one grid.
struct Signature {
  Signature(MatFn sigma1_, MatFn sigma2_, MatFn gamma_, MatFn sigma1s_,
            MatFn sigma2s_, MatFn gammas_);

  MatFn sigma1;   // e x e
  MatFn sigma2;   // e x e
  MatFn gamma;    // e x e
  MatFn sigma1s;  // e* x e*
  MatFn sigma2s;  // e* x e*
  MatFn gammas;   // e* x e*

  int dim_in() const { return sigma1.rows(); }    // e  (= e tilde)
  int dim_out() const { return sigma1s.rows(); }  // e* (= e* tilde)
  const TimeGrid& grid() const { return sigma1.grid(); }

  /// Node-wise max difference over all six data functions.
  static double distance(const Signature& a, const Signature& b);

  /// Swap the starred and unstarred families (used by system inversion).
  Signature swapped() const;
};

}  // namespace vessel
