#pragma once

#include <cstddef>

#include "autoten/tensor.hpp"

namespace autoten {

/// R x R x R Tucker core, same layout as DenseTensor3.
struct CoreTensor {
  DenseTensor3 values;

  std::size_t rank() const noexcept { return values.dims()[0]; }
  double operator()(std::size_t p, std::size_t q, std::size_t r) const noexcept {
    return values(p, q, r);
  }
};

/// Moves the cube root of each weight into the matching column of every
/// factor and resets the weights to one. The reconstruction is unchanged.
KruskalModel absorb_weights(const KruskalModel& m);

/**
 * Least-squares Tucker core for fixed CP factors:
 * G = X x1 pinv(A) x2 pinv(B) x3 pinv(C), after absorbing the weights.
 * Rank-deficient factors are fine; singular values below 1e-12 * sigma_max
 * are treated as zero. Throws NumericalError if the factors are not finite.
 */
CoreTensor fit_core(const DenseTensor3& t, const KruskalModel& m);

/// Core consistency in percent: 100 * (1 - ||G - I||^2 / R) with I the
/// superdiagonal identity. Not clamped; can be very negative.
double corcondia(const DenseTensor3& t, const KruskalModel& m);

/// Same score for an already fitted core.
double core_consistency(const CoreTensor& g);

}  // namespace autoten
