#pragma once

#include <array>

#include "autoten/cp_als.hpp"

namespace autoten::detail {

/// Mode-1, mode-2 and mode-3 unfoldings of one tensor.
using Unfoldings = std::array<Matrix, 3>;

Unfoldings unfold_all(const DenseTensor3& t);

void als_sweep(const Unfoldings& x, KruskalModel& m, std::size_t iteration);

/// ||X - model|| / x_norm evaluated on the mode-1 unfolding.
double unfolded_relative_error(const Unfoldings& x, double x_norm, const KruskalModel& m);

}  // namespace autoten::detail
