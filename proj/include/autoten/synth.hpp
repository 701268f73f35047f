#pragma once

#include <cstddef>
#include <cstdint>

#include "autoten/tensor.hpp"

namespace autoten {

struct SynthResult {
  DenseTensor3 tensor;
  /// Generating model, normalized.
  KruskalModel truth;
};

/**
 * Random rank-`rank` tensor with i.i.d. standard-normal factors plus
 * Gaussian noise of standard deviation noise_sigma * ||signal||_F / sqrt(I*J*K).
 * Requires rank <= min(I, J, K).
 */
SynthResult synth_kruskal(std::size_t rank, const Dims& dims, double noise_sigma,
                          std::uint64_t seed);

}  // namespace autoten
