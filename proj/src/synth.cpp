#include "autoten/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "autoten/cp_als.hpp"
#include "autoten/rng.hpp"

namespace autoten {

SynthResult synth_kruskal(std::size_t rank, const Dims& dims, double noise_sigma,
                          std::uint64_t seed) {
  if (rank < 1) throw std::invalid_argument("synth: rank must be at least 1");
  if (rank > std::min({dims[0], dims[1], dims[2]})) {
    throw std::invalid_argument("synth: rank " + std::to_string(rank) +
                                " exceeds the smallest mode size");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("synth: noise_sigma must be finite and non-negative");
  }

  const KruskalModel model = init_factors(dims, rank, derive_seed(seed, 0));
  DenseTensor3 tensor = reconstruct(model, dims);
  if (noise_sigma > 0.0) {
    const double sd = noise_sigma * frobenius_norm(tensor) / std::sqrt(double(numel(dims)));
    Rng rng = make_rng(derive_seed(seed, 1));
    std::normal_distribution<double> noise(0.0, sd);
    for (double& v : tensor.values()) v += noise(rng);
  }
  return {std::move(tensor), normalize_model(model)};
}

}  // namespace autoten
