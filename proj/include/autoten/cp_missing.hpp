#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "autoten/cp_als.hpp"
#include "autoten/tensor.hpp"

namespace autoten {

using Index3 = std::array<std::size_t, 3>;

/// Tensor cells withheld from training, stored as sorted layout offsets.
class HoldoutMask {
public:
  /// Builds a mask from explicit triples. Throws on out-of-bounds or
  /// duplicate triples, and when the mask would be empty or cover every cell.
  static HoldoutMask from_triples(const Dims& dims, const std::vector<Index3>& triples);

  const Dims& dims() const noexcept { return dims_; }
  double fraction() const noexcept { return fraction_; }
  std::size_t size() const noexcept { return offsets_.size(); }

  /// Layout offsets (i + j*I + k*I*J), ascending.
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  std::vector<Index3> triples() const;
  bool contains(std::size_t offset) const;

  bool operator==(const HoldoutMask&) const = default;

private:
  HoldoutMask(const Dims& dims, double fraction, std::vector<std::size_t> offsets);
  friend HoldoutMask holdout_split(const Dims&, double, std::uint64_t);

  Dims dims_;
  double fraction_;
  std::vector<std::size_t> offsets_;
};

/// Uniform sample of round(fraction * I*J*K) cells without replacement.
HoldoutMask holdout_split(const Dims& dims, double fraction, std::uint64_t seed);

/**
 * CP decomposition that ignores the masked cells (EM imputation).
 *
 * Masked cells start at the mean of the observed entries; each iteration
 * runs one ALS sweep on the completed tensor and then re-imputes the masked
 * cells from the model. The trace holds relative error over observed cells.
 */
AlsResult cp_wals(const DenseTensor3& t, const HoldoutMask& mask, std::size_t rank,
                  const AlsOptions& opts);

/// Root mean squared prediction error over the masked cells.
double rmse(const KruskalModel& m, const DenseTensor3& t, const HoldoutMask& mask);

}  // namespace autoten
