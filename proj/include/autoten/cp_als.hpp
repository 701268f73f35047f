#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "autoten/tensor.hpp"

namespace autoten {

struct AlsOptions {
  std::size_t max_iters = 500;
  /// Stop once the relative error changes by less than this between sweeps.
  double tol = 1e-8;
  std::size_t n_restarts = 3;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on a zero iteration/restart count or non-positive tol.
  void validate() const;
};

struct AlsTrace {
  /// Relative error after each sweep.
  std::vector<double> errors;
  bool converged = false;
  std::size_t iterations_used = 0;

  double final_error() const { return errors.empty() ? 1.0 : errors.back(); }
};

struct AlsResult {
  KruskalModel model;
  AlsTrace trace;
};

/// Standard-normal factors and unit weights; bitwise reproducible for a given seed.
KruskalModel init_factors(const Dims& dims, std::size_t rank, std::uint64_t seed);

/**
 * Rank-`rank` CP decomposition by alternating least squares.
 *
 * Each mode update solves its least-squares subproblem through the
 * pseudoinverse of the Hadamard product of Gram matrices, so overfactored
 * ranks with singular Grams are handled. Runs `opts.n_restarts` random
 * initializations and returns the one with the lowest final error, normalized
 * and sorted by descending weight.
 *
 * Throws std::domain_error for a zero tensor and NumericalError if any
 * iterate becomes non-finite.
 */
AlsResult cp_als(const DenseTensor3& t, std::size_t rank, const AlsOptions& opts);

/// Unit-norm columns, non-negative weights, components sorted by descending weight.
KruskalModel normalize_model(KruskalModel m);

namespace detail {

/// One ALS pass over modes 1, 2, 3 against `t`. Factor columns are kept at
/// unit norm with scales folded into the weights. Throws NumericalError
/// tagged with `iteration` on non-finite results.
void als_sweep(const DenseTensor3& t, KruskalModel& m, std::size_t iteration);

}  // namespace detail

}  // namespace autoten
