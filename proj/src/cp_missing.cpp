#include "autoten/cp_missing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "autoten/errors.hpp"
#include "autoten/rng.hpp"
#include "cp_internal.hpp"

namespace autoten {

namespace {

void check_count(std::size_t n, std::size_t total) {
  if (n < 1) throw std::invalid_argument("holdout mask would be empty");
  if (n >= total) throw std::invalid_argument("holdout mask would cover every cell");
}

double observed_sq_error(std::span<const double> x, const Matrix& approx,
                         const std::vector<char>& masked) {
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (masked[n]) continue;
    const double d = x[n] - approx.data()[n];
    s += d * d;
  }
  return s;
}

Matrix model_unfolding(const KruskalModel& m) {
  return m.factors[0] * m.weights.asDiagonal() *
         khatri_rao(m.factors[2], m.factors[1]).transpose();
}

}  // namespace

HoldoutMask::HoldoutMask(const Dims& dims, double fraction, std::vector<std::size_t> offsets)
    : dims_(dims), fraction_(fraction), offsets_(std::move(offsets)) {}

HoldoutMask HoldoutMask::from_triples(const Dims& dims, const std::vector<Index3>& triples) {
  const std::size_t total = numel(dims);
  check_count(triples.size(), total);
  std::vector<std::size_t> offsets;
  offsets.reserve(triples.size());
  for (const auto& [i, j, k] : triples) {
    if (i >= dims[0] || j >= dims[1] || k >= dims[2]) {
      throw std::invalid_argument("mask index (" + std::to_string(i) + "," + std::to_string(j) +
                                  "," + std::to_string(k) + ") out of bounds");
    }
    offsets.push_back(i + dims[0] * (j + dims[1] * k));
  }
  std::sort(offsets.begin(), offsets.end());
  if (std::adjacent_find(offsets.begin(), offsets.end()) != offsets.end()) {
    throw std::invalid_argument("mask contains duplicate cells");
  }
  const double fraction = double(offsets.size()) / double(total);
  return HoldoutMask(dims, fraction, std::move(offsets));
}

std::vector<Index3> HoldoutMask::triples() const {
  std::vector<Index3> out;
  out.reserve(offsets_.size());
  for (std::size_t off : offsets_) {
    out.push_back({off % dims_[0], (off / dims_[0]) % dims_[1], off / (dims_[0] * dims_[1])});
  }
  return out;
}

bool HoldoutMask::contains(std::size_t offset) const {
  return std::binary_search(offsets_.begin(), offsets_.end(), offset);
}

HoldoutMask holdout_split(const Dims& dims, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  }
  const std::size_t total = numel(dims);
  const auto n = static_cast<std::size_t>(std::llround(fraction * double(total)));
  check_count(n, total);

  // Partial Fisher-Yates: the first n slots end up a uniform sample.
  std::vector<std::size_t> cells(total);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  Rng rng = make_rng(seed);
  for (std::size_t s = 0; s < n; ++s) {
    std::uniform_int_distribution<std::size_t> pick(s, total - 1);
    std::swap(cells[s], cells[pick(rng)]);
  }
  cells.resize(n);
  std::sort(cells.begin(), cells.end());
  return HoldoutMask(dims, fraction, std::move(cells));
}

AlsResult cp_wals(const DenseTensor3& t, const HoldoutMask& mask, std::size_t rank,
                  const AlsOptions& opts) {
  opts.validate();
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  if (mask.dims() != t.dims()) throw std::invalid_argument("mask dims do not match tensor dims");

  const auto x = t.values();
  std::vector<char> masked(x.size(), 0);
  for (std::size_t off : mask.offsets()) masked[off] = 1;

  double observed_sum = 0.0;
  double observed_sq = 0.0;
  std::size_t observed_n = 0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (masked[n]) continue;
    observed_sum += x[n];
    observed_sq += x[n] * x[n];
    ++observed_n;
  }
  if (observed_sq == 0.0) throw std::domain_error("cp_wals: observed entries have zero norm");
  const double observed_norm = std::sqrt(observed_sq);
  const double observed_mean = observed_sum / double(observed_n);

  AlsResult best;
  bool have_best = false;
  for (std::size_t restart = 0; restart < opts.n_restarts; ++restart) {
    DenseTensor3 completed = t;
    for (std::size_t off : mask.offsets()) completed.values()[off] = observed_mean;

    AlsResult run;
    run.model = init_factors(t.dims(), rank, derive_seed(opts.seed, restart));
    double prev = std::sqrt(observed_sq_error(x, model_unfolding(run.model), masked)) / observed_norm;
    for (std::size_t it = 1; it <= opts.max_iters; ++it) {
      detail::als_sweep(detail::unfold_all(completed), run.model, it);
      const Matrix approx = model_unfolding(run.model);
      const double err = std::sqrt(observed_sq_error(x, approx, masked)) / observed_norm;
      if (!std::isfinite(err)) throw NumericalError("missing-value ALS error is not finite", it);
      for (std::size_t off : mask.offsets()) completed.values()[off] = approx.data()[off];

      run.trace.errors.push_back(err);
      run.trace.iterations_used = it;
      if (std::abs(prev - err) < opts.tol) {
        run.trace.converged = true;
        break;
      }
      prev = err;
    }
    if (!have_best || run.trace.final_error() < best.trace.final_error()) {
      best = std::move(run);
      have_best = true;
    }
  }
  best.model = normalize_model(std::move(best.model));
  return best;
}

double rmse(const KruskalModel& m, const DenseTensor3& t, const HoldoutMask& mask) {
  if (mask.size() == 0) throw std::invalid_argument("rmse: mask is empty");
  if (mask.dims() != t.dims() || m.dims() != t.dims()) {
    throw std::invalid_argument("rmse: model, tensor and mask dims must agree");
  }
  m.validate();
  const auto& [a, b, c] = m.factors;
  double s = 0.0;
  for (const auto& [i, j, k] : mask.triples()) {
    double pred = 0.0;
    for (Eigen::Index r = 0; r < m.weights.size(); ++r) {
      pred += m.weights(r) * a(Eigen::Index(i), r) * b(Eigen::Index(j), r) * c(Eigen::Index(k), r);
    }
    const double d = t(i, j, k) - pred;
    s += d * d;
  }
  return std::sqrt(s / double(mask.size()));
}

}  // namespace autoten
