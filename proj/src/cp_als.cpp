#include "autoten/cp_als.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "autoten/errors.hpp"
#include "autoten/rng.hpp"
#include "cp_internal.hpp"

namespace autoten {

void AlsOptions::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (n_restarts < 1) throw std::invalid_argument("n_restarts must be at least 1");
}

KruskalModel init_factors(const Dims& dims, std::size_t rank, std::uint64_t seed) {
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  KruskalModel m;
  m.weights = Vector::Ones(Eigen::Index(rank));
  for (int n = 0; n < 3; ++n) {
    Matrix f(Eigen::Index(dims[n]), Eigen::Index(rank));
    // Fill in storage order so the draw sequence is fixed.
    for (Eigen::Index c = 0; c < f.cols(); ++c)
      for (Eigen::Index r = 0; r < f.rows(); ++r) f(r, c) = normal(rng);
    m.factors[n] = std::move(f);
  }
  return m;
}

namespace detail {

Unfoldings unfold_all(const DenseTensor3& t) {
  return {unfold(t, 1), unfold(t, 2), unfold(t, 3)};
}

void als_sweep(const Unfoldings& x, KruskalModel& m, std::size_t iteration) {
  auto& f = m.factors;
  for (int mode = 0; mode < 3; ++mode) {
    // Partner factors in Khatri-Rao order matching the Kolda-Bader unfolding.
    const Matrix& hi = mode == 2 ? f[1] : f[2];
    const Matrix& lo = mode == 0 ? f[1] : f[0];
    const Matrix gram = (hi.transpose() * hi).cwiseProduct(lo.transpose() * lo);
    Matrix updated = x[mode] * khatri_rao(hi, lo) * pinv(gram);
    if (!updated.allFinite()) {
      throw NumericalError("ALS produced a non-finite factor in mode " + std::to_string(mode + 1),
                           iteration);
    }
    for (Eigen::Index r = 0; r < updated.cols(); ++r) {
      const double norm = updated.col(r).norm();
      m.weights(r) = norm;
      if (norm > 0.0) updated.col(r) /= norm;
    }
    f[mode] = std::move(updated);
  }
}

double unfolded_relative_error(const Unfoldings& x, double x_norm, const KruskalModel& m) {
  const Matrix approx =
      m.factors[0] * m.weights.asDiagonal() * khatri_rao(m.factors[2], m.factors[1]).transpose();
  return (x[0] - approx).norm() / x_norm;
}

void als_sweep(const DenseTensor3& t, KruskalModel& m, std::size_t iteration) {
  als_sweep(unfold_all(t), m, iteration);
}

}  // namespace detail

AlsResult cp_als(const DenseTensor3& t, std::size_t rank, const AlsOptions& opts) {
  opts.validate();
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  const double x_norm = frobenius_norm(t);
  if (x_norm == 0.0) throw std::domain_error("cp_als: tensor has zero norm");

  const detail::Unfoldings x = detail::unfold_all(t);
  AlsResult best;
  bool have_best = false;

  for (std::size_t restart = 0; restart < opts.n_restarts; ++restart) {
    AlsResult run;
    run.model = init_factors(t.dims(), rank, derive_seed(opts.seed, restart));
    double prev = detail::unfolded_relative_error(x, x_norm, run.model);
    for (std::size_t it = 1; it <= opts.max_iters; ++it) {
      detail::als_sweep(x, run.model, it);
      const double err = detail::unfolded_relative_error(x, x_norm, run.model);
      if (!std::isfinite(err)) throw NumericalError("ALS relative error is not finite", it);
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

KruskalModel normalize_model(KruskalModel m) {
  m.validate();
  const auto rank = Eigen::Index(m.rank());
  std::vector<bool> zero(std::size_t(rank), false);
  for (Eigen::Index r = 0; r < rank; ++r) {
    double scale = 1.0;
    for (auto& f : m.factors) {
      const double norm = f.col(r).norm();
      if (norm == 0.0) {
        zero[std::size_t(r)] = true;
        f.col(r).setZero();
        if (f.rows() > 0) f(0, r) = 1.0;
      } else {
        f.col(r) /= norm;
        scale *= norm;
      }
    }
    m.weights(r) = zero[std::size_t(r)] ? 0.0 : m.weights(r) * scale;
    if (m.weights(r) < 0.0) {
      m.weights(r) = -m.weights(r);
      m.factors[0].col(r) *= -1.0;
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(rank));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return m.weights(a) > m.weights(b); });

  KruskalModel out;
  out.weights.resize(rank);
  for (int n = 0; n < 3; ++n) out.factors[n].resize(m.factors[n].rows(), rank);
  for (Eigen::Index dst = 0; dst < rank; ++dst) {
    const Eigen::Index src = order[std::size_t(dst)];
    out.weights(dst) = m.weights(src);
    for (int n = 0; n < 3; ++n) out.factors[n].col(dst) = m.factors[n].col(src);
    if (zero[std::size_t(src)]) out.zero_components.push_back(std::size_t(dst));
  }
  out.normalized = true;
  return out;
}

}  // namespace autoten
