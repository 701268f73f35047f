#include "autoten/rank_select.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "autoten/corcondia.hpp"
#include "autoten/errors.hpp"
#include "autoten/parallel.hpp"
#include "autoten/rng.hpp"

namespace autoten {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::AutoTen: return "AUTOTEN";
    case Method::AutoTenRec: return "AUTOTEN_REC";
    case Method::AutoTenMv: return "AUTOTEN_MV";
    case Method::Baseline1: return "BASELINE1";
  }
  return "UNKNOWN";
}

std::string_view to_string(ClusterLabel l) noexcept {
  switch (l) {
    case ClusterLabel::Good: return "good";
    case ClusterLabel::Bad: return "bad";
    case ClusterLabel::Excluded: return "excluded";
  }
  return "unknown";
}

namespace {

using Point = std::vector<double>;

double sq_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

std::array<Point, 2> means(const std::vector<Point>& pts, const std::vector<int>& labels,
                           std::size_t dim) {
  std::array<Point, 2> c{Point(dim, 0.0), Point(dim, 0.0)};
  std::array<std::size_t, 2> count{0, 0};
  for (std::size_t p = 0; p < pts.size(); ++p) {
    auto& dst = c[std::size_t(labels[p])];
    for (std::size_t d = 0; d < dim; ++d) dst[d] += pts[p][d];
    ++count[std::size_t(labels[p])];
  }
  for (std::size_t k = 0; k < 2; ++k) {
    if (count[k] == 0) continue;
    for (auto& v : c[k]) v /= double(count[k]);
  }
  return c;
}

}  // namespace

TwoMeansResult two_means(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw std::invalid_argument("two_means: no points");
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  if (dim == 0) throw std::invalid_argument("two_means: points have no features");
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("two_means: inconsistent feature counts");
    for (double v : p) {
      if (!std::isfinite(v)) throw std::invalid_argument("two_means: features must be finite");
    }
  }

  // z-score each column; a constant column carries no information.
  std::vector<Point> z(n, Point(dim, 0.0));
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (const auto& p : points) mean += p[d];
    mean /= double(n);
    double var = 0.0;
    for (const auto& p : points) var += (p[d] - mean) * (p[d] - mean);
    const double sd = std::sqrt(var / double(n));
    if (sd > 0.0) {
      for (std::size_t i = 0; i < n; ++i) z[i][d] = (points[i][d] - mean) / sd;
    }
  }

  TwoMeansResult out;
  out.labels.assign(n, 0);

  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (z[i][0] < z[lo][0]) lo = i;
    if (z[i][0] > z[hi][0]) hi = i;
  }
  if (lo == hi) {
    double far = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = sq_distance(z[i], z[lo]);
      if (d > far) {
        far = d;
        hi = i;
      }
    }
  }
  if (lo == hi) {
    // Every point coincides after standardization.
    const auto c = means(points, out.labels, dim);
    out.centroids = {c[0], c[0]};
    out.good_cluster = 0;
    return out;
  }

  std::array<Point, 2> centre{z[lo], z[hi]};
  std::vector<int> labels(n, 0);
  for (std::size_t iter = 1; iter <= 100; ++iter) {
    std::vector<int> next(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = sq_distance(z[i], centre[1]) < sq_distance(z[i], centre[0]) ? 1 : 0;
    }
    const auto ones = std::count(next.begin(), next.end(), 1);
    if (ones == 0 || std::size_t(ones) == n) break;  // keep last non-degenerate split
    out.iterations = iter;
    const bool fixpoint = iter > 1 && next == labels;
    labels = std::move(next);
    if (fixpoint) break;
    centre = means(z, labels, dim);
  }
  out.labels = labels;

  // Larger first feature wins; later features break exact ties.
  const auto zc = means(z, labels, dim);
  out.good_cluster = 0;
  for (std::size_t d = 0; d < dim; ++d) {
    if (zc[1][d] != zc[0][d]) {
      out.good_cluster = zc[1][d] > zc[0][d] ? 1 : 0;
      break;
    }
  }
  out.centroids = means(points, labels, dim);
  return out;
}

namespace {

bool usable(const RankScanRow& row) {
  return !row.failed() && row.corcondia.has_value() && std::isfinite(*row.corcondia) &&
         std::isfinite(row.fit_error);
}

RankDecision cluster_select(Method method, const std::vector<RankScanRow>& rows,
                            std::vector<std::string> feature_names,
                            const std::function<Point(const RankScanRow&)>& features) {
  std::vector<std::size_t> used;
  std::vector<Point> pts;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!usable(rows[i])) continue;
    used.push_back(i);
    pts.push_back(features(rows[i]));
  }
  if (used.empty()) {
    throw EstimationError(std::string(to_string(method)) + ": no usable scan rows");
  }
  const TwoMeansResult tm = two_means(pts);

  RankDecision d;
  d.method = method;
  d.features_used = std::move(feature_names);
  d.labels.assign(rows.size(), ClusterLabel::Excluded);
  for (std::size_t p = 0; p < used.size(); ++p) {
    const bool good = tm.labels[p] == tm.good_cluster;
    d.labels[used[p]] = good ? ClusterLabel::Good : ClusterLabel::Bad;
    if (good) d.chosen_rank = std::max(d.chosen_rank, rows[used[p]].rank);
  }
  return d;
}

}  // namespace

RankDecision autoten(const std::vector<RankScanRow>& rows) {
  return cluster_select(Method::AutoTen, rows, {"corcondia"},
                        [](const RankScanRow& r) { return Point{*r.corcondia}; });
}

RankDecision autoten_rec(const std::vector<RankScanRow>& rows) {
  return cluster_select(Method::AutoTenRec, rows, {"corcondia", "-fit_error"},
                        [](const RankScanRow& r) { return Point{*r.corcondia, -r.fit_error}; });
}

RankDecision autoten_mv(const std::vector<RankScanRow>& rows) {
  for (const auto& r : rows) {
    if (!usable(r)) continue;
    if (!r.rmse_holdout || !std::isfinite(*r.rmse_holdout)) {
      throw std::invalid_argument("AUTOTEN_MV: rank " + std::to_string(r.rank) +
                                  " has no held-out RMSE");
    }
  }
  return cluster_select(Method::AutoTenMv, rows, {"corcondia", "-rmse_holdout"},
                        [](const RankScanRow& r) { return Point{*r.corcondia, -*r.rmse_holdout}; });
}

RankDecision baseline1(const std::vector<RankScanRow>& rows, double epsilon) {
  if (rows.empty()) throw std::invalid_argument("BASELINE1: no scan rows");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].rank <= rows[i - 1].rank) {
      throw std::invalid_argument("BASELINE1: rows must be sorted by increasing rank");
    }
  }
  RankDecision d;
  d.method = Method::Baseline1;
  d.features_used = {"fit_error"};
  d.chosen_rank = rows.back().rank;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    // Written as !(>=) so NaN differences also count as a stop.
    if (!(rows[i].fit_error - rows[i + 1].fit_error >= epsilon)) {
      d.chosen_rank = rows[i].rank;
      break;
    }
  }
  return d;
}

RankDecision select_rank(Method method, const std::vector<RankScanRow>& rows) {
  switch (method) {
    case Method::AutoTen: return autoten(rows);
    case Method::AutoTenRec: return autoten_rec(rows);
    case Method::AutoTenMv: return autoten_mv(rows);
    case Method::Baseline1: return baseline1(rows);
  }
  throw std::invalid_argument("unknown method");
}

std::vector<RankScanRow> scan(const DenseTensor3& t, std::size_t min_rank, std::size_t max_rank,
                              const AlsOptions& opts, const std::optional<HoldoutMask>& holdout,
                              std::size_t threads) {
  if (min_rank < 1 || min_rank > max_rank) {
    throw std::invalid_argument("scan: need 1 <= min_rank <= max_rank");
  }
  opts.validate();
  if (frobenius_norm(t) == 0.0) throw std::domain_error("scan: tensor has zero norm");
  if (holdout && holdout->dims() != t.dims()) {
    throw std::invalid_argument("scan: holdout mask dims do not match tensor dims");
  }

  std::vector<RankScanRow> rows(max_rank - min_rank + 1);
  parallel_for(rows.size(), threads, [&](std::size_t idx) {
    RankScanRow& row = rows[idx];
    row.rank = min_rank + idx;
    AlsOptions rank_opts = opts;
    rank_opts.seed = derive_seed(opts.seed, row.rank);
    try {
      const AlsResult fit = cp_als(t, row.rank, rank_opts);
      row.fit_error = fit.trace.final_error();
      row.iterations = fit.trace.iterations_used;
      row.converged = fit.trace.converged;
      row.corcondia = corcondia(t, fit.model);
      if (holdout) {
        AlsOptions mv_opts = rank_opts;
        mv_opts.seed = derive_seed(rank_opts.seed, 1);
        const AlsResult mv = cp_wals(t, *holdout, row.rank, mv_opts);
        row.rmse_holdout = rmse(mv.model, t, *holdout);
      }
    } catch (const NumericalError& e) {
      row.fit_error = std::numeric_limits<double>::infinity();
      row.corcondia.reset();
      row.rmse_holdout.reset();
      row.converged = false;
      row.failure = e.what();
    }
  });
  return rows;
}

}  // namespace autoten
