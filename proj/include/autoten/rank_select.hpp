#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autoten/cp_als.hpp"
#include "autoten/cp_missing.hpp"
#include "autoten/tensor.hpp"

namespace autoten {

/// Diagnostics for one candidate rank.
struct RankScanRow {
  std::size_t rank = 0;
  /// Final relative error of the full-data fit; +inf when the solve failed.
  double fit_error = 0.0;
  /// Absent when the solve failed.
  std::optional<double> corcondia;
  /// Present only when the scan ran the held-out path.
  std::optional<double> rmse_holdout;
  std::size_t iterations = 0;
  bool converged = false;
  /// Solver error message; non-empty marks the row as failed.
  std::string failure;

  bool failed() const noexcept { return !failure.empty(); }
};

enum class Method { AutoTen, AutoTenRec, AutoTenMv, Baseline1 };

inline constexpr std::array<Method, 4> kAllMethods = {Method::AutoTen, Method::AutoTenRec,
                                                      Method::AutoTenMv, Method::Baseline1};

/// AUTOTEN, AUTOTEN_REC, AUTOTEN_MV or BASELINE1.
std::string_view to_string(Method m) noexcept;

enum class ClusterLabel { Good, Bad, Excluded };

std::string_view to_string(ClusterLabel l) noexcept;

struct RankDecision {
  Method method = Method::AutoTen;
  std::size_t chosen_rank = 0;
  /// One label per input row; failed rows are Excluded. Empty for BASELINE1.
  std::vector<ClusterLabel> labels;
  std::vector<std::string> features_used;
};

struct TwoMeansResult {
  std::vector<int> labels;
  /// Cluster means in the (unstandardized) input feature space.
  std::array<std::vector<double>, 2> centroids;
  int good_cluster = 0;
  std::size_t iterations = 0;
};

/**
 * Parameter-free k = 2 Lloyd clustering.
 *
 * Features are z-scored per column (a constant column maps to zero). The two
 * seeds are the points with the smallest and largest first feature, lowest
 * index on ties; if those coincide the second seed is the point farthest from
 * the first. The cluster whose centroid has the larger first feature is
 * designated good, so callers orient the first feature as larger = better.
 */
TwoMeansResult two_means(const std::vector<std::vector<double>>& points);

/**
 * Decomposes `t` at every rank in [min_rank, max_rank] and records fit error
 * and CORCONDIA; with a holdout mask also runs the missing-value solver and
 * records the held-out RMSE. Each rank uses its own seed stream derived from
 * `opts.seed`, so the rows do not depend on `threads`.
 */
std::vector<RankScanRow> scan(const DenseTensor3& t, std::size_t min_rank, std::size_t max_rank,
                              const AlsOptions& opts,
                              const std::optional<HoldoutMask>& holdout = std::nullopt,
                              std::size_t threads = 1);

/// Clusters on CORCONDIA alone and returns the largest good rank.
RankDecision autoten(const std::vector<RankScanRow>& rows);

/// Clusters on (CORCONDIA, -fit_error).
RankDecision autoten_rec(const std::vector<RankScanRow>& rows);

/// Clusters on (CORCONDIA, -rmse_holdout). Throws std::invalid_argument if a
/// usable row lacks a held-out RMSE.
RankDecision autoten_mv(const std::vector<RankScanRow>& rows);

/// Smallest rank whose fit error improves on the next rank by less than
/// `epsilon` (increases count as no improvement); the largest rank otherwise.
RankDecision baseline1(const std::vector<RankScanRow>& rows, double epsilon = 1e-6);

RankDecision select_rank(Method method, const std::vector<RankScanRow>& rows);

}  // namespace autoten
