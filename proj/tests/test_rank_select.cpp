#include <limits>

#include <gtest/gtest.h>

#include "autoten/errors.hpp"
#include "autoten/rank_select.hpp"
#include "autoten/synth.hpp"
#include "oracles.hpp"

using namespace autoten;
using autoten::testing::brute_force_good_cluster;
using autoten::testing::random_tensor;

namespace {

std::vector<RankScanRow> rows_from(const std::vector<double>& cc, const std::vector<double>& err,
                                   const std::vector<double>& rmse = {}) {
  std::vector<RankScanRow> rows;
  for (std::size_t i = 0; i < std::max(cc.size(), err.size()); ++i) {
    RankScanRow r;
    r.rank = i + 1;
    r.fit_error = err.empty() ? 0.1 : err[i];
    r.corcondia = cc.empty() ? 50.0 : cc[i];
    if (!rmse.empty()) r.rmse_holdout = rmse[i];
    r.converged = true;
    rows.push_back(r);
  }
  return rows;
}

std::vector<bool> good_of(const TwoMeansResult& r) {
  std::vector<bool> g;
  for (int l : r.labels) g.push_back(l == r.good_cluster);
  return g;
}

/// Largest rank the exhaustive clustering oracle places in the good cluster.
std::size_t oracle_choice(const std::vector<std::vector<double>>& pts) {
  const auto good = brute_force_good_cluster(pts);
  std::size_t best = 0;
  for (std::size_t i = 0; i < good.size(); ++i) {
    if (good[i]) best = i + 1;
  }
  return best;
}

void expect_decision_contract(const RankDecision& d, const std::vector<RankScanRow>& rows) {
  std::size_t max_good = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (d.labels[i] == ClusterLabel::Good) max_good = std::max(max_good, rows[i].rank);
  }
  EXPECT_EQ(d.chosen_rank, max_good);
}

}  // namespace

TEST(TwoMeans, SeparatedOneDimensional) {
  const auto r = two_means({{0}, {1}, {99}, {100}});
  EXPECT_EQ(good_of(r), (std::vector<bool>{false, false, true, true}));
  EXPECT_DOUBLE_EQ(r.centroids[std::size_t(r.good_cluster)][0], 99.5);
  EXPECT_DOUBLE_EQ(r.centroids[std::size_t(1 - r.good_cluster)][0], 0.5);
}

TEST(TwoMeans, IdenticalPointsFormOneCluster) {
  const auto r = two_means({{3, 1}, {3, 1}, {3, 1}});
  EXPECT_EQ(r.labels, (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(r.good_cluster, 0);
}

TEST(TwoMeans, SinglePoint) {
  const auto r = two_means({{7}});
  EXPECT_EQ(r.labels, std::vector<int>{0});
  EXPECT_EQ(r.good_cluster, 0);
}

TEST(TwoMeans, TwoDimensionalExampleMatchesExhaustiveOracle) {
  const std::vector<std::vector<double>> pts{{100, 0}, {98, 0.1}, {10, 5}, {5, 6}};
  EXPECT_EQ(good_of(two_means(pts)), brute_force_good_cluster(pts));
  EXPECT_EQ(good_of(two_means(pts)), (std::vector<bool>{true, true, false, false}));
}

TEST(TwoMeans, MatchesExhaustiveOracleOnRandomWellSeparatedSets) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::vector<double>> pts;
    const int n = 3 + rep % 8;
    for (int i = 0; i < n; ++i) {
      const double base = i < n / 2 ? 0.0 : 5.0;
      pts.push_back({base + noise(rng), -base + noise(rng)});
    }
    ASSERT_EQ(good_of(two_means(pts)), brute_force_good_cluster(pts)) << "rep " << rep;
  }
}

TEST(TwoMeans, ConstantColumnIsIgnored) {
  const auto a = two_means({{0, 4}, {1, 4}, {99, 4}, {100, 4}});
  const auto b = two_means({{0}, {1}, {99}, {100}});
  EXPECT_EQ(a.labels, b.labels);
}

TEST(TwoMeans, LabelsInvariantUnderPositiveAffineRescaling) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<double>> pts, scaled;
    for (int i = 0; i < 9; ++i) {
      const double x = normal(rng), y = normal(rng);
      pts.push_back({x, y});
      // Powers of two keep the z-scores bit-identical.
      scaled.push_back({4.0 * x + 3.0, 0.5 * y - 100.0});
    }
    EXPECT_EQ(two_means(pts).labels, two_means(scaled).labels);
  }
}

TEST(TwoMeans, Errors) {
  EXPECT_THROW(two_means({}), std::invalid_argument);
  EXPECT_THROW(two_means({{1, 2}, {3}}), std::invalid_argument);
  EXPECT_THROW(two_means({{std::nan("")}}), std::invalid_argument);
}

TEST(AutoTen, SeparatedScores) {
  const auto rows = rows_from({100, 99, 95, 10, 5}, {});
  const auto d = autoten::autoten(rows);
  EXPECT_EQ(d.chosen_rank, 3u);
  EXPECT_EQ(d.method, Method::AutoTen);
  EXPECT_EQ(d.features_used, std::vector<std::string>{"corcondia"});
  expect_decision_contract(d, rows);
}

TEST(AutoTen, SingleRow) {
  auto rows = rows_from({40}, {});
  rows[0].rank = 4;
  EXPECT_EQ(autoten::autoten(rows).chosen_rank, 4u);
}

TEST(AutoTen, IdenticalScoresChooseMaxRank) {
  EXPECT_EQ(autoten::autoten(rows_from({100, 100, 100}, {})).chosen_rank, 3u);
}

TEST(AutoTen, NoUsableRowsIsEstimationError) {
  auto rows = rows_from({100, 90}, {});
  for (auto& r : rows) {
    r.failure = "diverged";
    r.corcondia.reset();
    r.fit_error = std::numeric_limits<double>::infinity();
  }
  EXPECT_THROW(autoten::autoten(rows), EstimationError);
}

TEST(AutoTen, FailedRowsAreExcluded) {
  auto rows = rows_from({100, 99, 95, 10, 5}, {});
  rows[4].failure = "diverged";
  rows[4].corcondia.reset();
  rows[4].fit_error = std::numeric_limits<double>::infinity();
  const auto d = autoten::autoten(rows);
  EXPECT_EQ(d.labels[4], ClusterLabel::Excluded);
  EXPECT_EQ(d.chosen_rank, 3u);
  expect_decision_contract(d, rows);
}

TEST(AutoTenRec, ThreeRowExampleFollowsOracle) {
  const auto rows = rows_from({100, 99, -20}, {0.5, 1e-7, 1e-7});
  const auto d = autoten_rec(rows);
  EXPECT_EQ(d.chosen_rank, oracle_choice({{100, -0.5}, {99, -1e-7}, {-20, -1e-7}}));
  EXPECT_EQ(d.labels[2], ClusterLabel::Bad);
  expect_decision_contract(d, rows);
}

TEST(AutoTenRec, IdenticalFeaturesChooseMaxRank) {
  EXPECT_EQ(autoten_rec(rows_from({80, 80, 80, 80}, {0.2, 0.2, 0.2, 0.2})).chosen_rank, 4u);
}

TEST(AutoTenRec, DominatedRowIsBad) {
  const auto d = autoten_rec(rows_from({90, 20}, {0.01, 0.3}));
  EXPECT_EQ(d.labels[0], ClusterLabel::Good);
  EXPECT_EQ(d.labels[1], ClusterLabel::Bad);
  EXPECT_EQ(d.chosen_rank, 1u);
}

TEST(AutoTenMv, ThreeRowExampleFollowsOracle) {
  const auto rows = rows_from({100, 99, -30}, {0.5, 0.1, 0.1}, {0.4, 1e-4, 1e-4});
  const auto d = autoten_mv(rows);
  EXPECT_EQ(d.chosen_rank, oracle_choice({{100, -0.4}, {99, -1e-4}, {-30, -1e-4}}));
  EXPECT_EQ(d.features_used, (std::vector<std::string>{"corcondia", "-rmse_holdout"}));
  expect_decision_contract(d, rows);
}

TEST(AutoTenMv, MissingRmseIsArgumentError) {
  EXPECT_THROW(autoten_mv(rows_from({100, 50}, {0.1, 0.05})), std::invalid_argument);
}

TEST(AutoTenMv, FailedRowMayLackRmse) {
  auto rows = rows_from({100, 99, 10}, {0.5, 0.1, 0.1}, {0.4, 0.01, 0.3});
  rows[2].rmse_holdout.reset();
  rows[2].corcondia.reset();
  rows[2].failure = "diverged";
  EXPECT_NO_THROW(autoten_mv(rows));
}

TEST(AutoTenMv, SingleRow) {
  EXPECT_EQ(autoten_mv(rows_from({12}, {0.3}, {0.2})).chosen_rank, 1u);
}

TEST(Baseline1, PlateauAtThree) {
  const auto d = baseline1(rows_from({}, {0.5, 0.2, 1e-9, 1e-9}));
  EXPECT_EQ(d.chosen_rank, 3u);
  EXPECT_TRUE(d.labels.empty());
}

TEST(Baseline1, StrictlyDecreasingFallsBackToMaxRank) {
  EXPECT_EQ(baseline1(rows_from({}, {0.9, 0.8, 0.7, 0.6, 0.5})).chosen_rank, 5u);
}

TEST(Baseline1, IncreaseStops) {
  EXPECT_EQ(baseline1(rows_from({}, {0.5, 0.50001})).chosen_rank, 1u);
}

TEST(Baseline1, EpsilonIsRespected) {
  const auto rows = rows_from({}, {0.5, 0.4995, 0.1});
  EXPECT_EQ(baseline1(rows, 1e-6).chosen_rank, 3u);
  EXPECT_EQ(baseline1(rows, 1e-3).chosen_rank, 1u);
}

TEST(Baseline1, IgnoresOtherFeatures) {
  auto a = rows_from({100, 99, 95, 10}, {0.5, 0.2, 1e-9, 1e-9}, {0.3, 0.2, 0.1, 0.0});
  auto b = a;
  for (auto& r : b) {
    r.corcondia = -1000.0;
    r.rmse_holdout.reset();
  }
  EXPECT_EQ(baseline1(a).chosen_rank, baseline1(b).chosen_rank);
}

TEST(Baseline1, Errors) {
  EXPECT_THROW(baseline1({}), std::invalid_argument);
  auto rows = rows_from({}, {0.5, 0.2});
  std::swap(rows[0], rows[1]);
  EXPECT_THROW(baseline1(rows), std::invalid_argument);
}

TEST(SelectRank, DispatchesAndIsPure) {
  const auto rows = rows_from({100, 97, 60, -5, -40}, {0.4, 0.05, 0.01, 0.01, 0.009},
                              {0.3, 0.06, 0.02, 0.05, 0.08});
  for (Method m : kAllMethods) {
    const auto a = select_rank(m, rows);
    const auto b = select_rank(m, rows);
    EXPECT_EQ(a.method, m);
    EXPECT_EQ(a.chosen_rank, b.chosen_rank);
    EXPECT_EQ(a.labels, b.labels);
    if (m != Method::Baseline1) expect_decision_contract(a, rows);
  }
  EXPECT_EQ(to_string(Method::AutoTenRec), "AUTOTEN_REC");
  EXPECT_EQ(to_string(Method::Baseline1), "BASELINE1");
}

TEST(Scan, SingleRankOneRowScoresHundred) {
  const auto rows = scan(random_tensor({4, 5, 3}, 9), 1, 1, AlsOptions{});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].rank, 1u);
  EXPECT_NEAR(*rows[0].corcondia, 100.0, 1e-6);
  EXPECT_FALSE(rows[0].rmse_holdout);
}

TEST(Scan, NoiselessRankThreeFitsAtAndAboveTruth) {
  const auto s = synth_kruskal(3, {6, 6, 6}, 0.0, 11);
  AlsOptions o;
  o.seed = 4;
  const auto rows = scan(s.tensor, 1, 6, o);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.failed());
    EXPECT_FALSE(r.rmse_holdout);
    if (r.rank >= 3) EXPECT_LT(r.fit_error, 1e-6) << "rank " << r.rank;
  }
  EXPECT_GT(rows[1].fit_error, 1e-3);
}

TEST(Scan, HoldoutPopulatesRmse) {
  const auto s = synth_kruskal(2, {5, 5, 5}, 0.0, 3);
  const auto rows = scan(s.tensor, 1, 3, AlsOptions{}, holdout_split({5, 5, 5}, 0.1, 1));
  for (const auto& r : rows) ASSERT_TRUE(r.rmse_holdout);
  EXPECT_LT(*rows[1].rmse_holdout, 1e-3);
}

TEST(Scan, ThreadCountDoesNotChangeRows) {
  const auto t = random_tensor({5, 4, 6}, 2);
  AlsOptions o;
  o.seed = 8;
  const auto a = scan(t, 1, 5, o, std::nullopt, 1);
  const auto b = scan(t, 1, 5, o, std::nullopt, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].fit_error, b[i].fit_error);
    EXPECT_EQ(a[i].corcondia, b[i].corcondia);
    EXPECT_EQ(a[i].iterations, b[i].iterations);
  }
}

TEST(Scan, OverflowMarksRowsFailed) {
  const DenseTensor3 t({3, 3, 3}, std::vector<double>(27, 1e300));
  const auto rows = scan(t, 1, 2, AlsOptions{});
  for (const auto& r : rows) {
    EXPECT_TRUE(r.failed());
    EXPECT_FALSE(r.corcondia);
    EXPECT_TRUE(std::isinf(r.fit_error));
  }
  EXPECT_THROW(autoten::autoten(rows), EstimationError);
}

TEST(Scan, Errors) {
  const auto t = random_tensor({3, 3, 3}, 1);
  EXPECT_THROW(scan(t, 0, 2, AlsOptions{}), std::invalid_argument);
  EXPECT_THROW(scan(t, 3, 2, AlsOptions{}), std::invalid_argument);
  EXPECT_THROW(scan(DenseTensor3({3, 3, 3}), 1, 2, AlsOptions{}), std::domain_error);
  EXPECT_THROW(scan(t, 1, 2, AlsOptions{}, holdout_split({3, 3, 4}, 0.1, 0)), std::invalid_argument);
}
