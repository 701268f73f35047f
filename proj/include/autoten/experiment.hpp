#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "autoten/cp_als.hpp"
#include "autoten/rank_select.hpp"

namespace autoten {

struct ExperimentConfig {
  std::vector<std::size_t> rank_set = {3, 4, 5, 6, 7, 8};
  std::size_t trials_per_rank = 10;
  /// Ranks scanned are 1 .. true_rank + scan_margin.
  std::size_t scan_margin = 3;
  double noise_sigma = 0.0;
  double holdout_fraction = 0.1;
  std::uint64_t master_seed = 2017;
  /// Solver controls; the seed field is ignored and derived per trial.
  AlsOptions als;
  /// Worker count for trials. Does not affect results.
  std::size_t threads = 1;

  void validate() const;

  /// Applies one `key=value` setting. Keys: ranks, trials, margin, noise,
  /// holdout, seed, max_iters, tol, restarts, threads.
  void set(const std::string& key, const std::string& value);

  /// Flat key=value text, '#' comments and blank lines ignored.
  static ExperimentConfig parse(std::istream& is);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Canonical key=value echo (threads omitted).
  std::string to_text() const;
};

struct TrialRecord {
  std::size_t true_rank = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<RankScanRow> scan;
  /// Indexed like kAllMethods; empty when that selector threw.
  std::array<std::optional<RankDecision>, 4> decisions;
  std::array<std::string, 4> errors;
  /// Ranks r where fit_error(r) exceeds fit_error(r-1) by more than 1e-6.
  std::vector<std::size_t> fit_increases;

  bool all_failed() const;
};

struct MethodAccuracy {
  Method method = Method::AutoTen;
  std::size_t true_rank = 0;
  double accuracy = 0.0;
  /// Trials counted (those where at least one method produced a decision).
  std::size_t n_trials = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;
  /// Method-major, then in rank_set order.
  std::vector<MethodAccuracy> accuracy;

  /// Pooled accuracy over every counted trial.
  double overall_accuracy(Method m) const;
  std::size_t excluded_trials() const;
};

/// Seeded synthetic rank-recovery study; deterministic in cfg.master_seed.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Writes accuracy.csv, trials.csv, scans.csv and config.txt under `dir`,
/// creating it if needed. Throws IoError on failure.
void emit_report(const ExperimentReport& rep, const std::filesystem::path& dir);

}  // namespace autoten
