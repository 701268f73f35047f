#include "autoten/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "autoten/corcondia.hpp"
#include "autoten/cp_als.hpp"
#include "autoten/cp_missing.hpp"
#include "autoten/errors.hpp"
#include "autoten/experiment.hpp"
#include "autoten/io.hpp"
#include "autoten/parallel.hpp"
#include "autoten/rank_select.hpp"
#include "autoten/rng.hpp"
#include "autoten/synth.hpp"

namespace autoten::cli {

namespace {

/// Bad flag values detected after parsing; exits with kExitUsage.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SolverFlags {
  std::optional<std::uint64_t> seed;
  std::size_t max_iters = AlsOptions{}.max_iters;
  double tol = AlsOptions{}.tol;
  std::size_t restarts = AlsOptions{}.n_restarts;

  void add_to(CLI::App* app) {
    app->add_option("--seed", seed, "Random seed (generated and printed when omitted)");
    app->add_option("--max-iters", max_iters, "ALS iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--tol", tol, "Stop when the relative error changes by less than this")
        ->check(CLI::PositiveNumber);
    app->add_option("--restarts", restarts, "Random restarts per solve")->check(CLI::PositiveNumber);
  }

  AlsOptions resolve(std::ostream& out) const {
    AlsOptions opts;
    opts.max_iters = max_iters;
    opts.tol = tol;
    opts.n_restarts = restarts;
    if (seed) {
      opts.seed = *seed;
    } else {
      std::random_device rd;
      opts.seed = (std::uint64_t(rd()) << 32) ^ rd();
      out << "seed=" << opts.seed << '\n';
    }
    return opts;
  }
};

Dims parse_dims(const std::string& text) {
  std::vector<std::size_t> vals;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || v == 0) {
      throw UsageError("--dims expects three positive integers I,J,K, got '" + text + "'");
    }
    vals.push_back(v);
  }
  if (vals.size() != 3) {
    throw UsageError("--dims expects three positive integers I,J,K, got '" + text + "'");
  }
  return {vals[0], vals[1], vals[2]};
}

std::filesystem::path truth_path_for(const std::filesystem::path& out) {
  auto p = out;
  p.replace_extension(".truth");
  return p;
}

void print_model_summary(std::ostream& out, const KruskalModel& m) {
  out << "lambda";
  for (Eigen::Index r = 0; r < m.weights.size(); ++r) out << ' ' << io::format_real(m.weights(r));
  out << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tensor rank estimation: CP-ALS, CORCONDIA and AutoTen-style selectors",
               "autoten"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a random low-rank tensor");
  std::size_t synth_rank = 0;
  std::string synth_dims;
  std::uint64_t synth_seed = 0;
  double synth_noise = 0.0;
  std::string synth_out = "tensor.tns";
  synth->add_option("--rank", synth_rank, "True CP rank")->required()->check(CLI::PositiveNumber);
  synth->add_option("--dims", synth_dims, "Mode sizes I,J,K")->required();
  synth->add_option("--seed", synth_seed, "Random seed")->required();
  synth->add_option("--noise", synth_noise, "Relative noise level")->check(CLI::NonNegativeNumber);
  synth->add_option("--out", synth_out, "Tensor file; the truth model goes next to it as .truth");

  // decompose
  auto* decompose = app.add_subcommand("decompose", "Fit one CP model at a fixed rank");
  std::string dec_input;
  std::size_t dec_rank = 0;
  std::string dec_out;
  SolverFlags dec_solver;
  decompose->add_option("--input", dec_input, "Tensor file")->required();
  decompose->add_option("--rank", dec_rank, "CP rank")->required()->check(CLI::PositiveNumber);
  decompose->add_option("--out", dec_out, "Write the factor file here");
  dec_solver.add_to(decompose);

  // corcondia
  auto* cc = app.add_subcommand("corcondia", "Core consistency of one CP model");
  std::string cc_input;
  std::string cc_factors;
  std::size_t cc_rank = 0;
  std::string cc_out;
  SolverFlags cc_solver;
  cc->add_option("--input", cc_input, "Tensor file")->required();
  auto* cc_factors_opt = cc->add_option("--factors", cc_factors, "Score this factor file");
  auto* cc_rank_opt =
      cc->add_option("--rank", cc_rank, "Fit a model at this rank first")->check(CLI::PositiveNumber);
  cc_factors_opt->excludes(cc_rank_opt);
  cc->add_option("--out", cc_out, "Write the fitted factor file here");
  cc_solver.add_to(cc);

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "Scan ranks and apply all four selectors");
  std::string scan_input;
  std::size_t scan_min = 1;
  std::size_t scan_max = 0;
  std::optional<double> scan_holdout;
  std::string scan_csv;
  std::string scan_mask;
  std::size_t scan_threads = default_threads();
  SolverFlags scan_solver;
  scan_cmd->add_option("--input", scan_input, "Tensor file")->required();
  scan_cmd->add_option("--min-rank", scan_min, "Smallest rank")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--max-rank", scan_max, "Largest rank")->required()->check(CLI::PositiveNumber);
  scan_cmd->add_option("--holdout", scan_holdout, "Held-out fraction for the RMSE feature");
  scan_cmd->add_option("--csv", scan_csv, "Write the scan table here");
  scan_cmd->add_option("--mask-out", scan_mask, "Write the holdout mask here");
  scan_cmd->add_option("--threads", scan_threads, "Parallel ranks")->check(CLI::PositiveNumber);
  scan_solver.add_to(scan_cmd);

  // experiment
  auto* exp = app.add_subcommand("experiment", "Seeded synthetic rank-recovery study");
  std::string exp_config;
  std::string exp_out;
  std::string exp_ranks;
  std::optional<std::string> exp_trials, exp_margin, exp_noise, exp_holdout, exp_seed, exp_iters,
      exp_tol, exp_restarts;
  std::size_t exp_threads = default_threads();
  exp->add_option("--config", exp_config, "key=value config file");
  exp->add_option("--out", exp_out, "Output directory")->required();
  exp->add_option("--ranks", exp_ranks, "True ranks, e.g. 3,4,5 or 3..8");
  exp->add_option("--trials", exp_trials, "Trials per rank");
  exp->add_option("--margin", exp_margin, "Ranks scanned above the truth");
  exp->add_option("--noise", exp_noise, "Relative noise level");
  exp->add_option("--holdout", exp_holdout, "Held-out fraction");
  exp->add_option("--seed", exp_seed, "Master seed");
  exp->add_option("--max-iters", exp_iters, "ALS iteration cap");
  exp->add_option("--tol", exp_tol, "ALS stopping tolerance");
  exp->add_option("--restarts", exp_restarts, "Random restarts per solve");
  exp->add_option("--threads", exp_threads, "Parallel trials")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      const Dims dims = parse_dims(synth_dims);
      std::optional<SynthResult> made;
      try {
        made = synth_kruskal(synth_rank, dims, synth_noise, synth_seed);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const SynthResult& r = *made;
      const std::filesystem::path tensor_path = synth_out;
      const auto truth = truth_path_for(tensor_path);
      io::save_tensor(tensor_path, r.tensor);
      io::save_model(truth, r.truth);
      out << fmt::format("dims {} {} {} rank {} noise {} seed {}\n", dims[0], dims[1], dims[2],
                         synth_rank, io::format_real(synth_noise), synth_seed);
      out << "tensor " << tensor_path.string() << "\ntruth " << truth.string() << '\n';
      return kExitOk;
    }

    if (decompose->parsed()) {
      const DenseTensor3 t = io::load_tensor(dec_input);
      const AlsResult r = cp_als(t, dec_rank, dec_solver.resolve(out));
      out << fmt::format("rank {} relative_error {} iterations {} converged {}\n", dec_rank,
                         io::format_real(r.trace.final_error()), r.trace.iterations_used,
                         r.trace.converged ? "true" : "false");
      print_model_summary(out, r.model);
      if (!dec_out.empty()) io::save_model(dec_out, r.model);
      return kExitOk;
    }

    if (cc->parsed()) {
      if (cc_factors.empty() && cc_rank == 0) throw UsageError("corcondia needs --factors or --rank");
      const DenseTensor3 t = io::load_tensor(cc_input);
      KruskalModel m;
      if (!cc_factors.empty()) {
        m = io::load_model(cc_factors);
      } else {
        const AlsResult r = cp_als(t, cc_rank, cc_solver.resolve(out));
        m = r.model;
        out << fmt::format("relative_error {}\n", io::format_real(r.trace.final_error()));
        if (!cc_out.empty()) io::save_model(cc_out, m);
      }
      if (m.dims() != t.dims()) throw IoError("factor dimensions do not match the tensor");
      out << fmt::format("rank {} corcondia {}\n", m.rank(), io::format_real(corcondia(t, m)));
      return kExitOk;
    }

    if (scan_cmd->parsed()) {
      if (scan_min > scan_max) throw UsageError("--min-rank must not exceed --max-rank");
      const DenseTensor3 t = io::load_tensor(scan_input);
      const AlsOptions opts = scan_solver.resolve(out);
      std::optional<HoldoutMask> mask;
      if (scan_holdout) {
        try {
          mask = holdout_split(t.dims(), *scan_holdout, derive_seed(opts.seed, 0x4d41534b));
        } catch (const std::invalid_argument& e) {
          throw UsageError(std::string("--holdout: ") + e.what());
        }
        if (!scan_mask.empty()) io::save_mask(scan_mask, *mask);
      }
      const auto rows = scan(t, scan_min, scan_max, opts, mask, scan_threads);
      for (const auto& row : rows) {
        out << fmt::format("rank {} fit_error {} corcondia {} rmse_holdout {}{}\n", row.rank,
                           io::format_real(row.fit_error),
                           row.corcondia ? io::format_real(*row.corcondia) : "-",
                           row.rmse_holdout ? io::format_real(*row.rmse_holdout) : "-",
                           row.failed() ? " failed: " + row.failure : "");
      }
      std::vector<RankDecision> decisions;
      for (Method m : kAllMethods) {
        if (m == Method::AutoTenMv && !mask) {
          out << to_string(m) << " skipped (no --holdout)\n";
          continue;
        }
        try {
          decisions.push_back(select_rank(m, rows));
          out << to_string(m) << " chosen_rank=" << decisions.back().chosen_rank << '\n';
        } catch (const EstimationError& e) {
          out << to_string(m) << " failed: " << e.what() << '\n';
        }
      }
      if (!scan_csv.empty()) io::save_scan_csv(scan_csv, rows, decisions);
      return kExitOk;
    }

    if (exp->parsed()) {
      ExperimentConfig cfg;
      try {
        if (!exp_config.empty()) cfg = ExperimentConfig::load(exp_config);
        if (!exp_ranks.empty()) cfg.set("ranks", exp_ranks);
        const std::pair<const char*, const std::optional<std::string>*> inline_flags[] = {
            {"trials", &exp_trials},     {"margin", &exp_margin}, {"noise", &exp_noise},
            {"holdout", &exp_holdout},   {"seed", &exp_seed},     {"max_iters", &exp_iters},
            {"tol", &exp_tol},           {"restarts", &exp_restarts}};
        for (const auto& [key, value] : inline_flags) {
          if (*value) cfg.set(key, **value);
        }
        cfg.threads = exp_threads;
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      out << "seed=" << cfg.master_seed << '\n';
      const ExperimentReport rep = run_experiment(cfg);
      emit_report(rep, exp_out);

      out << fmt::format("{:<12}", "method");
      for (std::size_t r : cfg.rank_set) out << fmt::format(" {:>6}", fmt::format("R={}", r));
      out << fmt::format(" {:>7}\n", "overall");
      for (Method m : kAllMethods) {
        out << fmt::format("{:<12}", to_string(m));
        for (const auto& a : rep.accuracy) {
          if (a.method == m) out << fmt::format(" {:>6.2f}", a.accuracy);
        }
        out << fmt::format(" {:>7.3f}\n", rep.overall_accuracy(m));
      }
      if (rep.excluded_trials() > 0) {
        err << "warning: " << rep.excluded_trials()
            << " trial(s) excluded because every method failed\n";
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace autoten::cli
