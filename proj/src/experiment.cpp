#include "autoten/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "autoten/cp_missing.hpp"
#include "autoten/errors.hpp"
#include "autoten/io.hpp"
#include "autoten/parallel.hpp"
#include "autoten/rng.hpp"
#include "autoten/synth.hpp"

namespace autoten {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("invalid value '" + text + "' for " + key);
  }
  return v;
}

/// "3,4,5" or an inclusive range "3..8".
std::vector<std::size_t> parse_ranks(const std::string& text) {
  std::vector<std::size_t> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = parse_number<std::size_t>("ranks", trim(text.substr(0, dots)));
    const auto hi = parse_number<std::size_t>("ranks", trim(text.substr(dots + 2)));
    if (lo > hi) throw std::invalid_argument("ranks range is empty: " + text);
    for (std::size_t r = lo; r <= hi; ++r) out.push_back(r);
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    out.push_back(parse_number<std::size_t>("ranks", trim(item)));
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

std::size_t method_slot(Method m) {
  return std::size_t(std::find(kAllMethods.begin(), kAllMethods.end(), m) - kAllMethods.begin());
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t true_rank, std::size_t trial,
                      std::uint64_t seed) {
  TrialRecord rec;
  rec.true_rank = true_rank;
  rec.trial = trial;
  rec.seed = seed;

  const Dims dims{true_rank, true_rank, true_rank};
  const SynthResult data = synth_kruskal(true_rank, dims, cfg.noise_sigma, derive_seed(seed, 0));
  const HoldoutMask mask = holdout_split(dims, cfg.holdout_fraction, derive_seed(seed, 1));
  AlsOptions als = cfg.als;
  als.seed = derive_seed(seed, 2);
  rec.scan = scan(data.tensor, 1, true_rank + cfg.scan_margin, als, mask);

  for (std::size_t m = 0; m < kAllMethods.size(); ++m) {
    try {
      rec.decisions[m] = select_rank(kAllMethods[m], rec.scan);
    } catch (const std::exception& e) {
      rec.errors[m] = e.what();
    }
  }
  for (std::size_t i = 1; i < rec.scan.size(); ++i) {
    if (rec.scan[i].fit_error > rec.scan[i - 1].fit_error + 1e-6) {
      rec.fit_increases.push_back(rec.scan[i].rank);
    }
  }
  return rec;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (rank_set.empty()) throw std::invalid_argument("rank_set must not be empty");
  if (trials_per_rank < 1) throw std::invalid_argument("trials must be at least 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("noise must be finite and non-negative");
  }
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  }
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  als.validate();
  for (std::size_t r : rank_set) {
    if (r < 1) throw std::invalid_argument("ranks must be at least 1");
    const double cells = double(r) * double(r) * double(r);
    const auto held = std::llround(holdout_fraction * cells);
    if (held < 1 || double(held) >= cells) {
      throw std::invalid_argument(fmt::format(
          "holdout fraction {} leaves an empty or full mask for rank {}", holdout_fraction, r));
    }
  }
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "ranks") {
    rank_set = parse_ranks(value);
  } else if (key == "trials") {
    trials_per_rank = parse_number<std::size_t>(key, value);
  } else if (key == "margin") {
    scan_margin = parse_number<std::size_t>(key, value);
  } else if (key == "noise") {
    noise_sigma = parse_number<double>(key, value);
  } else if (key == "holdout") {
    holdout_fraction = parse_number<double>(key, value);
  } else if (key == "seed") {
    master_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "max_iters") {
    als.max_iters = parse_number<std::size_t>(key, value);
  } else if (key == "tol") {
    als.tol = parse_number<double>(key, value);
  } else if (key == "restarts") {
    als.n_restarts = parse_number<std::size_t>(key, value);
  } else if (key == "threads") {
    threads = parse_number<std::size_t>(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

ExperimentConfig ExperimentConfig::parse(std::istream& is) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(fmt::format("config line {}: expected key=value", line_no));
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return parse(in);
}

std::string ExperimentConfig::to_text() const {
  std::string ranks;
  for (std::size_t r : rank_set) ranks += (ranks.empty() ? "" : ",") + std::to_string(r);
  return fmt::format(
      "ranks={}\ntrials={}\nmargin={}\nnoise={}\nholdout={}\nseed={}\nmax_iters={}\ntol={}\n"
      "restarts={}\n",
      ranks, trials_per_rank, scan_margin, io::format_real(noise_sigma),
      io::format_real(holdout_fraction), master_seed, als.max_iters, io::format_real(als.tol),
      als.n_restarts);
}

bool TrialRecord::all_failed() const {
  return std::none_of(decisions.begin(), decisions.end(),
                      [](const auto& d) { return d.has_value(); });
}

double ExperimentReport::overall_accuracy(Method m) const {
  const std::size_t slot = method_slot(m);
  std::size_t hits = 0;
  std::size_t counted = 0;
  for (const auto& t : trials) {
    if (t.all_failed()) continue;
    ++counted;
    if (t.decisions[slot] && t.decisions[slot]->chosen_rank == t.true_rank) ++hits;
  }
  return counted == 0 ? 0.0 : double(hits) / double(counted);
}

std::size_t ExperimentReport::excluded_trials() const {
  return std::size_t(
      std::count_if(trials.begin(), trials.end(), [](const auto& t) { return t.all_failed(); }));
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep;
  rep.config = cfg;

  struct Job {
    std::size_t true_rank;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (std::size_t r : cfg.rank_set)
    for (std::size_t t = 0; t < cfg.trials_per_rank; ++t) jobs.push_back({r, t});

  rep.trials.resize(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t n) {
    rep.trials[n] = run_trial(cfg, jobs[n].true_rank, jobs[n].trial, derive_seed(cfg.master_seed, n));
  });

  for (Method m : kAllMethods) {
    const std::size_t slot = method_slot(m);
    for (std::size_t r : cfg.rank_set) {
      MethodAccuracy acc{m, r, 0.0, 0};
      std::size_t hits = 0;
      for (const auto& t : rep.trials) {
        if (t.true_rank != r || t.all_failed()) continue;
        ++acc.n_trials;
        if (t.decisions[slot] && t.decisions[slot]->chosen_rank == r) ++hits;
      }
      acc.accuracy = acc.n_trials == 0 ? 0.0 : double(hits) / double(acc.n_trials);
      rep.accuracy.push_back(acc);
    }
  }
  return rep;
}

void emit_report(const ExperimentReport& rep, const std::filesystem::path& dir) {
  if (rep.trials.empty()) throw std::invalid_argument("emit_report: report has no trials");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  auto write = [&](const std::string& name, const std::string& body) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << body;
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
  };

  std::string acc = "method,true_rank,accuracy,n_trials\n";
  for (const auto& a : rep.accuracy) {
    acc += fmt::format("{},{},{},{}\n", to_string(a.method), a.true_rank,
                       io::format_real(a.accuracy), a.n_trials);
  }
  write("accuracy.csv", acc);

  std::string trials = "true_rank,trial,seed";
  for (Method m : kAllMethods) trials += fmt::format(",{}", to_string(m));
  trials += ",all_failed,fit_increases,errors\n";
  for (const auto& t : rep.trials) {
    trials += fmt::format("{},{},{}", t.true_rank, t.trial, t.seed);
    std::string errors;
    for (std::size_t m = 0; m < kAllMethods.size(); ++m) {
      trials += ',';
      if (t.decisions[m]) {
        trials += std::to_string(t.decisions[m]->chosen_rank);
      } else {
        errors += fmt::format("{}{}: {}", errors.empty() ? "" : "; ", to_string(kAllMethods[m]),
                              t.errors[m]);
      }
    }
    std::string increases;
    for (std::size_t r : t.fit_increases) increases += (increases.empty() ? "" : " ") + std::to_string(r);
    trials += fmt::format(",{},{},{}\n", t.all_failed() ? "true" : "false", increases,
                          csv_escape(errors));
  }
  write("trials.csv", trials);

  std::string scans =
      "true_rank,trial,rank,fit_error,corcondia,rmse_holdout,iterations,converged,"
      "label_autoten,label_autoten_rec,label_autoten_mv\n";
  for (const auto& t : rep.trials) {
    for (std::size_t i = 0; i < t.scan.size(); ++i) {
      const auto& row = t.scan[i];
      scans += fmt::format("{},{},{},{},{},{},{},{}", t.true_rank, t.trial, row.rank,
                           io::format_real(row.fit_error),
                           row.corcondia ? io::format_real(*row.corcondia) : "",
                           row.rmse_holdout ? io::format_real(*row.rmse_holdout) : "",
                           row.iterations, row.converged ? "true" : "false");
      for (std::size_t m = 0; m < 3; ++m) {
        scans += ',';
        if (t.decisions[m]) scans += to_string(t.decisions[m]->labels[i]);
      }
      scans += '\n';
    }
  }
  write("scans.csv", scans);

  std::string config = rep.config.to_text();
  config += "# holdout: one split per trial, RMSE over held-out cells\n";
  config += "# clustering features: oriented larger-is-better, z-scored per column\n";
  config += fmt::format("# trials excluded (every method failed): {}\n", rep.excluded_trials());
  write("config.txt", config);
}

}  // namespace autoten
