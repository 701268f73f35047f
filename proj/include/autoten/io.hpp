#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "autoten/cp_missing.hpp"
#include "autoten/rank_select.hpp"
#include "autoten/tensor.hpp"

namespace autoten::io {

// Text formats. Lines starting with '#' are comments wherever a reader
// accepts free-form input. Reals are written with 17 significant digits so a
// write/read cycle is exact.
//
// tensor:  "dims I J K" then "i j k v" per nonzero entry, layout order
// model:   "rank R", "lambda v1 .. vR", then blocks "A", "B", "C" of rows
// mask:    "mask I J K n" then n lines "i j k"

std::string format_real(double v);

void write_tensor(std::ostream& os, const DenseTensor3& t);
DenseTensor3 read_tensor(std::istream& is);
void save_tensor(const std::filesystem::path& path, const DenseTensor3& t);
DenseTensor3 load_tensor(const std::filesystem::path& path);

void write_model(std::ostream& os, const KruskalModel& m);
KruskalModel read_model(std::istream& is);
void save_model(const std::filesystem::path& path, const KruskalModel& m);
KruskalModel load_model(const std::filesystem::path& path);

void write_mask(std::ostream& os, const HoldoutMask& mask);
HoldoutMask read_mask(std::istream& is);
void save_mask(const std::filesystem::path& path, const HoldoutMask& mask);
HoldoutMask load_mask(const std::filesystem::path& path);

/// Header `rank,fit_error,corcondia,rmse_holdout,iterations,converged`, one
/// line per row with absent values left empty, then one
/// `# method=<NAME> chosen_rank=<R>` comment per decision.
void write_scan_csv(std::ostream& os, const std::vector<RankScanRow>& rows,
                    const std::vector<RankDecision>& decisions);
void save_scan_csv(const std::filesystem::path& path, const std::vector<RankScanRow>& rows,
                   const std::vector<RankDecision>& decisions);

}  // namespace autoten::io
