#include "autoten/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>

#include <fmt/format.h>

#include "autoten/errors.hpp"

namespace autoten::io {

namespace {

class LineReader {
public:
  explicit LineReader(std::istream& is) : is_(is) {}

  /// Next non-blank, non-comment line split on whitespace; false at EOF.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      tokens.clear();
      std::istringstream ss(line);
      for (std::string tok; ss >> tok;) tokens.push_back(tok);
      return true;
    }
    return false;
  }

  std::vector<std::string> require(std::string_view what) {
    std::vector<std::string> tokens;
    if (!next(tokens)) fail(fmt::format("unexpected end of input, expected {}", what));
    return tokens;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw IoError(fmt::format("line {}: {}", line_no_, msg));
  }

  std::size_t to_index(const std::string& s) const {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("invalid integer '" + s + "'");
    return v;
  }

  double to_real(const std::string& s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail("invalid real '" + s + "'");
    }
    return v;
  }

private:
  std::istream& is_;
  std::size_t line_no_ = 0;
};

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

template <typename T, typename Reader>
T load_with(const std::filesystem::path& path, Reader read) {
  auto in = open_in(path);
  try {
    return read(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Dims read_dims(LineReader& r, const std::vector<std::string>& tok, std::size_t first) {
  Dims d{};
  for (std::size_t n = 0; n < 3; ++n) {
    d[n] = r.to_index(tok[first + n]);
    if (d[n] == 0) r.fail("dimensions must be positive");
  }
  return d;
}

}  // namespace

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

void write_tensor(std::ostream& os, const DenseTensor3& t) {
  const auto [I, J, K] = t.dims();
  os << fmt::format("dims {} {} {}\n", I, J, K);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t i = 0; i < I; ++i) {
        const double v = t(i, j, k);
        if (v != 0.0) os << fmt::format("{} {} {} {}\n", i, j, k, format_real(v));
      }
}

DenseTensor3 read_tensor(std::istream& is) {
  LineReader r(is);
  auto head = r.require("'dims I J K'");
  if (head.size() != 4 || head[0] != "dims") r.fail("expected 'dims I J K'");
  DenseTensor3 t(read_dims(r, head, 1));
  const auto [I, J, K] = t.dims();
  std::set<std::size_t> seen;
  for (std::vector<std::string> tok; r.next(tok);) {
    if (tok.size() != 4) r.fail("expected 'i j k value'");
    const std::size_t i = r.to_index(tok[0]);
    const std::size_t j = r.to_index(tok[1]);
    const std::size_t k = r.to_index(tok[2]);
    if (i >= I || j >= J || k >= K) r.fail("index out of bounds");
    if (!seen.insert(t.index(i, j, k)).second) r.fail("duplicate entry");
    t(i, j, k) = r.to_real(tok[3]);
  }
  return t;
}

void save_tensor(const std::filesystem::path& path, const DenseTensor3& t) {
  auto out = open_out(path);
  write_tensor(out, t);
  finish(out, path);
}

DenseTensor3 load_tensor(const std::filesystem::path& path) {
  return load_with<DenseTensor3>(path, [](std::istream& is) { return read_tensor(is); });
}

void write_model(std::ostream& os, const KruskalModel& m) {
  m.validate();
  os << "rank " << m.rank() << "\nlambda";
  for (Eigen::Index r = 0; r < m.weights.size(); ++r) os << ' ' << format_real(m.weights(r));
  os << '\n';
  constexpr std::string_view names[] = {"A", "B", "C"};
  for (int n = 0; n < 3; ++n) {
    os << names[n] << '\n';
    const Matrix& f = m.factors[n];
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index r = 0; r < f.cols(); ++r) {
        if (r > 0) os << ' ';
        os << format_real(f(i, r));
      }
      os << '\n';
    }
  }
}

KruskalModel read_model(std::istream& is) {
  LineReader r(is);
  auto head = r.require("'rank R'");
  if (head.size() != 2 || head[0] != "rank") r.fail("expected 'rank R'");
  const std::size_t rank = r.to_index(head[1]);
  if (rank == 0) r.fail("rank must be positive");

  auto lambda = r.require("'lambda ...'");
  if (lambda.size() != rank + 1 || lambda[0] != "lambda") {
    r.fail(fmt::format("expected 'lambda' followed by {} values", rank));
  }
  KruskalModel m;
  m.weights.resize(Eigen::Index(rank));
  for (std::size_t c = 0; c < rank; ++c) m.weights(Eigen::Index(c)) = r.to_real(lambda[c + 1]);

  constexpr std::string_view names[] = {"A", "B", "C"};
  std::vector<std::string> tok = r.require("factor block 'A'");
  for (int n = 0; n < 3; ++n) {
    if (tok.size() != 1 || tok[0] != names[n]) r.fail(fmt::format("expected block '{}'", names[n]));
    std::vector<std::vector<double>> rows;
    bool more = false;
    while ((more = r.next(tok))) {
      if (tok.size() == 1 && n < 2 && tok[0] == names[n + 1]) break;
      if (tok.size() != rank) r.fail(fmt::format("factor row must have {} values", rank));
      auto& row = rows.emplace_back();
      for (const auto& s : tok) row.push_back(r.to_real(s));
    }
    if (rows.empty()) r.fail(fmt::format("factor block '{}' is empty", names[n]));
    Matrix f(Eigen::Index(rows.size()), Eigen::Index(rank));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < rank; ++c) f(Eigen::Index(i), Eigen::Index(c)) = rows[i][c];
    m.factors[n] = std::move(f);
    if (n < 2 && !more) r.fail(fmt::format("missing factor block '{}'", names[n + 1]));
  }
  return m;
}

void save_model(const std::filesystem::path& path, const KruskalModel& m) {
  auto out = open_out(path);
  write_model(out, m);
  finish(out, path);
}

KruskalModel load_model(const std::filesystem::path& path) {
  return load_with<KruskalModel>(path, [](std::istream& is) { return read_model(is); });
}

void write_mask(std::ostream& os, const HoldoutMask& mask) {
  const auto [I, J, K] = mask.dims();
  os << fmt::format("mask {} {} {} {}\n", I, J, K, mask.size());
  for (const auto& [i, j, k] : mask.triples()) os << fmt::format("{} {} {}\n", i, j, k);
}

HoldoutMask read_mask(std::istream& is) {
  LineReader r(is);
  auto head = r.require("'mask I J K n'");
  if (head.size() != 5 || head[0] != "mask") r.fail("expected 'mask I J K n'");
  const Dims dims = read_dims(r, head, 1);
  const std::size_t n = r.to_index(head[4]);
  std::vector<Index3> triples;
  triples.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    auto tok = r.require("'i j k'");
    if (tok.size() != 3) r.fail("expected 'i j k'");
    triples.push_back({r.to_index(tok[0]), r.to_index(tok[1]), r.to_index(tok[2])});
  }
  std::vector<std::string> extra;
  if (r.next(extra)) r.fail("more mask entries than declared");
  return HoldoutMask::from_triples(dims, triples);
}

void save_mask(const std::filesystem::path& path, const HoldoutMask& mask) {
  auto out = open_out(path);
  write_mask(out, mask);
  finish(out, path);
}

HoldoutMask load_mask(const std::filesystem::path& path) {
  return load_with<HoldoutMask>(path, [](std::istream& is) { return read_mask(is); });
}

void write_scan_csv(std::ostream& os, const std::vector<RankScanRow>& rows,
                    const std::vector<RankDecision>& decisions) {
  os << "rank,fit_error,corcondia,rmse_holdout,iterations,converged\n";
  for (const auto& row : rows) {
    os << row.rank << ',' << format_real(row.fit_error) << ','
       << (row.corcondia ? format_real(*row.corcondia) : "") << ','
       << (row.rmse_holdout ? format_real(*row.rmse_holdout) : "") << ',' << row.iterations << ','
       << (row.converged ? "true" : "false") << '\n';
  }
  for (const auto& d : decisions) {
    os << "# method=" << to_string(d.method) << " chosen_rank=" << d.chosen_rank << '\n';
  }
}

void save_scan_csv(const std::filesystem::path& path, const std::vector<RankScanRow>& rows,
                   const std::vector<RankDecision>& decisions) {
  auto out = open_out(path);
  write_scan_csv(out, rows, decisions);
  finish(out, path);
}

}  // namespace autoten::io
