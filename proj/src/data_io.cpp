#include "msnest/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace msnest {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid data:";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

}  // namespace

DataError::DataError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Dataset read_data(std::istream& in, DataKind kind) {
  const std::size_t want = kind == DataKind::Counts ? 2 : 3;
  std::vector<double> x, y, yerr;
  std::vector<std::string> problems;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<double> cols;
    std::string token;
    bool bad_number = false;
    while (fields >> token) {
      double v = 0.0;
      const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) bad_number = true;
      cols.push_back(v);
    }
    if (cols.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (bad_number) {
      problems.push_back(where + "unparseable number");
      continue;
    }
    if (cols.size() != want) {
      problems.push_back(where + "expected " + std::to_string(want) + " columns, found " +
                         std::to_string(cols.size()));
      continue;
    }
    if (kind == DataKind::Counts && (cols[1] < 0.0 || std::floor(cols[1]) != cols[1])) {
      problems.push_back(where + "counts must be non-negative integers");
      continue;
    }
    if (kind == DataKind::GaussianErrors && !(cols[2] > 0.0)) {
      problems.push_back(where + "yerr <= 0");
      continue;
    }
    x.push_back(cols[0]);
    y.push_back(cols[1]);
    if (kind == DataKind::GaussianErrors) yerr.push_back(cols[2]);
  }
  if (problems.empty() && x.empty()) problems.push_back("no data rows");
  if (!problems.empty()) throw DataError(std::move(problems));
  return kind == DataKind::Counts ? Dataset::counts(std::move(x), std::move(y))
                                  : Dataset::gaussian(std::move(x), std::move(y), std::move(yerr));
}

Dataset read_data(const std::filesystem::path& path, DataKind kind) {
  std::ifstream in(path);
  if (!in) throw DataError({"cannot open data file " + path.string()});
  return read_data(in, kind);
}

void write_data(std::ostream& out, const Dataset& data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << format_double(data.x()[i]) << ' ' << format_double(data.y()[i]);
    if (data.kind() == DataKind::GaussianErrors) out << ' ' << format_double(data.yerr()[i]);
    out << '\n';
  }
}

void write_data(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write data file " + path.string());
  write_data(out, data);
}

std::vector<double> linear_grid(double low, double high, std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = n == 1 ? low : low + (high - low) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

Dataset simulate(const ModelSpec& spec, std::span<const double> truth, std::span<const double> grid,
                 DataKind kind, double yerr, Rng& rng) {
  const std::vector<double> mean = model_eval(spec, truth, grid);
  std::vector<double> x(grid.begin(), grid.end());
  std::vector<double> y(mean.size());
  if (kind == DataKind::Counts) {
    for (std::size_t i = 0; i < mean.size(); ++i) {
      if (mean[i] < 0.0) throw InputError("simulate: negative model intensity at x = " + format_double(x[i]));
      if (mean[i] > 0.0) {
        std::poisson_distribution<long long> draw(mean[i]);
        y[i] = static_cast<double>(draw(rng));
      }
    }
    return Dataset::counts(std::move(x), std::move(y));
  }
  if (!(yerr > 0.0)) throw InputError("simulate: yerr must be positive");
  std::normal_distribution<double> noise(0.0, yerr);
  for (std::size_t i = 0; i < mean.size(); ++i) y[i] = mean[i] + noise(rng);
  return Dataset::gaussian(std::move(x), std::move(y), std::vector<double>(mean.size(), yerr));
}

}  // namespace msnest
