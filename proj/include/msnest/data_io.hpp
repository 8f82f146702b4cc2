#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "msnest/model.hpp"

namespace msnest {

/// Per-line diagnostics for a rejected data file.
class DataError : public std::runtime_error {
 public:
  explicit DataError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Whitespace-separated columns: `x counts` or `x y yerr`. Blank lines and
/// `#` comments are skipped.
Dataset read_data(std::istream& in, DataKind kind);
Dataset read_data(const std::filesystem::path& path, DataKind kind);

void write_data(std::ostream& out, const Dataset& data);
void write_data(const std::filesystem::path& path, const Dataset& data);

/// Evenly spaced grid of n points on [low, high] (n == 1 gives low).
std::vector<double> linear_grid(double low, double high, std::size_t n);

/// Poisson counts or Gaussian draws (fixed yerr) around model_eval(truth, grid).
/// Throws InputError if a count intensity is negative.
Dataset simulate(const ModelSpec& spec, std::span<const double> truth, std::span<const double> grid,
                 DataKind kind, double yerr, Rng& rng);

/// Shortest text that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace msnest
