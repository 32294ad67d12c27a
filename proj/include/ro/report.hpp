#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ro::report {

inline constexpr std::string_view kToolVersion = "1.0.0";

// Everything needed to rerun a command. Rendered as '#'-prefixed lines at the top of every CSV.
struct Manifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> params;  // in command-line order
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  std::string header() const;
};

enum class Provenance { input, measured, formula, exact, monte_carlo, fit, published, derived };
std::string_view provenance_name(Provenance p);

struct Column {
  std::string name;
  Provenance provenance;
};

// Fixed-notation formatting with `digits` decimals; NaN renders as "nan".
std::string num(double v, int digits = 6);
std::string csv_escape(std::string_view cell);

class Table {
 public:
  explicit Table(std::vector<Column> cols) : cols_(std::move(cols)) {}
  void add_row(std::vector<std::string> cells);  // throws std::invalid_argument on width mismatch
  std::size_t rows() const { return rows_.size(); }
  // Header row uses "name[provenance]".
  std::string csv(const Manifest& m) const;

 private:
  std::vector<Column> cols_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace ro::report
