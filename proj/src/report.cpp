#include "ro/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace ro::report {

std::string Manifest::header() const {
  std::ostringstream os;
  os << "# tool: rollout " << kToolVersion << '\n';
  os << "# subcommand: " << subcommand << '\n';
  for (const auto& [k, v] : params) os << "# param " << k << ": " << v << '\n';
  if (seed) os << "# seed: " << *seed << '\n';
  for (const auto& o : outputs) os << "# output: " << o << '\n';
  return os.str();
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::input: return "input";
    case Provenance::measured: return "measured";
    case Provenance::formula: return "formula";
    case Provenance::exact: return "exact";
    case Provenance::monte_carlo: return "mc";
    case Provenance::fit: return "fit";
    case Provenance::published: return "published";
    case Provenance::derived: return "derived";
  }
  return "unknown";
}

std::string num(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) s.erase(0, s[0] == '-' ? 1 : 0);
  return s;
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != cols_.size())
    throw std::invalid_argument("report: row has " + std::to_string(cells.size()) + " cells, table has " +
                                std::to_string(cols_.size()) + " columns");
  rows_.push_back(std::move(cells));
}

std::string Table::csv(const Manifest& m) const {
  std::string out = m.header();
  for (std::size_t i = 0; i < cols_.size(); ++i) {
    out += i ? "," : "";
    out += csv_escape(cols_[i].name + "[" + std::string(provenance_name(cols_[i].provenance)) + "]");
  }
  out += '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out += i ? "," : "";
      out += csv_escape(r[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ro::report
