#pragma once

// JSON and CSV serialization. Numbers are written with 17 significant digits
// so that output is byte-stable and round-trips exactly.

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coalesce/bounds.hpp"
#include "coalesce/exact_oracle.hpp"
#include "coalesce/mass_vector.hpp"

namespace coalesce {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

inline Json to_json(std::span<const double> v) { return Json(std::vector<double>(v.begin(), v.end())); }
inline Json to_json(const MassVector& x) { return to_json(x.values()); }
inline Json to_json(const ComponentVector& v) { return to_json(v.values()); }

// {"outcomes": [[[masses...], prob], ...], "checksum": sum of probabilities}
inline Json to_json(const ExactDistribution& d) {
  Json outcomes = Json::array();
  for (const auto& [v, p] : d.outcomes) outcomes.push_back(Json::array({to_json(v), p}));
  return Json{{"outcomes", std::move(outcomes)}, {"checksum", d.probability_sum()}};
}

inline Json to_json(const BoundReport& r) {
  return Json{{"name", r.name},     {"lhs", r.lhs},     {"rhs", r.rhs},
              {"satisfied", r.satisfied}, {"slack", r.slack}, {"trials", r.trials},
              {"cases", r.cases},   {"seed", r.seed},   {"stream_id", r.stream_id}};
}

inline Json to_json(const std::vector<BoundReport>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) out.push_back(to_json(r));
  return out;
}

// Single column with a header.
inline void write_csv_column(std::ostream& out, std::span<const double> v, const std::string& header = "mass") {
  out << header << '\n';
  for (double a : v) out << format_double(a) << '\n';
}

// Rectangular table: CSV with a header row, or a JSON array of objects with
// the same keys in the same order.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  // Cells are preformatted strings; numeric cells are emitted unquoted in JSON.
  struct Cell {
    std::string text;
    bool numeric = true;
  };

  static Cell num(double v) { return {format_double(v), true}; }
  static Cell num(std::uint64_t v) { return {std::to_string(v), true}; }
  static Cell str(std::string s) { return {std::move(s), false}; }
  static Cell flag(bool b) { return {b ? "true" : "false", true}; }

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw UsageError("Table: row width does not match the header");
    rows_.push_back(std::move(row));
  }

  [[nodiscard]] std::size_t size() const { return rows_.size(); }

  void write_csv(std::ostream& out) const {
    for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
    out << '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_escape(row[c].text);
      out << '\n';
    }
  }

  void write_json(std::ostream& out) const {
    out << "[\n";
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      out << "  {";
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        out << (c ? ", " : "") << Json(columns_[c]).dump() << ": ";
        const auto& cell = rows_[r][c];
        out << (cell.numeric ? json_number(cell.text) : Json(cell.text).dump());
      }
      out << (r + 1 < rows_.size() ? "},\n" : "}\n");
    }
    out << "]\n";
  }

 private:
  static std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"') out += '"';
      out += ch;
    }
    return out + "\"";
  }

  // JSON has no inf/nan literals.
  static std::string json_number(const std::string& s) {
    if (s == "inf" || s == "-inf" || s == "nan" || s == "-nan") return "null";
    return s;
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

inline Table report_table(const std::vector<BoundReport>& rows) {
  Table t({"name", "lhs", "rhs", "satisfied", "slack", "trials", "cases", "seed", "stream_id"});
  for (const auto& r : rows)
    t.add_row({Table::str(r.name), Table::num(r.lhs), Table::num(r.rhs), Table::flag(r.satisfied),
               Table::num(r.slack), Table::num(static_cast<std::uint64_t>(r.trials)),
               Table::num(static_cast<std::uint64_t>(r.cases)), Table::num(r.seed), Table::num(r.stream_id)});
  return t;
}

}  // namespace coalesce
