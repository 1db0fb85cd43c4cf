#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>  // nlohmann/json, vendored

#include "anng/errors.hpp"

namespace anng {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Fixed-schema table; one row per sweep point.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
    for (std::size_t k = 0; k < columns_.size(); ++k) index_.emplace(columns_[k], k);
  }

  class Row {
   public:
    Row(const Table* table, std::size_t width) : table_(table), cells_(width) {}

    Row& set(const std::string& column, Cell value) {
      cells_.at(table_->column_index(column)) = std::move(value);
      return *this;
    }
    Row& set(const std::string& column, std::uint64_t value) { return set(column, Cell{static_cast<std::int64_t>(value)}); }
    Row& set(const std::string& column, int value) { return set(column, Cell{static_cast<std::int64_t>(value)}); }
    Row& set(const std::string& column, bool value) { return set(column, Cell{std::int64_t{value ? 1 : 0}}); }
    Row& set(const std::string& column, double value) { return set(column, Cell{value}); }
    Row& set(const std::string& column, const char* value) { return set(column, Cell{std::string(value)}); }
    Row& set(const std::string& column, std::string value) { return set(column, Cell{std::move(value)}); }

    const Cell& get(const std::string& column) const {
      const auto& c = cells_.at(table_->column_index(column));
      if (!c) throw InvariantViolation("report: column '" + column + "' unset");
      return *c;
    }
    double num(const std::string& column) const {
      const Cell& c = get(column);
      if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
      if (const auto* d = std::get_if<double>(&c)) return *d;
      throw InvariantViolation("report: column '" + column + "' is not numeric");
    }
    std::int64_t count(const std::string& column) const { return std::get<std::int64_t>(get(column)); }
    const std::string& text(const std::string& column) const { return std::get<std::string>(get(column)); }
    bool complete() const {
      for (const auto& c : cells_)
        if (!c) return false;
      return true;
    }
    const std::vector<std::optional<Cell>>& cells() const noexcept { return cells_; }

   private:
    friend class Table;
    const Table* table_;
    std::vector<std::optional<Cell>> cells_;
  };

  Row& add_row() {
    rows_.emplace_back(this, columns_.size());
    return rows_.back();
  }

  std::size_t column_index(const std::string& column) const {
    const auto it = index_.find(column);
    if (it == index_.end()) throw InvariantViolation("report: unknown column '" + column + "'");
    return it->second;
  }
  bool has_column(const std::string& column) const { return index_.count(column) != 0; }

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  Row& row(std::size_t k) { return rows_.at(k); }

  Table(const Table& other) : columns_(other.columns_), index_(other.index_), rows_(other.rows_) { rebind(); }
  Table& operator=(const Table& other) {
    columns_ = other.columns_;
    index_ = other.index_;
    rows_ = other.rows_;
    rebind();
    return *this;
  }
  Table(Table&& other) noexcept
      : columns_(std::move(other.columns_)), index_(std::move(other.index_)), rows_(std::move(other.rows_)) {
    rebind();
  }
  Table& operator=(Table&& other) noexcept {
    columns_ = std::move(other.columns_);
    index_ = std::move(other.index_);
    rows_ = std::move(other.rows_);
    rebind();
    return *this;
  }

 private:
  void rebind() {
    for (auto& r : rows_) r.table_ = this;
  }

  std::vector<std::string> columns_;
  std::map<std::string, std::size_t> index_;
  std::vector<Row> rows_;
};

namespace detail {

inline std::string csv_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", *d);
    return buf;
  }
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

inline nlohmann::json json_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return detail::csv_cell(c);
    return *d;
  }
  return std::get<std::string>(c);
}

}  // namespace detail

/// Aggregated results of one suite.
struct Report {
  std::string suite;
  Table table;
  /// pred_* column -> formula it was computed from.
  std::map<std::string, std::string> formulas;
  nlohmann::json calibration = nlohmann::json::object();
  nlohmann::json timings = nlohmann::json::object();
  nlohmann::json config = nlohmann::json::object();
};

inline std::string to_csv(const Table& table) {
  std::ostringstream os;
  const auto& cols = table.columns();
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
  for (const auto& row : table.rows()) {
    if (!row.complete()) throw InvariantViolation("report: incomplete row");
    const auto& cells = row.cells();
    for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << detail::csv_cell(*cells[k]);
    os << '\n';
  }
  return os.str();
}

inline nlohmann::json to_json(const Report& report) {
  nlohmann::json rows = nlohmann::json::array();
  const auto& cols = report.table.columns();
  for (const auto& row : report.table.rows()) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t k = 0; k < cols.size(); ++k) obj[cols[k]] = detail::json_cell(*row.cells()[k]);
    rows.push_back(std::move(obj));
  }
  nlohmann::json j;
  j["suite"] = report.suite;
  j["columns"] = cols;
  j["rows"] = std::move(rows);
  j["formulas"] = report.formulas;
  j["geometry_calibration"] = report.calibration;
  j["timings"] = report.timings;
  j["config"] = report.config;
  return j;
}

}  // namespace anng
