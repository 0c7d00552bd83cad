#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace dualtri {

inline constexpr const char* kToolVersion = "0.1.0";

/// Numeric cells plus a status string per row. Empty cells mark values that do
/// not exist for that row (infeasible targets); they are never written as NaN.
struct ResultRow {
  std::vector<std::optional<double>> values;
  std::string status = "ok";
};

class ResultTable {
 public:
  explicit ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<ResultRow>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return metadata_; }

  /// Throws Error{InvalidParameter} if the row width differs from the header or
  /// a value is not finite.
  void add_row(ResultRow row);
  void add_metadata(std::string key, std::string value);

  /// Index of a column; throws Error{InvalidParameter} if absent.
  std::size_t column(const std::string& name) const;

  /// Column values of rows with status "ok".
  std::vector<double> ok_column(const std::string& name) const;

  std::size_t count_status(const std::string& status) const;

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;

 private:
  std::vector<std::string> columns_;
  std::vector<ResultRow> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

/// Shortest round-trip form used in every emitted table: 17 significant digits.
std::string format_number(double value);

}  // namespace dualtri
