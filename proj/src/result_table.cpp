#include "dualtri/result_table.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "dualtri/errors.hpp"

namespace dualtri {

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value == 0.0 ? 0.0 : value);
  return buffer;
}

void ResultTable::add_row(ResultRow row) {
  if (row.values.size() != columns_.size()) {
    throw Error(ErrorCode::InvalidParameter,
                "row has " + std::to_string(row.values.size()) + " values, header has " +
                    std::to_string(columns_.size()));
  }
  for (const auto& v : row.values) {
    if (v && !std::isfinite(*v)) {
      throw Error(ErrorCode::InvalidParameter, "non-finite value in result row");
    }
  }
  rows_.push_back(std::move(row));
}

void ResultTable::add_metadata(std::string key, std::string value) {
  metadata_.emplace_back(std::move(key), std::move(value));
}

std::size_t ResultTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) return i;
  }
  throw Error(ErrorCode::InvalidParameter, "no column named " + name);
}

std::vector<double> ResultTable::ok_column(const std::string& name) const {
  const std::size_t idx = column(name);
  std::vector<double> out;
  for (const ResultRow& row : rows_) {
    if (row.status == "ok" && row.values[idx]) out.push_back(*row.values[idx]);
  }
  return out;
}

std::size_t ResultTable::count_status(const std::string& status) const {
  std::size_t n = 0;
  for (const ResultRow& row : rows_) n += row.status == status ? 1 : 0;
  return n;
}

void ResultTable::write_csv(std::ostream& out) const {
  for (const auto& [key, value] : metadata_) out << "# " << key << ": " << value << '\n';
  for (const std::string& name : columns_) out << name << ',';
  out << "status\n";
  for (const ResultRow& row : rows_) {
    for (const auto& v : row.values) {
      if (v) out << format_number(*v);
      out << ',';
    }
    out << row.status << '\n';
  }
}

void ResultTable::write_json(std::ostream& out) const {
  nlohmann::ordered_json doc;
  doc["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : metadata_) doc["metadata"][key] = value;
  doc["columns"] = columns_;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const ResultRow& row : rows_) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (row.values[i]) {
        r[columns_[i]] = *row.values[i];
      } else {
        r[columns_[i]] = nullptr;
      }
    }
    r["status"] = row.status;
    doc["rows"].push_back(std::move(r));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace dualtri
