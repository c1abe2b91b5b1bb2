#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "collapselab/errors.hpp"

namespace collapselab {

// Floats carry 17 significant digits so metric files round-trip exactly.
inline std::string csv_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& columns)
      : out_(path, std::ios::binary | std::ios::trunc), n_columns_(columns.size()) {
    if (!out_) throw ConfigError("cannot open CSV for writing: " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ",";
      out_ << columns[i];
    }
    out_ << "\n";
  }

  class Row {
   public:
    explicit Row(CsvWriter& w) : writer_(w) {}
    ~Row() {
      writer_.out_ << "\n";
      if (writer_.fields_in_row_ != writer_.n_columns_)
        std::fprintf(stderr, "CsvWriter: row width mismatch\n");
      writer_.fields_in_row_ = 0;
    }
    Row& add(double v) { return raw(csv_double(v)); }
    Row& add(std::size_t v) { return raw(std::to_string(v)); }
    Row& add(int v) { return raw(std::to_string(v)); }
    Row& add(bool v) { return raw(v ? "1" : "0"); }
    Row& add(const std::string& v) { return raw(v); }

   private:
    Row& raw(const std::string& field) {
      if (writer_.fields_in_row_) writer_.out_ << ",";
      writer_.out_ << field;
      ++writer_.fields_in_row_;
      return *this;
    }
    CsvWriter& writer_;
  };

  Row row() { return Row(*this); }

 private:
  friend class Row;
  std::ofstream out_;
  std::size_t n_columns_;
  std::size_t fields_in_row_ = 0;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw ConfigError("CSV has no column '" + name + "'");
  }
};

// Minimal reader for this project's own files (no quoting, no embedded
// commas).
inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open CSV: " + path.string());
  CsvTable table;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (header) {
      table.columns = std::move(fields);
      header = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

}  // namespace collapselab
