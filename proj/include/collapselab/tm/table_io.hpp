#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "collapselab/errors.hpp"
#include "collapselab/tm/census.hpp"

namespace collapselab {

// FNV-1a 64-bit, used as the census file integrity check.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return std::string(buf);
}

// File layout (one table per file):
//   ctm-table v1
//   n_states,n_symbols,budget,formalism,total,halted
//   <output>,<count>        rows sorted by count desc, then output asc
//   ...
//   checksum,fnv1a64:<16 hex digits over all preceding bytes>
inline constexpr const char* kTableHeader = "ctm-table v1";

inline std::string serialize_table(const OutputFrequencyTable& table) {
  std::vector<std::pair<std::string, std::uint64_t>> rows(
      table.counts.begin(), table.counts.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::ostringstream out;
  out << kTableHeader << "\n";
  out << table.space_id.n_states << "," << table.space_id.n_symbols << ","
      << table.space_id.budget << "," << table.space_id.formalism << ","
      << table.total_machines << "," << table.halted_machines << "\n";
  for (const auto& [output, count] : rows)
    out << output << "," << count << "\n";
  std::string body = out.str();
  body += "checksum,fnv1a64:" + hex64(fnv1a64(body)) + "\n";
  return body;
}

inline void persist_table(const OutputFrequencyTable& table,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IntegrityError("persist_table: cannot open " + path.string());
  out << serialize_table(table);
  if (!out) throw IntegrityError("persist_table: write failed: " + path.string());
}

inline OutputFrequencyTable parse_table(const std::string& bytes,
                                        const std::string& origin) {
  const std::size_t checksum_pos = bytes.rfind("checksum,fnv1a64:");
  if (checksum_pos == std::string::npos)
    throw IntegrityError("table " + origin + ": missing checksum line");
  const std::string body = bytes.substr(0, checksum_pos);
  const std::string checksum_line = bytes.substr(checksum_pos);
  const std::string expected = "checksum,fnv1a64:" + hex64(fnv1a64(body)) + "\n";
  if (checksum_line != expected)
    throw IntegrityError("table " + origin + ": checksum mismatch");

  std::istringstream in(body);
  std::string line;
  if (!std::getline(in, line) || line != kTableHeader)
    throw IntegrityError("table " + origin + ": unsupported format version");
  if (!std::getline(in, line))
    throw IntegrityError("table " + origin + ": missing metadata line");

  OutputFrequencyTable table;
  {
    std::istringstream meta(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(meta, field, ',')) fields.push_back(field);
    // the formalism tag may itself contain '-' but never ','
    if (fields.size() != 6)
      throw IntegrityError("table " + origin + ": malformed metadata line");
    try {
      table.space_id.n_states = std::stoi(fields[0]);
      table.space_id.n_symbols = std::stoi(fields[1]);
      table.space_id.budget = std::stoull(fields[2]);
      table.space_id.formalism = fields[3];
      table.total_machines = std::stoull(fields[4]);
      table.halted_machines = std::stoull(fields[5]);
    } catch (const std::exception&) {
      throw IntegrityError("table " + origin + ": malformed metadata value");
    }
  }

  std::uint64_t sum = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0)
      throw IntegrityError("table " + origin + ": malformed row '" + line + "'");
    const std::string output = line.substr(0, comma);
    std::uint64_t count = 0;
    try {
      count = std::stoull(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw IntegrityError("table " + origin + ": malformed count in '" + line +
                           "'");
    }
    if (!table.counts.emplace(output, count).second)
      throw IntegrityError("table " + origin + ": duplicate output row");
    sum += count;
  }
  if (sum != table.halted_machines ||
      table.halted_machines > table.total_machines)
    throw IntegrityError("table " + origin + ": count totals inconsistent");
  return table;
}

inline OutputFrequencyTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("load_table: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str(), path.string());
}

}  // namespace collapselab
