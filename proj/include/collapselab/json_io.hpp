#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "collapselab/categorical.hpp"
#include "collapselab/errors.hpp"
#include "collapselab/joint_table.hpp"
#include "collapselab/neurosym/program_pool.hpp"

namespace collapselab {

using Json = nlohmann::json;

// Scientific configs fail loud: a key we do not recognize is an error, not
// a silent no-op.
inline void check_keys(const Json& node, std::initializer_list<const char*> allowed,
                       const std::string& context) {
  if (!node.is_object())
    throw ConfigError(context + ": expected a JSON object");
  for (const auto& [key, value] : node.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

// ---- Categorical <-> {"labels": [...], "probs": [...]} ----

inline Json to_json(const Categorical& dist) {
  Json j;
  j["labels"] = dist.labels();
  j["probs"] = dist.probs();
  return j;
}

inline Categorical categorical_from_json(const Json& j,
                                         const std::string& context) {
  check_keys(j, {"labels", "probs"}, context);
  if (!j.contains("labels") || !j.contains("probs"))
    throw ConfigError(context + ": needs 'labels' and 'probs'");
  try {
    std::vector<std::string> labels =
        j.at("labels").get<std::vector<std::string>>();
    std::vector<double> probs = j.at("probs").get<std::vector<double>>();
    return Categorical(make_support(std::move(labels)), std::move(probs));
  } catch (const Json::exception& e) {
    throw ConfigError(context + ": malformed distribution: " + e.what());
  }
}

// ---- JointTable <-> {"row_labels", "col_labels", "joint"} ----

inline Json to_json(const JointTable& table) {
  Json j;
  j["row_labels"] = *table.row_labels();
  j["col_labels"] = *table.col_labels();
  Json rows = Json::array();
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < table.n_cols(); ++c) row.push_back(table.at(r, c));
    rows.push_back(std::move(row));
  }
  j["joint"] = std::move(rows);
  return j;
}

inline JointTable joint_table_from_json(const Json& j,
                                        const std::string& context) {
  check_keys(j, {"row_labels", "col_labels", "joint"}, context);
  if (!j.contains("row_labels") || !j.contains("col_labels") ||
      !j.contains("joint"))
    throw ConfigError(context + ": needs 'row_labels', 'col_labels', 'joint'");
  try {
    std::vector<std::string> rows =
        j.at("row_labels").get<std::vector<std::string>>();
    std::vector<std::string> cols =
        j.at("col_labels").get<std::vector<std::string>>();
    std::vector<double> joint;
    joint.reserve(rows.size() * cols.size());
    for (const Json& row : j.at("joint")) {
      if (!row.is_array() || row.size() != cols.size())
        throw ConfigError(context + ": joint rows must match col_labels");
      for (const Json& v : row) joint.push_back(v.get<double>());
    }
    if (joint.size() != rows.size() * cols.size())
      throw ConfigError(context + ": joint must have one row per row_label");
    return JointTable(make_support(std::move(rows)), make_support(std::move(cols)),
                      std::move(joint));
  } catch (const Json::exception& e) {
    throw ConfigError(context + ": malformed joint table: " + e.what());
  }
}

// ---- ProgramPool <-> {"programs": [ ... ]} ----

inline Json to_json(const Program& program) {
  Json j;
  j["name"] = program.name;
  j["machine_index"] = program.machine_index;
  j["space_id"] = program.space_id;
  j["labels"] = program.output_dist.labels();
  j["probs"] = program.output_dist.probs();
  j["complexity_bits"] = program.complexity_bits;
  return j;
}

inline Json to_json(const ProgramPool& pool) {
  Json j;
  Json programs = Json::array();
  for (const Program& p : pool.programs) programs.push_back(to_json(p));
  j["programs"] = std::move(programs);
  return j;
}

inline ProgramPool pool_from_json(const Json& j, const std::string& context) {
  check_keys(j, {"programs"}, context);
  if (!j.contains("programs") || !j.at("programs").is_array())
    throw ConfigError(context + ": needs a 'programs' array");
  ProgramPool pool;
  std::size_t i = 0;
  for (const Json& pj : j.at("programs")) {
    const std::string pcontext = context + ".programs[" + std::to_string(i) + "]";
    check_keys(pj, {"name", "machine_index", "space_id", "labels", "probs",
                    "complexity_bits"},
               pcontext);
    try {
      std::vector<std::string> labels =
          pj.at("labels").get<std::vector<std::string>>();
      std::vector<double> probs = pj.at("probs").get<std::vector<double>>();
      pool.programs.push_back(Program{
          pj.value("name", "program" + std::to_string(i)),
          pj.value("machine_index", static_cast<std::int64_t>(-1)),
          pj.value("space_id", std::string()),
          Categorical(make_support(std::move(labels)), std::move(probs)),
          pj.at("complexity_bits").get<double>()});
    } catch (const Json::exception& e) {
      throw ConfigError(pcontext + ": malformed program: " + e.what());
    }
    ++i;
  }
  pool.validate();
  return pool;
}

// ---- sample data files: {"draws": ["label", ...]} ----

inline SampleSet draws_from_json(const Json& j, const std::string& context) {
  check_keys(j, {"draws"}, context);
  if (!j.contains("draws") || !j.at("draws").is_array() || j.at("draws").empty())
    throw ConfigError(context + ": needs a non-empty 'draws' array");
  std::vector<std::string> draws;
  try {
    draws = j.at("draws").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw ConfigError(context + ": malformed draws: " + e.what());
  }
  // distinct labels in first-appearance order become the sample's support
  std::vector<std::string> labels;
  for (const std::string& d : draws)
    if (std::find(labels.begin(), labels.end(), d) == labels.end())
      labels.push_back(d);
  SampleSet set;
  set.support = make_support(labels);
  for (const std::string& d : draws)
    set.draws.push_back(static_cast<std::uint32_t>(
        std::find(labels.begin(), labels.end(), d) - labels.begin()));
  return set;
}

}  // namespace collapselab
