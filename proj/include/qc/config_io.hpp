#ifndef QC_CONFIG_IO_HPP
#define QC_CONFIG_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qc/experiments.hpp"
#include "qc/models.hpp"

namespace qc {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream stream(s);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value);

template <>
inline int parse_number<int>(const std::string& key, const std::string& value) {
  size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not an integer: '" + value + "'");
  }
  if (pos != value.size())
    throw std::invalid_argument(key + ": not an integer: '" + value + "'");
  return v;
}

template <>
inline double parse_number<double>(const std::string& key,
                                   const std::string& value) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not a number: '" + value + "'");
  }
  if (pos != value.size())
    throw std::invalid_argument(key + ": not a number: '" + value + "'");
  return v;
}

inline std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace detail

/// Parses a key = value experiment configuration.  Lines starting with '#'
/// and blank lines are ignored.  Unknown keys and malformed values raise
/// errors naming the offending key; omitted keys keep their defaults.
inline ExperimentParams parse_config_text(const std::string& text) {
  ExperimentParams params;
  std::stringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key == "n_atoms") {
      params.n_atoms = detail::parse_number<int>(key, value);
    } else if (key == "cutoff_radius") {
      params.cutoff_radius = detail::parse_number<double>(key, value);
    } else if (key == "models") {
      params.models.clear();
      for (const std::string& name : detail::split_list(value)) {
        try {
          params.models.push_back(model_from_name(name));
        } catch (const std::exception&) {
          throw std::invalid_argument("models: unknown model '" + name + "'");
        }
      }
    } else if (key == "m_list") {
      params.m_list.clear();
      for (const std::string& item : detail::split_list(value))
        params.m_list.push_back(detail::parse_number<int>(key, item));
    } else if (key == "dof_list") {
      params.dof_list.clear();
      for (const std::string& item : detail::split_list(value))
        params.dof_list.push_back(detail::parse_number<int>(key, item));
    } else if (key == "residual_tolerance") {
      params.residual_tolerance = detail::parse_number<double>(key, value);
    } else if (key == "seed") {
      try {
        size_t pos = 0;
        params.seed = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw std::invalid_argument("seed: not a non-negative integer: '" +
                                    value + "'");
      }
    } else if (key == "output_dir") {
      params.output_dir = value;
    } else {
      throw std::invalid_argument("unknown configuration key '" + key + "'");
    }
  }
  params.validate();
  return params;
}

inline ExperimentParams load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

/// CSV serialization: fixed column order, '.' decimal separator, 17
/// significant digits, '\n' line endings.  Identical tables serialize to
/// identical bytes.
inline std::string to_csv(const StudyTable& table) {
  std::string out = "model,param,dof,m,error,iterations\n";
  for (const StudyRow& row : table.rows) {
    out += row.model;
    out += ',';
    out += detail::format_double(row.param);
    out += ',';
    out += std::to_string(row.dof);
    out += ',';
    out += std::to_string(row.m);
    out += ',';
    out += detail::format_double(row.error);
    out += ',';
    out += std::to_string(row.iterations);
    out += '\n';
  }
  return out;
}

inline nlohmann::json to_json(const StudyTable& table) {
  nlohmann::json meta;
  meta["study"] = table.meta.study;
  meta["n_atoms"] = table.meta.n_atoms;
  meta["cutoff_radius"] = table.meta.cutoff_radius;
  meta["neighbor_range"] = table.meta.neighbor_range;
  meta["models"] = table.meta.models;
  meta["m_list"] = table.meta.m_list;
  meta["dof_list"] = table.meta.dof_list;
  meta["residual_tolerance"] = table.meta.residual_tolerance;
  meta["seed"] = table.meta.seed;
  meta["output_dir"] = table.meta.output_dir;
  meta["reference_iterations"] = table.meta.reference_iterations;

  nlohmann::json rows = nlohmann::json::array();
  for (const StudyRow& row : table.rows) {
    nlohmann::json r;
    r["model"] = row.model;
    r["param"] = row.param;
    r["dof"] = row.dof;
    r["m"] = row.m;
    r["error"] = row.error;
    r["iterations"] = row.iterations;
    r["converged"] = row.converged;
    rows.push_back(r);
  }
  return nlohmann::json{{"metadata", meta}, {"rows", rows}};
}

enum class ReportFormat { Csv, Json };

inline void write_report(const StudyTable& table, ReportFormat format,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report file: " + path);
  if (format == ReportFormat::Csv) {
    out << to_csv(table);
  } else {
    out << to_json(table).dump(2) << '\n';
  }
  if (!out) throw std::runtime_error("failed while writing report: " + path);
}

}  // namespace qc

#endif  // QC_CONFIG_IO_HPP
