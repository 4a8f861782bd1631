#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kaqgeom/kaqgeom.hpp"

namespace kaqcli {

using nlohmann::json;

/// Raised for bad user input; maps to exit code 2.
struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Raised when a file cannot be read or written; maps to exit code 4.
struct FileError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

inline std::string sci(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

inline json vector_json(const kaqgeom::Vector & v)
{
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json matrix_json(const kaqgeom::Matrix & m)
{
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
  return rows;
}

inline json record_json(const kaqgeom::CriticalPointRecord & r)
{
  json j{{"family", kaqgeom::to_string(r.family)},
         {"a", r.a},
         {"t", r.t},
         {"s", r.s},
         {"gamma", r.gamma},
         {"lambda", r.lambda},
         {"residual", r.residual},
         {"threshold", r.tol},
         {"kind", r.critical ? "critical" : "parameterization_only"},
         {"critical", r.critical},
         {"trivial", r.trivial},
         {"jensen", r.jensen},
         {"gradient_norm", r.gradient_norm},
         {"note", r.note}};
  j["ad_r0_invariant"] = r.ad_r0_invariant ? json(*r.ad_r0_invariant) : json(nullptr);
  j["kaq"] = r.kaq ? json(*r.kaq) : json(nullptr);
  return j;
}

inline void write_text(const std::string & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw FileError("failed writing '" + path + "'");
}

/// "k=v,k2=v2" into a map; values must parse as doubles.
inline std::map<std::string, double> parse_weights(const std::string & text)
{
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("weight '" + item + "' is not of the form key=value");
    try {
      std::size_t used = 0;
      const std::string value = item.substr(eq + 1);
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      out[item.substr(0, eq)] = v;
    } catch (const std::logic_error &) {
      throw UsageError("weight '" + item + "' has a non-numeric value");
    }
  }
  return out;
}

/// "lo:hi" into a pair with lo < hi.
inline std::pair<double, double> parse_range(const std::string & text)
{
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("range '" + text + "' is not of the form lo:hi");
  try {
    const double lo = std::stod(text.substr(0, colon));
    const double hi = std::stod(text.substr(colon + 1));
    if (!(lo < hi)) throw UsageError("range '" + text + "' is empty");
    return {lo, hi};
  } catch (const std::logic_error &) {
    throw UsageError("range '" + text + "' is not numeric");
  }
}

/// Flat key=value lines ('#' comments, blank lines ignored) turned into
/// "--key value" tokens for every key not already present on the command line.
inline std::vector<std::string> config_arguments(const std::string & path, const std::vector<std::string> & given)
{
  std::ifstream in(path);
  if (!in) throw FileError("cannot read config file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(number) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    const std::string flag = "--" + key;
    bool present = false;
    for (const auto & g : given)
      if (g == flag || g.rfind(flag + "=", 0) == 0) present = true;
    if (present) continue;
    if (value == "true") {
      out.push_back(flag);
    } else if (value != "false") {
      out.push_back(flag);
      out.push_back(value);
    }
  }
  return out;
}

}  // namespace kaqcli
