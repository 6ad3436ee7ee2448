#pragma once

// Flat key-value experiment manifests.
//
//   # comment
//   s = 50
//   lambda = 1
//   model = 2
//   json = true
//
// Keys are the long CLI flag names without the leading dashes. A value of
// `true` turns on a boolean flag, `false` leaves it off. Blank lines and
// lines starting with '#' are ignored.

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "covert/params.hpp"

namespace covert::config {

using Entries = std::vector<std::pair<std::string, std::string>>;

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline Entries parse(std::istream& in) {
  Entries entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError("config line " + std::to_string(line_no) + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ParameterError("config line " + std::to_string(line_no) + ": empty key");
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

inline Entries load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file '" + path + "'");
  return parse(in);
}

/// Flag tokens equivalent to the entries. Callers place these before the
/// user's own flags so that explicit flags take precedence.
inline std::vector<std::string> to_args(const Entries& entries) {
  std::vector<std::string> args;
  for (const auto& [key, value] : entries) {
    if (key == "config") throw ParameterError("config files cannot include other config files");
    if (value == "false") continue;
    args.push_back("--" + key);
    if (value != "true") args.push_back(value);
  }
  return args;
}

}  // namespace covert::config
