// Copyright 2026 The mbmrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MBMRL_CLI_TABLE_HPP_
#define MBMRL_CLI_TABLE_HPP_

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "mbmrl/common.hpp"
#include "mbmrl/dynamics/dataset.hpp"

namespace mbmrl::cli {

// Plain CSV without quoting; every artifact written here is of that form.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }

  // Values of a column parsed as doubles; nullopt if any cell is not numeric.
  std::optional<std::vector<double>> numeric(std::size_t c) const {
    std::vector<double> out;
    for (const auto& r : rows) {
      if (c >= r.size() || r[c].empty()) return std::nullopt;
      try {
        std::size_t pos = 0;
        const double v = std::stod(r[c], &pos);
        if (pos != r[c].size()) return std::nullopt;
        out.push_back(v);
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
    return out;
  }

  void write(std::ostream& out) const {
    auto line = [&](const std::vector<std::string>& f) {
      for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
      out << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(str_cat("cannot open ", path.string()));
    write(out);
  }
};

inline Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(str_cat("cannot open ", path.string()));
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(str_cat(path.string(), ": empty table"));
  t.header = internal::split_csv(line);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto f = internal::split_csv(line);
    if (f.size() != t.header.size()) {
      throw IoError(str_cat(path.string(), ": row ", row, " has ", f.size(),
                            " fields, header has ", t.header.size()));
    }
    t.rows.push_back(std::move(f));
  }
  return t;
}

inline std::string num(double x) { return internal::fmt_double(x); }

}  // namespace mbmrl::cli

#endif  // MBMRL_CLI_TABLE_HPP_
