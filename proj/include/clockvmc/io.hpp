// Copyright 2026 The clockvmc Authors - All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace clockvmc {

inline constexpr std::string_view kToolVersion = "0.1.0";

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t value);

// What produced a file. Rendered as the first line of every artifact:
//   # clockvmc <version> command=<cmd> config_hash=<16 hex> seed=<n>
struct Provenance {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;

  std::string header_line() const;
};

// Write to a sibling temporary file, then rename over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);
// Throws MissingArtifact when the file does not exist.
std::string read_text(const std::filesystem::path& path);

// Shortest text that round-trips to the same double; "nan", "inf", "-inf".
std::string format_number(double value);
double parse_number(std::string_view text);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::size_t column(std::string_view name) const;  // throws std::out_of_range
  // Header comment line (when given), column line, rows.
  std::string render(const Provenance* provenance = nullptr) const;
};

// Lines starting with '#' are skipped. No quoting: fields never contain commas.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace clockvmc
