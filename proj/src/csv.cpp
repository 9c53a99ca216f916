// Copyright 2026 The entspec Authors
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

#include "entspec/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "entspec/version.hpp"

namespace entspec {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

CsvMeta& CsvMeta::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
  return *this;
}

CsvMeta& CsvMeta::set(std::string key, double value) {
  return set(std::move(key), format_double(value));
}

CsvMeta& CsvMeta::set(std::string key, long long value) {
  return set(std::move(key), std::to_string(value));
}

CsvMeta& CsvMeta::set(std::string key, unsigned long long value) {
  return set(std::move(key), std::to_string(value));
}

void CsvMeta::write(std::ostream& out) const {
  out << "# version: " << kVersion << '\n';
  for (const auto& [k, v] : entries_) {
    if (k == "version") continue;
    out << "# " << k << ": " << v << '\n';
  }
}

CsvMeta CsvMeta::read(std::istream& in) {
  CsvMeta meta;
  std::string line;
  while (in.peek() == '#') {
    std::getline(in, line);
    const auto colon = line.find(": ");
    if (colon == std::string::npos || colon < 2) continue;
    meta.set(line.substr(2, colon - 2), line.substr(colon + 2));
  }
  return meta;
}

std::string CsvMeta::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return {};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace entspec
