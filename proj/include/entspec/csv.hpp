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

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace entspec {

/// Ordered key/value pairs written as a `# key: value` header above a CSV
/// table. The artifact version is always added first.
class CsvMeta {
 public:
  CsvMeta& set(std::string key, std::string value);
  CsvMeta& set(std::string key, double value);
  CsvMeta& set(std::string key, long long value);
  CsvMeta& set(std::string key, unsigned long long value);
  CsvMeta& set(std::string key, int value) { return set(std::move(key), static_cast<long long>(value)); }
  CsvMeta& set(std::string key, unsigned value) {
    return set(std::move(key), static_cast<unsigned long long>(value));
  }
  CsvMeta& set(std::string key, unsigned long value) {
    return set(std::move(key), static_cast<unsigned long long>(value));
  }

  void write(std::ostream& out) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  /// Reads leading '#' lines; stops before the first other line.
  static CsvMeta read(std::istream& in);
  /// Value for , or empty if absent.
  std::string get(const std::string& key) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest decimal form that round-trips the double.
std::string format_double(double v);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace entspec
