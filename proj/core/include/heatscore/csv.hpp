// Copyright 2026 The heatscore Authors
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

#ifndef HEATSCORE_CSV_HPP_
#define HEATSCORE_CSV_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace heatscore {

// %.17g, so a value survives a text round trip unchanged.
std::string format_real(double value);

// Splits on commas. Fields are never quoted in our own outputs.
std::vector<std::string> split_csv_line(const std::string& line);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  void append_column(const std::string& name, const std::string& value);

  void write(std::ostream& out) const;
  void write(const std::string& path) const;
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace heatscore

#endif  // HEATSCORE_CSV_HPP_
