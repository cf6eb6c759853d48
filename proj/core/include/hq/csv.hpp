// Copyright 2026 The HQ Retrieval Authors.
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

#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace hq {

/// Minimal RFC 4180 writer: header row first, fields quoted when needed.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  template <typename... Fields>
  void Row(const Fields&... fields) {
    std::vector<std::string> cells;
    cells.reserve(sizeof...(fields));
    (cells.push_back(Cell(fields)), ...);
    WriteCells(cells);
  }

  std::size_t columns() const { return columns_; }

 private:
  static std::string Cell(const std::string& v) { return v; }
  static std::string Cell(std::string_view v) { return std::string(v); }
  static std::string Cell(const char* v) { return v; }
  static std::string Cell(double v);
  template <typename T>
  static std::string Cell(const T& v) {
    std::ostringstream s;
    s << v;
    return s.str();
  }
  void WriteCells(const std::vector<std::string>& cells);

  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace hq
