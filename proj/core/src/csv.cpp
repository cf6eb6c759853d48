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

#include "hq/csv.hpp"

#include <iomanip>
#include <limits>

#include "hq/error.hpp"

namespace hq {

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  WriteCells(header);
}

std::string CsvWriter::Cell(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return s.str();
}

void CsvWriter::WriteCells(const std::vector<std::string>& cells) {
  Require(cells.size() == columns_, ErrorCode::kInvalidArgument,
          "CSV row width differs from header");
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (c > 0) out_ << ',';
    const std::string& cell = cells[c];
    if (cell.find_first_of(",\"\n\r") == std::string::npos) {
      out_ << cell;
      continue;
    }
    out_ << '"';
    for (char ch : cell) {
      if (ch == '"') out_ << '"';
      out_ << ch;
    }
    out_ << '"';
  }
  out_ << '\n';
}

}  // namespace hq
