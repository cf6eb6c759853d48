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

// Little-endian fixed-width readers/writers shared by the on-disk formats.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hq::io {

class ByteWriter {
 public:
  void Magic(std::string_view tag);
  void U16(std::uint16_t v);
  void U32(std::uint32_t v);
  void U64(std::uint64_t v);
  void F32(float v);
  void F64(double v);

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  /// Throws BadMagic if the next four bytes differ from `tag`.
  void ExpectMagic(std::string_view tag);
  std::uint16_t U16();
  std::uint32_t U32();
  std::uint64_t U64();
  float F32();
  double F64();

  std::size_t remaining() const { return bytes_.size() - pos_; }
  /// Throws TruncatedFile unless at least `count` bytes remain.
  void Need(std::size_t count, const char* what) const;

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path,
               std::span<const std::uint8_t> bytes);

}  // namespace hq::io
