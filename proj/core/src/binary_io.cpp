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

#include "hq/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "hq/error.hpp"

namespace hq::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "on-disk formats assume a little-endian host");

template <typename T>
void Append(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

}  // namespace

void ByteWriter::Magic(std::string_view tag) {
  bytes_.insert(bytes_.end(), tag.begin(), tag.end());
}
void ByteWriter::U16(std::uint16_t v) { Append(bytes_, v); }
void ByteWriter::U32(std::uint32_t v) { Append(bytes_, v); }
void ByteWriter::U64(std::uint64_t v) { Append(bytes_, v); }
void ByteWriter::F32(float v) { Append(bytes_, v); }
void ByteWriter::F64(double v) { Append(bytes_, v); }

void ByteReader::Need(std::size_t count, const char* what) const {
  if (remaining() < count) {
    Throw(ErrorCode::kTruncatedFile, std::string("file ends inside ") + what);
  }
}

void ByteReader::ExpectMagic(std::string_view tag) {
  if (remaining() < tag.size() ||
      std::memcmp(bytes_.data() + pos_, tag.data(), tag.size()) != 0) {
    Throw(ErrorCode::kBadMagic, "expected magic " + std::string(tag));
  }
  pos_ += tag.size();
}

#define HQ_READ_SCALAR(Name, Type)                   \
  Type ByteReader::Name() {                          \
    Need(sizeof(Type), #Type " field");              \
    Type v;                                          \
    std::memcpy(&v, bytes_.data() + pos_, sizeof v); \
    pos_ += sizeof v;                                \
    return v;                                        \
  }

HQ_READ_SCALAR(U16, std::uint16_t)
HQ_READ_SCALAR(U32, std::uint32_t)
HQ_READ_SCALAR(U64, std::uint64_t)
HQ_READ_SCALAR(F32, float)
HQ_READ_SCALAR(F64, double)

#undef HQ_READ_SCALAR

std::vector<std::uint8_t> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Throw(ErrorCode::kIoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFile(const std::filesystem::path& path,
               std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Throw(ErrorCode::kIoFailure, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Throw(ErrorCode::kIoFailure, "write failed for " + path.string());
}

}  // namespace hq::io
