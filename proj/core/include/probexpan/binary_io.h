// Copyright 2026 The ProbExpan Authors.
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

// Little-endian byte encoding shared by the binary file formats.

#ifndef PROBEXPAN_BINARY_IO_H_
#define PROBEXPAN_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

#include "probexpan/common.h"

namespace probexpan {

class ByteWriter {
 public:
  void PutBytes(std::string_view bytes) { out_.append(bytes); }
  void PutU32(std::uint32_t v) { PutLittleEndian(v, 4); }
  void PutU64(std::uint64_t v) { PutLittleEndian(v, 8); }
  void PutF64(double v) { PutU64(std::bit_cast<std::uint64_t>(v)); }

  const std::string& bytes() const { return out_; }
  std::string Release() { return std::move(out_); }

 private:
  void PutLittleEndian(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) {
      out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
  }
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string source)
      : bytes_(bytes), source_(std::move(source)) {}

  std::string_view GetBytes(std::size_t n) {
    Require(n);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint32_t GetU32() { return static_cast<std::uint32_t>(GetLittleEndian(4)); }
  std::uint64_t GetU64() { return GetLittleEndian(8); }
  double GetF64() { return std::bit_cast<double>(GetU64()); }

  bool AtEnd() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::string& source() const { return source_; }

 private:
  void Require(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(source_ + ": truncated file");
    }
  }
  std::uint64_t GetLittleEndian(int width) {
    Require(width);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += width;
    return v;
  }

  std::string_view bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::string ReadFileBytes(const std::filesystem::path& path);
// Writes via a temporary file and rename so readers never see partial files.
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace probexpan

#endif  // PROBEXPAN_BINARY_IO_H_
