/*
 * Copyright 2026 The capot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CAPOT_BINARY_IO_HPP_
#define CAPOT_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

#include "capot/errors.hpp"

namespace capot::binary {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void write_array(std::ostream& out, std::span<const T> values) {
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size_bytes()));
}

inline void write_string(std::ostream& out, std::string_view s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

// Reads fail with DataError naming the file and the field being read.
class Reader {
 public:
  Reader(std::istream& in, std::string source)
      : in_(in), source_(std::move(source)) {}

  template <typename T>
  T pod(std::string_view what) {
    T value;
    read_bytes(reinterpret_cast<char*>(&value), sizeof(T), what);
    return value;
  }

  template <typename T>
  void array(std::span<T> out, std::string_view what) {
    read_bytes(reinterpret_cast<char*>(out.data()), out.size_bytes(), what);
  }

  std::string string(std::string_view what, std::uint32_t max_len = 1u << 20) {
    const auto n = pod<std::uint32_t>(what);
    if (n > max_len) fail(std::string(what) + " length out of range");
    std::string s(n, '\0');
    read_bytes(s.data(), n, what);
    return s;
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      fail("trailing bytes");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw DataError(source_ + ": " + msg);
  }

 private:
  void read_bytes(char* dst, std::size_t n, std::string_view what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      fail("truncated while reading " + std::string(what));
    }
  }

  std::istream& in_;
  std::string source_;
};

// FNV-1a 64 over the file's bytes, as 16 lowercase hex digits.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace capot::binary

#endif  // CAPOT_BINARY_IO_HPP_
