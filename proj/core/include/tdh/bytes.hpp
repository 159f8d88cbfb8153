#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdh/error.hpp"

namespace tdh {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

std::string to_hex(ByteSpan data);
// Throws kInvalidEncoding on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

template <std::size_t N>
Bytes to_bytes(const std::array<std::uint8_t, N>& a) {
  return Bytes(a.begin(), a.end());
}

// Overwrites memory in a way the optimizer may not elide.
void secure_zero(std::span<std::uint8_t> data);

bool constant_time_equal(ByteSpan a, ByteSpan b);

// Big-endian writer for the length-prefixed wire layouts.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u16(std::uint16_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& raw(ByteSpan data);
  // u32 length prefix followed by the bytes.
  ByteWriter& var(ByteSpan data);
  ByteWriter& str(std::string_view s) { return var(ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())); }

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

// Reader counterpart; every accessor throws kInvalidEncoding on truncation.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  ByteSpan raw(std::size_t n);
  template <std::size_t N>
  std::array<std::uint8_t, N> fixed() {
    auto s = raw(N);
    std::array<std::uint8_t, N> out{};
    std::copy(s.begin(), s.end(), out.begin());
    return out;
  }
  Bytes var();
  std::string str();

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return remaining() == 0; }
  // Throws kInvalidEncoding when trailing bytes are present.
  void expect_done() const;

 private:
  ByteSpan data_;
  std::size_t pos_ = 0;
};

}  // namespace tdh
