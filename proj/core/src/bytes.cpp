#include "tdh/bytes.hpp"

#include <openssl/crypto.h>

namespace tdh {

std::string to_hex(ByteSpan data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::kInvalidEncoding, "odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kInvalidEncoding, "non-hex character");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

void secure_zero(std::span<std::uint8_t> data) { OPENSSL_cleanse(data.data(), data.size()); }

bool constant_time_equal(ByteSpan a, ByteSpan b) {
  if (a.size() != b.size()) return false;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}
ByteWriter& ByteWriter::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
  return *this;
}
ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  return *this;
}
ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  return *this;
}
ByteWriter& ByteWriter::raw(ByteSpan data) {
  out_.insert(out_.end(), data.begin(), data.end());
  return *this;
}
ByteWriter& ByteWriter::var(ByteSpan data) {
  u32(static_cast<std::uint32_t>(data.size()));
  return raw(data);
}

ByteSpan ByteReader::raw(std::size_t n) {
  if (remaining() < n) throw Error(ErrorCode::kInvalidEncoding, "truncated input");
  ByteSpan s = data_.subspan(pos_, n);
  pos_ += n;
  return s;
}
std::uint8_t ByteReader::u8() { return raw(1)[0]; }
std::uint16_t ByteReader::u16() {
  auto s = raw(2);
  return static_cast<std::uint16_t>(s[0] << 8 | s[1]);
}
std::uint32_t ByteReader::u32() {
  auto s = raw(4);
  return std::uint32_t{s[0]} << 24 | std::uint32_t{s[1]} << 16 | std::uint32_t{s[2]} << 8 | s[3];
}
std::uint64_t ByteReader::u64() {
  auto s = raw(8);
  std::uint64_t v = 0;
  for (auto b : s) v = v << 8 | b;
  return v;
}
Bytes ByteReader::var() {
  std::uint32_t n = u32();
  auto s = raw(n);
  return Bytes(s.begin(), s.end());
}
std::string ByteReader::str() {
  auto b = var();
  return std::string(b.begin(), b.end());
}
void ByteReader::expect_done() const {
  if (!done()) throw Error(ErrorCode::kInvalidEncoding, "trailing bytes");
}

}  // namespace tdh
