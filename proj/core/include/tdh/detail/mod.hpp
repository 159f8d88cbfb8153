#pragma once

// Fixed-width 256-bit integers and constant-time Montgomery arithmetic for
// odd moduli below 2^256. Internal to the group layer; exposed for tests.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace tdh::detail {

using u128 = unsigned __int128;

struct U256 {
  std::array<std::uint64_t, 4> w{};  // little-endian limbs

  constexpr bool operator==(const U256&) const = default;

  static constexpr U256 from_u64(std::uint64_t v) { return U256{{v, 0, 0, 0}}; }

  static constexpr U256 from_hex(std::string_view hex) {
    U256 r;
    int bit = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
      char c = *it;
      std::uint64_t d = 0;
      if (c >= '0' && c <= '9') d = static_cast<std::uint64_t>(c - '0');
      else if (c >= 'a' && c <= 'f') d = static_cast<std::uint64_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') d = static_cast<std::uint64_t>(c - 'A' + 10);
      else continue;
      r.w[bit / 64] |= d << (bit % 64);
      bit += 4;
    }
    return r;
  }

  static U256 from_le_bytes(std::span<const std::uint8_t, 32> b) {
    U256 r;
    for (int i = 0; i < 32; ++i) r.w[i / 8] |= static_cast<std::uint64_t>(b[i]) << (8 * (i % 8));
    return r;
  }
  static U256 from_be_bytes(std::span<const std::uint8_t, 32> b) {
    U256 r;
    for (int i = 0; i < 32; ++i) r.w[(31 - i) / 8] |= static_cast<std::uint64_t>(b[i]) << (8 * ((31 - i) % 8));
    return r;
  }
  std::array<std::uint8_t, 32> to_le_bytes() const {
    std::array<std::uint8_t, 32> out{};
    for (int i = 0; i < 32; ++i) out[i] = static_cast<std::uint8_t>(w[i / 8] >> (8 * (i % 8)));
    return out;
  }
  std::array<std::uint8_t, 32> to_be_bytes() const {
    std::array<std::uint8_t, 32> out{};
    for (int i = 0; i < 32; ++i) out[31 - i] = static_cast<std::uint8_t>(w[i / 8] >> (8 * (i % 8)));
    return out;
  }

  constexpr bool bit(int i) const { return (w[i / 64] >> (i % 64)) & 1; }
  constexpr bool is_zero() const { return (w[0] | w[1] | w[2] | w[3]) == 0; }
  constexpr bool is_odd() const { return w[0] & 1; }
};

// Variable time; public values only.
constexpr bool less_than(const U256& a, const U256& b) {
  for (int i = 3; i >= 0; --i) {
    if (a.w[i] != b.w[i]) return a.w[i] < b.w[i];
  }
  return false;
}

// r = a + b, returns carry.
constexpr std::uint64_t add_raw(U256& r, const U256& a, const U256& b) {
  u128 c = 0;
  for (int i = 0; i < 4; ++i) {
    c += static_cast<u128>(a.w[i]) + b.w[i];
    r.w[i] = static_cast<std::uint64_t>(c);
    c >>= 64;
  }
  return static_cast<std::uint64_t>(c);
}

// r = a - b, returns borrow (0 or 1).
constexpr std::uint64_t sub_raw(U256& r, const U256& a, const U256& b) {
  std::uint64_t borrow = 0;
  for (int i = 0; i < 4; ++i) {
    u128 d = static_cast<u128>(a.w[i]) - b.w[i] - borrow;
    r.w[i] = static_cast<std::uint64_t>(d);
    borrow = static_cast<std::uint64_t>(d >> 64) & 1;
  }
  return borrow;
}

// mask is all-ones or zero.
constexpr U256 select(std::uint64_t mask, const U256& a, const U256& b) {
  U256 r;
  for (int i = 0; i < 4; ++i) r.w[i] = (a.w[i] & mask) | (b.w[i] & ~mask);
  return r;
}

constexpr std::uint64_t mask_from_bit(std::uint64_t bit) { return 0 - (bit & 1); }

struct Modulus {
  U256 m;
  std::uint64_t n0 = 0;  // -m^-1 mod 2^64
  U256 r1;               // 2^256 mod m
  U256 r2;               // 2^512 mod m
};

namespace mod_impl {
constexpr U256 add_mod_ct(const U256& a, const U256& b, const U256& m) {
  U256 s;
  std::uint64_t carry = add_raw(s, a, b);
  U256 d;
  std::uint64_t borrow = sub_raw(d, s, m);
  // keep d when the sum overflowed or no borrow occurred
  std::uint64_t use_d = mask_from_bit(carry | (borrow ^ 1));
  return select(use_d, d, s);
}
}  // namespace mod_impl

constexpr Modulus make_modulus(const U256& m) {
  Modulus M;
  M.m = m;
  std::uint64_t inv = 1;
  for (int i = 0; i < 6; ++i) inv *= 2 - m.w[0] * inv;
  M.n0 = 0 - inv;
  // 2^256 mod m via repeated doubling of 1.
  U256 x = U256::from_u64(1);
  for (int i = 0; i < 256; ++i) x = mod_impl::add_mod_ct(x, x, m);
  M.r1 = x;
  for (int i = 0; i < 256; ++i) x = mod_impl::add_mod_ct(x, x, m);
  M.r2 = x;
  return M;
}

// Montgomery product a*b*2^-256 mod m for a*b < m*2^256.
constexpr U256 mont_mul(const U256& a, const U256& b, const Modulus& M) {
  std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    u128 c = 0;
    for (int j = 0; j < 4; ++j) {
      c += static_cast<u128>(a.w[j]) * b.w[i] + t[j];
      t[j] = static_cast<std::uint64_t>(c);
      c >>= 64;
    }
    c += t[4];
    t[4] = static_cast<std::uint64_t>(c);
    t[5] = static_cast<std::uint64_t>(c >> 64);

    std::uint64_t q = t[0] * M.n0;
    c = static_cast<u128>(q) * M.m.w[0] + t[0];
    c >>= 64;
    for (int j = 1; j < 4; ++j) {
      c += static_cast<u128>(q) * M.m.w[j] + t[j];
      t[j - 1] = static_cast<std::uint64_t>(c);
      c >>= 64;
    }
    c += t[4];
    t[3] = static_cast<std::uint64_t>(c);
    t[4] = t[5] + static_cast<std::uint64_t>(c >> 64);
  }
  U256 r{{t[0], t[1], t[2], t[3]}};
  U256 d;
  std::uint64_t borrow = sub_raw(d, r, M.m);
  std::uint64_t use_d = mask_from_bit(t[4] | (borrow ^ 1));
  return select(use_d, d, r);
}

// Element of Z/mZ in Montgomery form. Arithmetic is branch-free; pow() and
// inverse() use square-and-multiply over a public exponent.
template <const Modulus& M>
class ModInt {
 public:
  constexpr ModInt() = default;

  static constexpr const Modulus& modulus() { return M; }

  // `v` must be < m.
  static constexpr ModInt from_canonical(const U256& v) { return ModInt(mont_mul(v, M.r2, M)); }
  static constexpr ModInt from_u64(std::uint64_t v) { return from_canonical(U256::from_u64(v)); }
  // Any 256-bit value, reduced.
  static constexpr ModInt reduce(const U256& v) { return ModInt(mont_mul(v, M.r2, M)); }
  // lo + hi * 2^256, reduced.
  static constexpr ModInt reduce_wide(const U256& lo, const U256& hi) {
    ModInt h(mont_mul(mont_mul(hi, M.r2, M), M.r2, M));
    return h + reduce(lo);
  }
  static constexpr ModInt zero() { return ModInt(); }
  // Montgomery-form limbs, for compact storage inside point coordinates.
  static constexpr ModInt from_raw(const U256& raw) { return ModInt(raw); }
  constexpr const U256& raw() const { return raw_; }
  static constexpr ModInt one() { return ModInt(M.r1); }

  constexpr U256 to_canonical() const { return mont_mul(raw_, U256::from_u64(1), M); }

  constexpr ModInt operator+(const ModInt& o) const { return ModInt(mod_impl::add_mod_ct(raw_, o.raw_, M.m)); }
  constexpr ModInt operator-(const ModInt& o) const {
    U256 d;
    std::uint64_t borrow = sub_raw(d, raw_, o.raw_);
    U256 fixed;
    add_raw(fixed, d, M.m);
    return ModInt(detail::select(mask_from_bit(borrow), fixed, d));
  }
  constexpr ModInt operator-() const { return zero() - *this; }
  constexpr ModInt operator*(const ModInt& o) const { return ModInt(mont_mul(raw_, o.raw_, M)); }
  constexpr ModInt& operator+=(const ModInt& o) { return *this = *this + o; }
  constexpr ModInt& operator-=(const ModInt& o) { return *this = *this - o; }
  constexpr ModInt& operator*=(const ModInt& o) { return *this = *this * o; }
  constexpr ModInt square() const { return *this * *this; }
  constexpr ModInt dbl() const { return *this + *this; }

  constexpr ModInt pow(const U256& e) const {
    ModInt r = one();
    for (int i = 255; i >= 0; --i) {
      r = r.square();
      if (e.bit(i)) r = r * *this;
    }
    return r;
  }
  // Fermat inverse; zero maps to zero. m must be prime.
  constexpr ModInt inverse() const {
    U256 e;
    sub_raw(e, M.m, U256::from_u64(2));
    return pow(e);
  }

  constexpr bool is_zero() const { return raw_.is_zero(); }
  constexpr bool operator==(const ModInt& o) const {
    std::uint64_t acc = 0;
    for (int i = 0; i < 4; ++i) acc |= raw_.w[i] ^ o.raw_.w[i];
    return acc == 0;
  }
  // Parity of the canonical representative.
  constexpr bool is_odd() const { return to_canonical().is_odd(); }

  static constexpr ModInt select(std::uint64_t mask, const ModInt& a, const ModInt& b) {
    return ModInt(detail::select(mask, a.raw_, b.raw_));
  }

 private:
  constexpr explicit ModInt(const U256& raw) : raw_(raw) {}

  U256 raw_;
};

}  // namespace tdh::detail
