#pragma once

// Prime-order group arithmetic over two backends:
//  - P-256, short Weierstrass, projective coordinates with complete formulas;
//  - Curve25519, held internally on the birationally equivalent twisted
//    Edwards curve (extended coordinates). The Montgomery form only appears
//    at the X25519 u-coordinate boundary.
//
// Scalars are canonical integers modulo the prime subgroup order q. All
// values are immutable and every function here is pure.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "tdh/bytes.hpp"
#include "tdh/detail/mod.hpp"
#include "tdh/rng.hpp"

namespace tdh {

enum class CurveId : std::uint8_t { kP256 = 1, kCurve25519 = 2 };

std::string_view curve_name(CurveId curve);
// Accepts "p256", "P-256", "curve25519", "x25519" (case-insensitive).
CurveId parse_curve(std::string_view name);

// 8 for Curve25519, 1 for P-256.
std::uint64_t cofactor(CurveId curve);

inline constexpr std::size_t kScalarBytes = 32;
inline constexpr std::size_t kEncodedPointBytes = 33;

using ScalarBytes = std::array<std::uint8_t, kScalarBytes>;
using EncodedPoint = std::array<std::uint8_t, kEncodedPointBytes>;

class GroupScalar {
 public:
  static GroupScalar zero(CurveId curve);
  static GroupScalar one(CurveId curve);
  static GroupScalar from_u64(CurveId curve, std::uint64_t v);
  // Uniform in [1, q).
  static GroupScalar random(CurveId curve, Rng& rng);
  // Canonical 32-byte little-endian; rejects values >= q.
  static GroupScalar from_bytes(CurveId curve, ByteSpan le_bytes);
  // Any 32-byte little-endian value, reduced mod q.
  static GroupScalar from_bytes_reduced(CurveId curve, ByteSpan le_bytes);

  CurveId curve() const { return curve_; }
  ScalarBytes to_bytes() const;  // little-endian
  bool is_zero() const { return value_.is_zero(); }

  GroupScalar operator+(const GroupScalar& o) const;
  GroupScalar operator-(const GroupScalar& o) const;
  GroupScalar operator*(const GroupScalar& o) const;
  GroupScalar operator-() const;
  GroupScalar& operator+=(const GroupScalar& o) { return *this = *this + o; }
  GroupScalar& operator*=(const GroupScalar& o) { return *this = *this * o; }
  // Throws kInvalidArgument on zero.
  GroupScalar inverse() const;

  bool operator==(const GroupScalar& o) const;

  const detail::U256& value() const { return value_; }

 private:
  GroupScalar(CurveId curve, const detail::U256& v) : curve_(curve), value_(v) {}

  CurveId curve_ = CurveId::kP256;
  detail::U256 value_;
};

// Private-share generator: uniform nonzero scalar; on Curve25519 the
// integer value is additionally a multiple of the cofactor.
GroupScalar scalar_random(CurveId curve, Rng& rng);

class GroupPoint {
 public:
  static GroupPoint generator(CurveId curve);
  static GroupPoint identity(CurveId curve);

  CurveId curve() const { return curve_; }
  bool is_identity() const;

  GroupPoint operator+(const GroupPoint& o) const;
  GroupPoint operator-() const;
  GroupPoint operator-(const GroupPoint& o) const { return *this + (-o); }
  GroupPoint& operator+=(const GroupPoint& o) { return *this = *this + o; }
  bool operator==(const GroupPoint& o) const;

  // Internal coordinates in Montgomery form of the backend field:
  // P-256 (X:Y:Z, unused); Curve25519 extended Edwards (X:Y:Z:T).
  using Coords = std::array<detail::U256, 4>;
  GroupPoint(CurveId curve, const Coords& c) : curve_(curve), c_(c) {}
  const Coords& coords() const { return c_; }

 private:
  CurveId curve_ = CurveId::kP256;
  Coords c_{};
};

// Constant-time in the scalar.
GroupPoint point_mul(const GroupScalar& s, const GroupPoint& p);
// Variable time; for public scalars only (verification equations).
GroupPoint point_mul_public(const GroupScalar& s, const GroupPoint& p);
GroupPoint point_add(const GroupPoint& p, const GroupPoint& q);
inline GroupPoint operator*(const GroupScalar& s, const GroupPoint& p) { return point_mul(s, p); }

// Strict decoding rejects points outside the prime-order subgroup; Sanitize
// strips any low-order component instead.
enum class DecodeMode { kStrict, kSanitize };

// P-256: SEC1 compressed. Curve25519: 32-byte little-endian Montgomery u
// followed by a sign byte (0: second coordinate even in [0, p), 1: odd).
// The identity encodes as 33 zero bytes on both curves.
EncodedPoint encode_point(const GroupPoint& p);
GroupPoint decode_point(ByteSpan bytes, CurveId curve, DecodeMode mode = DecodeMode::kStrict);

// Listing-style X25519 clamp of a 32-byte little-endian scalar.
ScalarBytes scalar_clamp(ByteSpan raw);

// Curve25519 only. Throws kExceptionalPoint for the identity and the
// order-2 point, which have no image under the birational map.
ScalarBytes to_x25519_u(const GroupPoint& p);
// Parity of the Montgomery v-coordinate (0 even, 1 odd). Curve25519 only.
std::uint8_t x25519_sign(const GroupPoint& p);
// Inverse of to_x25519_u. Does not check subgroup membership.
GroupPoint from_x25519_u(ByteSpan u, std::uint8_t sign);

// (h^-1 mod q) * (h * P): the prime-order component of P.
GroupPoint sanitize_point(const GroupPoint& p);
// q * P == identity.
bool in_prime_subgroup(const GroupPoint& p);

namespace detail {
U256 group_order(CurveId curve);
U256 field_prime(CurveId curve);
// Variable-time multiplication by an arbitrary 256-bit integer (tests, torsion).
GroupPoint mul_unreduced(const U256& k, const GroupPoint& p);
// Curve25519: Edwards affine point; throws kNotOnCurve.
GroupPoint ed25519_from_affine(const U256& x, const U256& y);
// Affine coordinates (Edwards x,y for Curve25519; Weierstrass x,y for P-256).
std::array<U256, 2> affine(const GroupPoint& p);
// P-256 affine point; throws kNotOnCurve.
GroupPoint p256_from_affine(const U256& x, const U256& y);
}  // namespace detail

}  // namespace tdh
