#include "tdh/group.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace tdh {

using detail::ModInt;
using detail::Modulus;
using detail::U256;

namespace {

inline constexpr Modulus kP256FieldMod = detail::make_modulus(
    U256::from_hex("ffffffff00000001000000000000000000000000ffffffffffffffffffffffff"));
inline constexpr Modulus kP256OrderMod = detail::make_modulus(
    U256::from_hex("ffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551"));
inline constexpr Modulus k25519FieldMod = detail::make_modulus(
    U256::from_hex("7fffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffed"));
inline constexpr Modulus k25519OrderMod = detail::make_modulus(
    U256::from_hex("1000000000000000000000000000000014def9dea2f79cd65812631a5cf5d3ed"));

using Fp256 = ModInt<kP256FieldMod>;
using Fn256 = ModInt<kP256OrderMod>;
using Fe = ModInt<k25519FieldMod>;
using Fq = ModInt<k25519OrderMod>;

const Fp256 kP256B = Fp256::from_canonical(
    U256::from_hex("5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b"));
const Fp256 kP256Gx = Fp256::from_canonical(
    U256::from_hex("6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"));
const Fp256 kP256Gy = Fp256::from_canonical(
    U256::from_hex("4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5"));

const Fe kEdD = Fe::from_canonical(
    U256::from_hex("52036cee2b6ffe738cc740797779e89800700a4d4141d8ab75eb4dca135978a3"));
const Fe kEdD2 = kEdD + kEdD;
const Fe kEdGx = Fe::from_canonical(
    U256::from_hex("216936d3cd6e53fec0a4e231fdd6dc5c692cc7609525a7b2c9562d608f25d51a"));
const Fe kEdGy = Fe::from_canonical(
    U256::from_hex("6666666666666666666666666666666666666666666666666666666666666658"));
// v = kMontScale * u / x maps Edwards (x, y) to Montgomery (u, v); kMontScale^2 = -(A + 2).
const Fe kMontScale = Fe::from_canonical(
    U256::from_hex("70d9120b9f5ff9442d84f723fc03b0813a5e2c2eb482e57d3391fb5500ba81e7"));
const Fe kSqrtM1 = Fe::from_canonical(
    U256::from_hex("2b8324804fc1df0b2b4d00993dfbd7a72f431806ad2fe478c4ee1b274a0ea0b0"));
const Fe kMontA = Fe::from_u64(486662);

void require_same_curve(CurveId a, CurveId b) {
  if (a != b) throw Error(ErrorCode::kCurveMismatch, "operands on different curves");
}

template <class F>
F load(const U256& raw_mont) {
  return F::from_raw(raw_mont);
}
template <class F>
U256 store(const F& f) {
  return f.raw();
}

// ---- P-256: projective (X:Y:Z), complete formulas for a = -3 ----

struct P256Point {
  Fp256 x, y, z;
};

P256Point p256_load(const GroupPoint& p) {
  const auto& c = p.coords();
  return {load<Fp256>(c[0]), load<Fp256>(c[1]), load<Fp256>(c[2])};
}
GroupPoint p256_store(const P256Point& p) {
  return GroupPoint(CurveId::kP256, {store(p.x), store(p.y), store(p.z), U256{}});
}

P256Point p256_add(const P256Point& a, const P256Point& b) {
  const Fp256& X1 = a.x; const Fp256& Y1 = a.y; const Fp256& Z1 = a.z;
  const Fp256& X2 = b.x; const Fp256& Y2 = b.y; const Fp256& Z2 = b.z;
  Fp256 t0 = X1 * X2;
  Fp256 t1 = Y1 * Y2;
  Fp256 t2 = Z1 * Z2;
  Fp256 t3 = X1 + Y1;
  Fp256 t4 = X2 + Y2;
  t3 = t3 * t4;
  t4 = t0 + t1;
  t3 = t3 - t4;
  t4 = Y1 + Z1;
  Fp256 X3 = Y2 + Z2;
  t4 = t4 * X3;
  X3 = t1 + t2;
  t4 = t4 - X3;
  X3 = X1 + Z1;
  Fp256 Y3 = X2 + Z2;
  X3 = X3 * Y3;
  Y3 = t0 + t2;
  Y3 = X3 - Y3;
  Fp256 Z3 = kP256B * t2;
  X3 = Y3 - Z3;
  Z3 = X3 + X3;
  X3 = X3 + Z3;
  Z3 = t1 - X3;
  X3 = t1 + X3;
  Y3 = kP256B * Y3;
  t1 = t2 + t2;
  t2 = t1 + t2;
  Y3 = Y3 - t2;
  Y3 = Y3 - t0;
  t1 = Y3 + Y3;
  Y3 = t1 + Y3;
  t1 = t0 + t0;
  t0 = t1 + t0;
  t0 = t0 - t2;
  t1 = t4 * Y3;
  t2 = t0 * Y3;
  Y3 = X3 * Z3;
  Y3 = Y3 + t2;
  X3 = t3 * X3;
  X3 = X3 - t1;
  Z3 = t4 * Z3;
  t1 = t3 * t0;
  Z3 = Z3 + t1;
  return {X3, Y3, Z3};
}

P256Point p256_identity() { return {Fp256::zero(), Fp256::one(), Fp256::zero()}; }

P256Point p256_select(std::uint64_t mask, const P256Point& a, const P256Point& b) {
  return {Fp256::select(mask, a.x, b.x), Fp256::select(mask, a.y, b.y), Fp256::select(mask, a.z, b.z)};
}

bool p256_on_curve_affine(const Fp256& x, const Fp256& y) {
  Fp256 rhs = x.square() * x - (x + x + x) + kP256B;
  return y.square() == rhs;
}

// ---- Curve25519 as twisted Edwards -x^2 + y^2 = 1 + d x^2 y^2, extended (X:Y:Z:T) ----

struct EdPoint {
  Fe x, y, z, t;
};

EdPoint ed_load(const GroupPoint& p) {
  const auto& c = p.coords();
  return {load<Fe>(c[0]), load<Fe>(c[1]), load<Fe>(c[2]), load<Fe>(c[3])};
}
GroupPoint ed_store(const EdPoint& p) {
  return GroupPoint(CurveId::kCurve25519, {store(p.x), store(p.y), store(p.z), store(p.t)});
}

EdPoint ed_identity() { return {Fe::zero(), Fe::one(), Fe::one(), Fe::zero()}; }

EdPoint ed_add(const EdPoint& p, const EdPoint& q) {
  Fe a = (p.y - p.x) * (q.y - q.x);
  Fe b = (p.y + p.x) * (q.y + q.x);
  Fe c = p.t * kEdD2 * q.t;
  Fe d = (p.z * q.z).dbl();
  Fe e = b - a;
  Fe f = d - c;
  Fe g = d + c;
  Fe h = b + a;
  return {e * f, g * h, f * g, e * h};
}

EdPoint ed_double(const EdPoint& p) {
  Fe a = p.x.square();
  Fe b = p.y.square();
  Fe c = p.z.square().dbl();
  Fe d = -a;
  Fe e = (p.x + p.y).square() - a - b;
  Fe g = d + b;
  Fe f = g - c;
  Fe h = d - b;
  return {e * f, g * h, f * g, e * h};
}

EdPoint ed_select(std::uint64_t mask, const EdPoint& a, const EdPoint& b) {
  return {Fe::select(mask, a.x, b.x), Fe::select(mask, a.y, b.y), Fe::select(mask, a.z, b.z),
          Fe::select(mask, a.t, b.t)};
}

bool ed_on_curve_affine(const Fe& x, const Fe& y) {
  Fe x2 = x.square();
  Fe y2 = y.square();
  return y2 - x2 == Fe::one() + kEdD * x2 * y2;
}

EdPoint ed_from_affine(const Fe& x, const Fe& y) { return {x, y, Fe::one(), x * y}; }

// Square root in GF(2^255-19); false when `a` is a non-residue.
bool fe_sqrt(const Fe& a, Fe& out) {
  U256 e = U256::from_hex("0ffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffe");  // (p+3)/8
  Fe cand = a.pow(e);
  if (cand.square() == a) {
    out = cand;
    return true;
  }
  cand = cand * kSqrtM1;
  if (cand.square() == a) {
    out = cand;
    return true;
  }
  return false;
}

bool fp256_sqrt(const Fp256& a, Fp256& out) {
  // (p+1)/4
  U256 e = U256::from_hex("3fffffffc0000000400000000000000000000000400000000000000000000000");
  Fp256 cand = a.pow(e);
  if (cand.square() != a) return false;
  out = cand;
  return true;
}

// ---- generic constant-time fixed-window ladder ----

template <class Point, class Add, class Dbl, class Sel>
Point window_mul(const U256& k, const Point& p, const Point& id, Add add, Dbl dbl, Sel sel) {
  std::array<Point, 16> table;
  table[0] = id;
  table[1] = p;
  for (int i = 2; i < 16; ++i) table[i] = add(table[i - 1], p);
  Point r = id;
  for (int nib = 63; nib >= 0; --nib) {
    for (int j = 0; j < 4; ++j) r = dbl(r);
    std::uint64_t digit = (k.w[nib / 16] >> (4 * (nib % 16))) & 0xf;
    Point chosen = id;
    for (std::uint64_t i = 0; i < 16; ++i) {
      std::uint64_t diff = i ^ digit;
      std::uint64_t eq = ((diff | (0 - diff)) >> 63) ^ 1;  // 1 iff i == digit
      chosen = sel(detail::mask_from_bit(eq), table[i], chosen);
    }
    r = add(r, chosen);
  }
  return r;
}

template <class F>
U256 scalar_add(const U256& a, const U256& b) {
  return (F::from_canonical(a) + F::from_canonical(b)).to_canonical();
}
template <class F>
U256 scalar_sub(const U256& a, const U256& b) {
  return (F::from_canonical(a) - F::from_canonical(b)).to_canonical();
}
template <class F>
U256 scalar_mul(const U256& a, const U256& b) {
  return (F::from_canonical(a) * F::from_canonical(b)).to_canonical();
}

U256 bit_mask_top(U256 v, int bits) {
  for (int i = 0; i < 4; ++i) {
    int lo = i * 64;
    if (bits <= lo) v.w[i] = 0;
    else if (bits < lo + 64) v.w[i] &= (std::uint64_t{1} << (bits - lo)) - 1;
  }
  return v;
}

U256 sample_below(Rng& rng, const U256& bound, int bits) {
  // Uniform in [1, bound) by rejection.
  for (;;) {
    std::array<std::uint8_t, 32> buf{};
    rng.fill(buf);
    U256 v = bit_mask_top(U256::from_le_bytes(buf), bits);
    secure_zero(buf);
    if (!v.is_zero() && detail::less_than(v, bound)) return v;
  }
}

}  // namespace

std::string_view curve_name(CurveId curve) {
  switch (curve) {
    case CurveId::kP256: return "P256";
    case CurveId::kCurve25519: return "Curve25519";
  }
  return "unknown";
}

CurveId parse_curve(std::string_view name) {
  std::string s;
  for (char c : name) {
    if (c != '-' && c != '_') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "p256" || s == "secp256r1" || s == "prime256v1") return CurveId::kP256;
  if (s == "curve25519" || s == "x25519" || s == "25519") return CurveId::kCurve25519;
  throw Error(ErrorCode::kInvalidArgument, "unknown curve '" + std::string(name) + "'");
}

std::uint64_t cofactor(CurveId curve) { return curve == CurveId::kCurve25519 ? 8 : 1; }

namespace detail {

U256 group_order(CurveId curve) {
  return curve == CurveId::kP256 ? kP256OrderMod.m : k25519OrderMod.m;
}
U256 field_prime(CurveId curve) {
  return curve == CurveId::kP256 ? kP256FieldMod.m : k25519FieldMod.m;
}

GroupPoint mul_unreduced(const U256& k, const GroupPoint& p) {
  GroupPoint r = GroupPoint::identity(p.curve());
  int top = 255;
  while (top >= 0 && !k.bit(top)) --top;
  for (int i = top; i >= 0; --i) {
    r = r + r;
    if (k.bit(i)) r = r + p;
  }
  return r;
}

GroupPoint ed25519_from_affine(const U256& x, const U256& y) {
  if (!less_than(x, k25519FieldMod.m) || !less_than(y, k25519FieldMod.m)) {
    throw Error(ErrorCode::kInvalidEncoding, "non-canonical coordinate");
  }
  Fe fx = Fe::from_canonical(x);
  Fe fy = Fe::from_canonical(y);
  if (!ed_on_curve_affine(fx, fy)) throw Error(ErrorCode::kNotOnCurve, "edwards point not on curve");
  return ed_store(ed_from_affine(fx, fy));
}

GroupPoint p256_from_affine(const U256& x, const U256& y) {
  if (!less_than(x, kP256FieldMod.m) || !less_than(y, kP256FieldMod.m)) {
    throw Error(ErrorCode::kInvalidEncoding, "non-canonical coordinate");
  }
  Fp256 fx = Fp256::from_canonical(x);
  Fp256 fy = Fp256::from_canonical(y);
  if (!p256_on_curve_affine(fx, fy)) throw Error(ErrorCode::kNotOnCurve, "P-256 point not on curve");
  return p256_store({fx, fy, Fp256::one()});
}

std::array<U256, 2> affine(const GroupPoint& p) {
  if (p.is_identity()) {
    if (p.curve() == CurveId::kCurve25519) return {U256{}, U256::from_u64(1)};
    throw Error(ErrorCode::kExceptionalPoint, "identity has no affine form");
  }
  if (p.curve() == CurveId::kP256) {
    P256Point a = p256_load(p);
    Fp256 zi = a.z.inverse();
    return {(a.x * zi).to_canonical(), (a.y * zi).to_canonical()};
  }
  EdPoint a = ed_load(p);
  Fe zi = a.z.inverse();
  return {(a.x * zi).to_canonical(), (a.y * zi).to_canonical()};
}

}  // namespace detail

// ---- GroupScalar ----

GroupScalar GroupScalar::zero(CurveId curve) { return GroupScalar(curve, U256{}); }
GroupScalar GroupScalar::one(CurveId curve) { return GroupScalar(curve, U256::from_u64(1)); }

GroupScalar GroupScalar::from_u64(CurveId curve, std::uint64_t v) {
  U256 u = U256::from_u64(v);
  U256 r = curve == CurveId::kP256 ? Fn256::reduce(u).to_canonical() : Fq::reduce(u).to_canonical();
  return GroupScalar(curve, r);
}

GroupScalar GroupScalar::random(CurveId curve, Rng& rng) {
  U256 q = detail::group_order(curve);
  return GroupScalar(curve, sample_below(rng, q, curve == CurveId::kP256 ? 256 : 253));
}

GroupScalar GroupScalar::from_bytes(CurveId curve, ByteSpan le_bytes) {
  if (le_bytes.size() != kScalarBytes) throw Error(ErrorCode::kInvalidEncoding, "scalar must be 32 bytes");
  U256 v = U256::from_le_bytes(std::span<const std::uint8_t, 32>(le_bytes.data(), 32));
  if (!detail::less_than(v, detail::group_order(curve))) {
    throw Error(ErrorCode::kInvalidEncoding, "scalar not reduced");
  }
  return GroupScalar(curve, v);
}

GroupScalar GroupScalar::from_bytes_reduced(CurveId curve, ByteSpan le_bytes) {
  if (le_bytes.size() != kScalarBytes) throw Error(ErrorCode::kInvalidEncoding, "scalar must be 32 bytes");
  U256 v = U256::from_le_bytes(std::span<const std::uint8_t, 32>(le_bytes.data(), 32));
  U256 r = curve == CurveId::kP256 ? Fn256::reduce(v).to_canonical() : Fq::reduce(v).to_canonical();
  return GroupScalar(curve, r);
}

ScalarBytes GroupScalar::to_bytes() const { return value_.to_le_bytes(); }

GroupScalar GroupScalar::operator+(const GroupScalar& o) const {
  require_same_curve(curve_, o.curve_);
  return GroupScalar(curve_, curve_ == CurveId::kP256 ? scalar_add<Fn256>(value_, o.value_)
                                                     : scalar_add<Fq>(value_, o.value_));
}
GroupScalar GroupScalar::operator-(const GroupScalar& o) const {
  require_same_curve(curve_, o.curve_);
  return GroupScalar(curve_, curve_ == CurveId::kP256 ? scalar_sub<Fn256>(value_, o.value_)
                                                     : scalar_sub<Fq>(value_, o.value_));
}
GroupScalar GroupScalar::operator*(const GroupScalar& o) const {
  require_same_curve(curve_, o.curve_);
  return GroupScalar(curve_, curve_ == CurveId::kP256 ? scalar_mul<Fn256>(value_, o.value_)
                                                     : scalar_mul<Fq>(value_, o.value_));
}
GroupScalar GroupScalar::operator-() const { return zero(curve_) - *this; }

GroupScalar GroupScalar::inverse() const {
  if (is_zero()) throw Error(ErrorCode::kInvalidArgument, "inverse of zero scalar");
  U256 r = curve_ == CurveId::kP256 ? Fn256::from_canonical(value_).inverse().to_canonical()
                                    : Fq::from_canonical(value_).inverse().to_canonical();
  return GroupScalar(curve_, r);
}

bool GroupScalar::operator==(const GroupScalar& o) const {
  if (curve_ != o.curve_) return false;
  std::uint64_t acc = 0;
  for (int i = 0; i < 4; ++i) acc |= value_.w[i] ^ o.value_.w[i];
  return acc == 0;
}

GroupScalar scalar_random(CurveId curve, Rng& rng) {
  if (curve == CurveId::kP256) return GroupScalar::random(curve, rng);
  // multiples of 8 in [8, q): 8 * r with r in [1, floor((q - 1) / 8)]
  U256 q = detail::group_order(curve);
  U256 bound;  // floor((q-1)/8) + 1
  U256 qm1;
  detail::sub_raw(qm1, q, U256::from_u64(1));
  for (int i = 0; i < 4; ++i) {
    bound.w[i] = (qm1.w[i] >> 3) | (i < 3 ? qm1.w[i + 1] << 61 : 0);
  }
  detail::add_raw(bound, bound, U256::from_u64(1));
  U256 r = sample_below(rng, bound, 250);
  U256 v;
  for (int i = 3; i >= 0; --i) v.w[i] = (r.w[i] << 3) | (i > 0 ? r.w[i - 1] >> 61 : 0);
  return GroupScalar::from_bytes(curve, v.to_le_bytes());
}

// ---- GroupPoint ----

GroupPoint GroupPoint::generator(CurveId curve) {
  if (curve == CurveId::kP256) return p256_store({kP256Gx, kP256Gy, Fp256::one()});
  return ed_store(ed_from_affine(kEdGx, kEdGy));
}

GroupPoint GroupPoint::identity(CurveId curve) {
  if (curve == CurveId::kP256) return p256_store(p256_identity());
  return ed_store(ed_identity());
}

bool GroupPoint::is_identity() const {
  if (curve_ == CurveId::kP256) return p256_load(*this).z.is_zero();
  EdPoint p = ed_load(*this);
  return p.x.is_zero() && p.y == p.z;
}

GroupPoint GroupPoint::operator+(const GroupPoint& o) const {
  require_same_curve(curve_, o.curve_);
  if (curve_ == CurveId::kP256) return p256_store(p256_add(p256_load(*this), p256_load(o)));
  return ed_store(ed_add(ed_load(*this), ed_load(o)));
}

GroupPoint GroupPoint::operator-() const {
  if (curve_ == CurveId::kP256) {
    P256Point p = p256_load(*this);
    return p256_store({p.x, -p.y, p.z});
  }
  EdPoint p = ed_load(*this);
  return ed_store({-p.x, p.y, p.z, -p.t});
}

bool GroupPoint::operator==(const GroupPoint& o) const {
  if (curve_ != o.curve_) return false;
  if (curve_ == CurveId::kP256) {
    P256Point a = p256_load(*this), b = p256_load(o);
    return a.x * b.z == b.x * a.z && a.y * b.z == b.y * a.z;
  }
  EdPoint a = ed_load(*this), b = ed_load(o);
  return a.x * b.z == b.x * a.z && a.y * b.z == b.y * a.z;
}

GroupPoint point_add(const GroupPoint& p, const GroupPoint& q) { return p + q; }

GroupPoint point_mul_public(const GroupScalar& s, const GroupPoint& p) {
  require_same_curve(s.curve(), p.curve());
  return detail::mul_unreduced(s.value(), p);
}

GroupPoint point_mul(const GroupScalar& s, const GroupPoint& p) {
  require_same_curve(s.curve(), p.curve());
  if (p.curve() == CurveId::kP256) {
    return p256_store(window_mul(s.value(), p256_load(p), p256_identity(), p256_add,
                                 [](const P256Point& a) { return p256_add(a, a); }, p256_select));
  }
  return ed_store(window_mul(s.value(), ed_load(p), ed_identity(), ed_add, ed_double, ed_select));
}

// ---- encoding ----

ScalarBytes scalar_clamp(ByteSpan raw) {
  if (raw.size() != kScalarBytes) throw Error(ErrorCode::kInvalidArgument, "clamp input must be 32 bytes");
  ScalarBytes out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  out[0] &= 248;
  out[31] &= 127;
  out[31] |= 64;
  return out;
}

ScalarBytes to_x25519_u(const GroupPoint& p) {
  if (p.curve() != CurveId::kCurve25519) throw Error(ErrorCode::kCurveMismatch, "X25519 conversion needs Curve25519");
  EdPoint e = ed_load(p);
  if (e.x.is_zero()) throw Error(ErrorCode::kExceptionalPoint, "identity or order-2 point has no u-coordinate");
  Fe u = (e.z + e.y) * (e.z - e.y).inverse();
  return u.to_canonical().to_le_bytes();
}

std::uint8_t x25519_sign(const GroupPoint& p) {
  if (p.curve() != CurveId::kCurve25519) throw Error(ErrorCode::kCurveMismatch, "X25519 sign needs Curve25519");
  EdPoint e = ed_load(p);
  if (e.x.is_zero()) throw Error(ErrorCode::kExceptionalPoint, "identity or order-2 point has no v-coordinate");
  // v = c * u / x = c * (Z + Y) * Z / ((Z - Y) * X)
  Fe v = kMontScale * (e.z + e.y) * e.z * ((e.z - e.y) * e.x).inverse();
  return v.is_odd() ? 1 : 0;
}

GroupPoint from_x25519_u(ByteSpan u_bytes, std::uint8_t sign) {
  if (u_bytes.size() != 32) throw Error(ErrorCode::kInvalidEncoding, "u-coordinate must be 32 bytes");
  if (sign > 1) throw Error(ErrorCode::kInvalidEncoding, "sign byte must be 0 or 1");
  U256 uv = U256::from_le_bytes(std::span<const std::uint8_t, 32>(u_bytes.data(), 32));
  if (!detail::less_than(uv, k25519FieldMod.m)) throw Error(ErrorCode::kInvalidEncoding, "non-canonical u-coordinate");
  if (uv.is_zero()) throw Error(ErrorCode::kExceptionalPoint, "u = 0 is the order-2 point");
  Fe u = Fe::from_canonical(uv);
  Fe v2 = u * (u.square() + kMontA * u + Fe::one());
  Fe v;
  if (!fe_sqrt(v2, v)) throw Error(ErrorCode::kNotOnCurve, "u-coordinate is not on Curve25519");
  if ((v.is_odd() ? 1 : 0) != sign) v = -v;
  Fe x = kMontScale * u * v.inverse();
  Fe y = (u - Fe::one()) * (u + Fe::one()).inverse();
  return ed_store(ed_from_affine(x, y));
}

GroupPoint sanitize_point(const GroupPoint& p) {
  if (p.curve() == CurveId::kP256) return p;
  EdPoint e = ed_load(p);
  GroupPoint cleared = ed_store(ed_double(ed_double(ed_double(e))));
  static const GroupScalar kInvCofactor = GroupScalar::from_u64(CurveId::kCurve25519, 8).inverse();
  return point_mul(kInvCofactor, cleared);
}

bool in_prime_subgroup(const GroupPoint& p) {
  if (p.curve() == CurveId::kP256) return true;
  return detail::mul_unreduced(detail::group_order(p.curve()), p).is_identity();
}

EncodedPoint encode_point(const GroupPoint& p) {
  EncodedPoint out{};
  if (p.is_identity()) return out;
  if (p.curve() == CurveId::kP256) {
    auto xy = detail::affine(p);
    out[0] = xy[1].is_odd() ? 0x03 : 0x02;
    auto xb = xy[0].to_be_bytes();
    std::copy(xb.begin(), xb.end(), out.begin() + 1);
    return out;
  }
  auto u = to_x25519_u(p);
  std::copy(u.begin(), u.end(), out.begin());
  out[32] = x25519_sign(p);
  return out;
}

GroupPoint decode_point(ByteSpan bytes, CurveId curve, DecodeMode mode) {
  if (bytes.size() != kEncodedPointBytes) throw Error(ErrorCode::kInvalidEncoding, "encoded point must be 33 bytes");
  if (std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; })) {
    return GroupPoint::identity(curve);
  }
  if (curve == CurveId::kP256) {
    std::uint8_t prefix = bytes[0];
    if (prefix != 0x02 && prefix != 0x03) throw Error(ErrorCode::kInvalidEncoding, "bad SEC1 prefix");
    U256 xv = U256::from_be_bytes(std::span<const std::uint8_t, 32>(bytes.data() + 1, 32));
    if (!detail::less_than(xv, kP256FieldMod.m)) throw Error(ErrorCode::kInvalidEncoding, "non-canonical x");
    Fp256 x = Fp256::from_canonical(xv);
    Fp256 rhs = x.square() * x - (x + x + x) + kP256B;
    Fp256 y;
    if (!fp256_sqrt(rhs, y)) throw Error(ErrorCode::kNotOnCurve, "x is not on P-256");
    if (y.is_odd() != (prefix == 0x03)) y = -y;
    if (y.is_zero() && prefix == 0x03) throw Error(ErrorCode::kInvalidEncoding, "bad parity for y = 0");
    return p256_store({x, y, Fp256::one()});
  }
  GroupPoint p = from_x25519_u(bytes.first(32), bytes[32]);
  if (mode == DecodeMode::kSanitize) return sanitize_point(p);
  if (!in_prime_subgroup(p)) throw Error(ErrorCode::kLowOrderPoint, "point has a low-order component");
  return p;
}

}  // namespace tdh
