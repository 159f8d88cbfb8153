#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles/oracles.hpp"
#include "tdh/group.hpp"

namespace tdh {
namespace {

using detail::U256;

class GroupTest : public ::testing::TestWithParam<CurveId> {};

INSTANTIATE_TEST_SUITE_P(Curves, GroupTest, ::testing::Values(CurveId::kP256, CurveId::kCurve25519),
                         [](const auto& info) { return std::string(curve_name(info.param)); });

TEST_P(GroupTest, IdentityAndOrder) {
  CurveId c = GetParam();
  GroupPoint g = GroupPoint::generator(c);
  EXPECT_EQ(point_mul(GroupScalar::one(c), g), g);
  EXPECT_TRUE(point_mul(GroupScalar::zero(c), g).is_identity());
  // q reduces to zero as a scalar; the unreduced multiple lands on the identity too.
  auto q_bytes = detail::group_order(c).to_le_bytes();
  EXPECT_TRUE(point_mul(GroupScalar::from_bytes_reduced(c, q_bytes), g).is_identity());
  EXPECT_TRUE(detail::mul_unreduced(detail::group_order(c), g).is_identity());
  EXPECT_THROW(GroupScalar::from_bytes(c, q_bytes), Error);
}

TEST_P(GroupTest, AdditionLaws) {
  CurveId c = GetParam();
  SeededRng rng("add-laws");
  GroupPoint g = GroupPoint::generator(c);
  GroupPoint id = GroupPoint::identity(c);
  for (int i = 0; i < 20; ++i) {
    GroupPoint p = GroupScalar::random(c, rng) * g;
    GroupPoint q = GroupScalar::random(c, rng) * g;
    GroupPoint r = GroupScalar::random(c, rng) * g;
    EXPECT_EQ(p + id, p);
    EXPECT_TRUE((p + (-p)).is_identity());
    EXPECT_EQ(p + q, q + p);
    EXPECT_EQ((p + q) + r, p + (q + r));
  }
  EXPECT_EQ(g + g, point_mul(GroupScalar::from_u64(c, 2), g));
}

TEST_P(GroupTest, Distributivity) {
  CurveId c = GetParam();
  SeededRng rng("distributivity");
  GroupPoint g = GroupPoint::generator(c);
  for (int i = 0; i < 1000; ++i) {
    GroupScalar a = GroupScalar::random(c, rng);
    GroupScalar b = GroupScalar::random(c, rng);
    if (i % 2 == 0) {
      ASSERT_EQ((a + b) * g, a * g + b * g);
    } else {
      GroupPoint p = b * g;
      GroupPoint q = GroupScalar::from_u64(c, static_cast<std::uint64_t>(i)) * g;
      ASSERT_EQ(a * (p + q), a * p + a * q);
    }
  }
}

TEST_P(GroupTest, ScalarMulMatchesExternalLibrary) {
  CurveId c = GetParam();
  SeededRng rng("oracle-mul");
  GroupPoint g = GroupPoint::generator(c);
  for (int i = 0; i < 50; ++i) {
    GroupScalar k = GroupScalar::random(c, rng);
    GroupPoint kg = k * g;
    EXPECT_EQ(detail::affine(kg), oracle::base_mul(c, k.to_bytes()));
    GroupScalar m = GroupScalar::random(c, rng);
    EXPECT_EQ(detail::affine(m * kg), oracle::point_mul(c, m.to_bytes(), kg));
  }
}

TEST_P(GroupTest, ScalarFieldArithmetic) {
  CurveId c = GetParam();
  SeededRng rng("scalar-ops");
  for (int i = 0; i < 200; ++i) {
    GroupScalar a = GroupScalar::random(c, rng);
    GroupScalar b = GroupScalar::random(c, rng);
    EXPECT_EQ((a * b).to_bytes(), oracle::scalar_mul_mod(c, a.to_bytes(), b.to_bytes()));
    EXPECT_EQ((a + b).to_bytes(), oracle::scalar_sum(c, {a.to_bytes(), b.to_bytes()}));
    EXPECT_EQ(a * a.inverse(), GroupScalar::one(c));
    EXPECT_EQ(a - a, GroupScalar::zero(c));
    EXPECT_EQ(-a + a, GroupScalar::zero(c));
  }
  EXPECT_THROW(GroupScalar::zero(c).inverse(), Error);
}

TEST_P(GroupTest, EncodeDecodeRoundtrip) {
  CurveId c = GetParam();
  SeededRng rng("encoding");
  GroupPoint g = GroupPoint::generator(c);
  EXPECT_EQ(decode_point(encode_point(g), c), g);
  EXPECT_TRUE(decode_point(encode_point(GroupPoint::identity(c)), c).is_identity());
  std::set<EncodedPoint> seen;
  for (int i = 0; i < 100; ++i) {
    GroupPoint p = GroupScalar::random(c, rng) * g;
    EncodedPoint e = encode_point(p);
    EXPECT_EQ(decode_point(e, c), p);
    EXPECT_TRUE(seen.insert(e).second);
    EncodedPoint en = encode_point(-p);
    // negation only flips the sign carrier
    if (c == CurveId::kCurve25519) {
      EXPECT_TRUE(std::equal(e.begin(), e.begin() + 32, en.begin()));
      EXPECT_NE(e[32], en[32]);
    } else {
      EXPECT_TRUE(std::equal(e.begin() + 1, e.end(), en.begin() + 1));
      EXPECT_NE(e[0], en[0]);
    }
  }
}

TEST_P(GroupTest, DecodeRejectsMalformed) {
  CurveId c = GetParam();
  EncodedPoint e = encode_point(GroupPoint::generator(c));
  EXPECT_THROW(decode_point(ByteSpan(e.data(), 32), c), Error);
  if (c == CurveId::kCurve25519) {
    EncodedPoint bad_sign = e;
    bad_sign[32] = 2;
    EXPECT_THROW(decode_point(bad_sign, c), Error);
    // p itself is non-canonical
    EncodedPoint noncanon{};
    auto p = detail::field_prime(c).to_le_bytes();
    std::copy(p.begin(), p.end(), noncanon.begin());
    EXPECT_THROW(decode_point(noncanon, c), Error);
  } else {
    EncodedPoint bad_prefix = e;
    bad_prefix[0] = 0x04;
    EXPECT_THROW(decode_point(bad_prefix, c), Error);
  }
  // Find an x/u that is not on the curve.
  int rejected = 0;
  for (std::uint8_t v = 2; v < 40; ++v) {
    EncodedPoint probe{};
    if (c == CurveId::kCurve25519) {
      probe[0] = v;
    } else {
      probe[0] = 0x02;
      probe[32] = v;
    }
    try {
      decode_point(probe, c, DecodeMode::kSanitize);
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), ErrorCode::kNotOnCurve);
      ++rejected;
    }
  }
  EXPECT_GT(rejected, 5);
}

TEST_P(GroupTest, MixedCurveOperationsRejected) {
  CurveId c = GetParam();
  CurveId other = c == CurveId::kP256 ? CurveId::kCurve25519 : CurveId::kP256;
  EXPECT_THROW(GroupPoint::generator(c) + GroupPoint::generator(other), Error);
  EXPECT_THROW(point_mul(GroupScalar::one(other), GroupPoint::generator(c)), Error);
  EXPECT_THROW(GroupScalar::one(c) + GroupScalar::one(other), Error);
}

TEST(ScalarClamp, BitPatterns) {
  ScalarBytes zeros{};
  ScalarBytes out = scalar_clamp(zeros);
  for (int i = 0; i < 31; ++i) EXPECT_EQ(out[i], 0);
  EXPECT_EQ(out[31], 0x40);

  ScalarBytes ones;
  ones.fill(0xff);
  out = scalar_clamp(ones);
  EXPECT_EQ(out[0], 0xf8);
  for (int i = 1; i < 31; ++i) EXPECT_EQ(out[i], 0xff);
  EXPECT_EQ(out[31], 0x7f);

  SeededRng rng("clamp");
  for (int i = 0; i < 10000; ++i) {
    ScalarBytes raw;
    rng.fill(raw);
    ScalarBytes c = scalar_clamp(raw);
    ASSERT_EQ(c[0] & 7, 0);
    ASSERT_EQ(c[31] & 0x80, 0);
    ASSERT_EQ(c[31] & 0x40, 0x40);
    ASSERT_EQ(scalar_clamp(c), c);
  }
  EXPECT_THROW(scalar_clamp(Bytes(31)), Error);
}

TEST(ScalarRandom, RangeAndCofactorRule) {
  SeededRng rng("random-range");
  for (int i = 0; i < 200; ++i) {
    GroupScalar p = scalar_random(CurveId::kP256, rng);
    EXPECT_FALSE(p.is_zero());
    GroupScalar e = scalar_random(CurveId::kCurve25519, rng);
    EXPECT_FALSE(e.is_zero());
    EXPECT_EQ(e.to_bytes()[0] % 8, 0);
  }
  SeededRng a("fixed"), b("fixed");
  EXPECT_EQ(scalar_random(CurveId::kP256, a), scalar_random(CurveId::kP256, b));
}

TEST(ScalarRandom, NoRepeatsAndUniformBytes) {
  for (CurveId c : {CurveId::kP256, CurveId::kCurve25519}) {
    SeededRng rng("chi-square");
    std::set<ScalarBytes> seen;
    std::array<double, 256> counts{};
    double total = 0;
    for (int i = 0; i < 10000; ++i) {
      ScalarBytes s = scalar_random(c, rng).to_bytes();
      ASSERT_TRUE(seen.insert(s).second);
      // Middle bytes are unconstrained on both curves.
      for (int j = 1; j < 28; ++j) {
        counts[s[j]] += 1;
        total += 1;
      }
    }
    double expected = total / 256;
    double chi2 = 0;
    for (double n : counts) chi2 += (n - expected) * (n - expected) / expected;
    double df = 255;
    EXPECT_LT(std::abs(chi2 - df), 3 * std::sqrt(2 * df)) << curve_name(c);
  }
}

TEST(X25519, PublicKeysMatchReferenceImplementation) {
  SeededRng rng("x25519-interop");
  GroupPoint g = GroupPoint::generator(CurveId::kCurve25519);
  for (int i = 0; i < 100; ++i) {
    ScalarBytes raw;
    rng.fill(raw);
    ScalarBytes k = scalar_clamp(raw);
    GroupPoint kg = GroupScalar::from_bytes_reduced(CurveId::kCurve25519, k) * g;
    ASSERT_EQ(to_x25519_u(kg), oracle::x25519_public(k));
  }
  ScalarBytes nine{};
  nine[0] = 9;
  EXPECT_EQ(to_x25519_u(g), nine);
}

TEST(X25519, ConversionRoundtripAndExceptions) {
  SeededRng rng("x25519-roundtrip");
  GroupPoint g = GroupPoint::generator(CurveId::kCurve25519);
  for (int i = 0; i < 50; ++i) {
    GroupPoint p = GroupScalar::random(CurveId::kCurve25519, rng) * g;
    EXPECT_EQ(from_x25519_u(to_x25519_u(p), x25519_sign(p)), p);
  }
  try {
    to_x25519_u(GroupPoint::identity(CurveId::kCurve25519));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExceptionalPoint);
  }
  GroupPoint order2 = detail::ed25519_from_affine(U256{}, [] {
    U256 pm1;
    detail::sub_raw(pm1, detail::field_prime(CurveId::kCurve25519), U256::from_u64(1));
    return pm1;
  }());
  EXPECT_THROW(to_x25519_u(order2), Error);
  EXPECT_THROW(to_x25519_u(GroupPoint::generator(CurveId::kP256)), Error);
  EXPECT_THROW(from_x25519_u(ScalarBytes{}, 0), Error);
}

// All eight points of order dividing 8, derived from a random full-order point.
std::vector<GroupPoint> torsion_points() {
  SeededRng rng("torsion");
  const U256 q = detail::group_order(CurveId::kCurve25519);
  for (;;) {
    ScalarBytes u;
    rng.fill(u);
    u[31] &= 0x7f;
    GroupPoint p = GroupPoint::identity(CurveId::kCurve25519);
    try {
      p = from_x25519_u(u, 0);
    } catch (const Error&) {
      continue;
    }
    GroupPoint t = detail::mul_unreduced(q, p);
    GroupPoint t4 = t + t;
    t4 = t4 + t4;
    if (t4.is_identity()) continue;
    std::vector<GroupPoint> out;
    GroupPoint acc = GroupPoint::identity(CurveId::kCurve25519);
    for (int i = 0; i < 8; ++i) {
      out.push_back(acc);
      acc = acc + t;
    }
    return out;
  }
}

TEST(Sanitize, StripsEveryLowOrderComponent) {
  auto torsion = torsion_points();
  ASSERT_EQ(torsion.size(), 8u);
  std::set<EncodedPoint> distinct;
  for (const auto& l : torsion) {
    distinct.insert([&] {
      auto xy = detail::affine(l);
      EncodedPoint e{};
      auto xb = xy[0].to_le_bytes();
      auto yb = xy[1].to_le_bytes();
      std::copy(xb.begin(), xb.end(), e.begin());
      e[32] = yb[0];
      return e;
    }());
  }
  EXPECT_EQ(distinct.size(), 8u);
  GroupPoint g = GroupPoint::generator(CurveId::kCurve25519);
  for (const auto& l : torsion) {
    EXPECT_EQ(sanitize_point(g + l), g);
    EXPECT_TRUE(sanitize_point(l).is_identity());
    EXPECT_FALSE(in_prime_subgroup(g + l) && !l.is_identity());
  }
  SeededRng rng("p256-sanitize");
  GroupPoint p = GroupScalar::random(CurveId::kP256, rng) * GroupPoint::generator(CurveId::kP256);
  EXPECT_EQ(sanitize_point(p), p);
}

TEST(Sanitize, StrictDecodeRejectsLowOrderU) {
  auto torsion = torsion_points();
  int checked = 0;
  for (const auto& l : torsion) {
    ScalarBytes u;
    std::uint8_t sign;
    try {
      u = to_x25519_u(l);
      sign = x25519_sign(l);
    } catch (const Error&) {
      continue;  // identity, order-2
    }
    EncodedPoint e{};
    std::copy(u.begin(), u.end(), e.begin());
    e[32] = sign;
    try {
      decode_point(e, CurveId::kCurve25519);
      FAIL() << "low-order point accepted";
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), ErrorCode::kLowOrderPoint);
    }
    EXPECT_TRUE(decode_point(e, CurveId::kCurve25519, DecodeMode::kSanitize).is_identity());
    ++checked;
  }
  EXPECT_EQ(checked, 6);
  GroupPoint g = GroupPoint::generator(CurveId::kCurve25519);
  GroupPoint mixed = g + torsion[3];
  EncodedPoint e = encode_point(mixed);
  EXPECT_THROW(decode_point(e, CurveId::kCurve25519), Error);
  EXPECT_EQ(decode_point(e, CurveId::kCurve25519, DecodeMode::kSanitize), g);
}

}  // namespace
}  // namespace tdh
