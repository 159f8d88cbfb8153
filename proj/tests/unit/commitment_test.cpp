#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "tdh/commitment.hpp"

namespace tdh {
namespace {

TEST(Commitment, OpensToMessage) {
  SeededRng rng("commit-open");
  Bytes m = to_bytes("public share bytes");
  auto [c, d] = commit(CommitDomain::kKeygen, m, rng);
  EXPECT_EQ(open(CommitDomain::kKeygen, c, d), m);

  auto [ce, de] = commit(CommitDomain::kExchange, Bytes{}, rng);
  EXPECT_TRUE(open(CommitDomain::kExchange, ce, de).empty());
}

TEST(Commitment, FreshNonceEveryTime) {
  SeededRng rng("commit-fresh");
  Bytes m = to_bytes("same message");
  std::set<Digest> seen;
  for (int i = 0; i < 1000; ++i) {
    auto [c, d] = commit(CommitDomain::kKeygen, m, rng);
    EXPECT_TRUE(seen.insert(c.c).second);
  }
}

TEST(Commitment, DomainSeparation) {
  SeededRng rng("commit-domain");
  auto [c, d] = commit(CommitDomain::kKeygen, to_bytes("x"), rng);
  EXPECT_THROW(open(CommitDomain::kExchange, c, d), Error);
  EXPECT_THROW(open(CommitDomain::kReshare, c, d), Error);
}

TEST(Commitment, EveryBitFlipIsRejected) {
  SeededRng rng("commit-flip");
  Bytes m = to_bytes("abc");
  auto [c, d] = commit(CommitDomain::kReshare, m, rng);
  for (std::size_t byte = 0; byte < d.nonce.size(); ++byte) {
    for (int bit = 0; bit < 8; ++bit) {
      Decommitment bad = d;
      bad.nonce[byte] ^= static_cast<std::uint8_t>(1 << bit);
      try {
        open(CommitDomain::kReshare, c, bad);
        FAIL();
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kCommitmentMismatch);
      }
    }
  }
  for (std::size_t byte = 0; byte < m.size(); ++byte) {
    for (int bit = 0; bit < 8; ++bit) {
      Decommitment bad = d;
      bad.message[byte] ^= static_cast<std::uint8_t>(1 << bit);
      EXPECT_THROW(open(CommitDomain::kReshare, c, bad), Error);
    }
  }
}

TEST(Commitment, TruncatedMessagesRejected) {
  SeededRng rng("commit-trunc");
  for (int i = 0; i < 100; ++i) {
    Bytes m(1 + rng.next_u64() % 200);
    rng.fill(m);
    auto [c, d] = commit(CommitDomain::kExchange, m, rng);
    Decommitment bad = d;
    bad.message.resize(rng.next_u64() % m.size());
    EXPECT_THROW(open(CommitDomain::kExchange, c, bad), Error);
  }
}

TEST(Commitment, BindingAcrossRandomTrials) {
  // No decommitment to a different message opens a fixed commitment.
  SeededRng rng("commit-binding");
  auto [c, d] = commit(CommitDomain::kKeygen, to_bytes("target"), rng);
  for (int i = 0; i < 100000; ++i) {
    Decommitment other;
    rng.fill(other.nonce);
    other.message = to_bytes(std::to_string(i));
    ASSERT_THROW(open(CommitDomain::kKeygen, c, other), Error);
  }
}

TEST(Commitment, HidingByteFrequencies) {
  // Commitments to two fixed messages have statistically indistinguishable byte histograms.
  SeededRng rng("commit-hiding");
  std::array<std::array<double, 256>, 2> hist{};
  for (int m = 0; m < 2; ++m) {
    Bytes msg = to_bytes(m == 0 ? "zero" : "one");
    for (int i = 0; i < 10000; ++i) {
      auto [c, d] = commit(CommitDomain::kKeygen, msg, rng);
      for (auto b : c.c) hist[m][b] += 1;
    }
  }
  // Two-sample chi-square, 255 degrees of freedom.
  double chi2 = 0;
  for (int b = 0; b < 256; ++b) {
    double s = hist[0][b] + hist[1][b];
    if (s > 0) chi2 += (hist[0][b] - hist[1][b]) * (hist[0][b] - hist[1][b]) / s;
  }
  EXPECT_LT(chi2, 255 + 3 * std::sqrt(2 * 255.0));
}

TEST(Commitment, WireLayout) {
  SeededRng rng("commit-wire");
  auto [c, d] = commit(CommitDomain::kKeygen, to_bytes("hello"), rng);
  Bytes dc = serialize(d);
  EXPECT_EQ(dc.size(), 32u + 4u + 5u);
  Decommitment back = parse_decommitment(dc);
  EXPECT_EQ(open(CommitDomain::kKeygen, parse_commitment(serialize(c)), back), to_bytes("hello"));
  dc.pop_back();
  EXPECT_THROW(parse_decommitment(dc), Error);
}

}  // namespace
}  // namespace tdh
