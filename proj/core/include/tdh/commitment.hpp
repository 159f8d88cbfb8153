#pragma once

// Hash commitments: C = SHA-256(tag || nonce || message) with a fresh
// 32-byte nonce. The tag separates keygen, exchange and reshare rounds so a
// commitment from one protocol cannot be opened inside another.

#include <array>
#include <string_view>
#include <utility>

#include "tdh/bytes.hpp"
#include "tdh/hash.hpp"
#include "tdh/rng.hpp"

namespace tdh {

enum class CommitDomain : std::uint8_t { kKeygen, kExchange, kReshare };

std::string_view commit_domain_tag(CommitDomain domain);  // "KGC", "EXC", "RSC"

struct Commitment {
  Digest c{};
  // Constant-time comparison.
  bool operator==(const Commitment& o) const { return constant_time_equal(c, o.c); }
};

struct Decommitment {
  Bytes message;
  std::array<std::uint8_t, 32> nonce{};
};

std::pair<Commitment, Decommitment> commit(CommitDomain domain, ByteSpan message, Rng& rng);

// Returns the committed message; throws Error(kCommitmentMismatch) otherwise.
Bytes open(CommitDomain domain, const Commitment& c, const Decommitment& d);

// Wire layouts: commitment = c(32); decommitment = nonce(32) || u32 len || message.
Bytes serialize(const Commitment& c);
Commitment parse_commitment(ByteSpan bytes);
Bytes serialize(const Decommitment& d);
Decommitment parse_decommitment(ByteSpan bytes);

}  // namespace tdh
