#pragma once

// Additive and Shamir secret sharing over Z_q, Feldman verification and
// Lagrange interpolation at zero. Party i evaluates the polynomial at x = i.

#include <compare>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tdh/group.hpp"

namespace tdh {

struct PartyId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const PartyId&) const = default;
};

using AdditiveShares = std::map<PartyId, GroupScalar>;

struct ShamirShare {
  PartyId owner;
  GroupScalar value;
  std::uint16_t t = 0;
  std::uint16_t n = 0;
};

// Coefficient commitments [a_0 G, ..., a_t G].
using FeldmanCommitments = std::vector<GroupPoint>;

// Uniform shares subject to sum == secret.
AdditiveShares additive_split(const GroupScalar& secret, const std::vector<PartyId>& parties, Rng& rng);

struct ShamirDealing {
  std::map<PartyId, ShamirShare> shares;
  FeldmanCommitments commitments;
};

ShamirDealing shamir_share(const GroupScalar& secret, std::uint16_t t, const std::vector<PartyId>& parties, Rng& rng);

// sum_j id^j * comms[j]; the public image of party `id`'s share.
GroupPoint feldman_eval(const FeldmanCommitments& comms, PartyId id);
bool feldman_verify(const ShamirShare& share, const FeldmanCommitments& comms);

// Interpolation weight of `i` at zero for the given subset.
GroupScalar lagrange_coeff(CurveId curve, const std::vector<PartyId>& subset, PartyId i);

// Test/oracle use only: interpolates the secret from t+1 shares.
GroupScalar reconstruct(const std::vector<ShamirShare>& shares);

// id: u32 BE || value: 32-byte LE scalar || t: u16 BE || n: u16 BE
Bytes serialize(const ShamirShare& share);
ShamirShare parse_shamir_share(ByteSpan bytes, CurveId curve);

Bytes serialize(const FeldmanCommitments& comms);
FeldmanCommitments parse_feldman_commitments(ByteSpan bytes, CurveId curve, DecodeMode mode = DecodeMode::kSanitize);

}  // namespace tdh
