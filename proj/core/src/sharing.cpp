#include "tdh/sharing.hpp"

#include <algorithm>
#include <set>

namespace tdh {

namespace {

void require_distinct(const std::vector<PartyId>& parties) {
  std::set<PartyId> seen;
  for (PartyId p : parties) {
    if (p.value == 0) throw Error(ErrorCode::kInvalidArgument, "party id 0 is reserved");
    if (!seen.insert(p).second) throw Error(ErrorCode::kInvalidArgument, "duplicate party id");
  }
}

}  // namespace

AdditiveShares additive_split(const GroupScalar& secret, const std::vector<PartyId>& parties, Rng& rng) {
  if (parties.empty()) throw Error(ErrorCode::kInvalidArgument, "additive split needs at least one party");
  require_distinct(parties);
  AdditiveShares out;
  GroupScalar rest = secret;
  for (std::size_t i = 0; i + 1 < parties.size(); ++i) {
    GroupScalar z = GroupScalar::random(secret.curve(), rng);
    out.emplace(parties[i], z);
    rest = rest - z;
  }
  out.emplace(parties.back(), rest);
  return out;
}

ShamirDealing shamir_share(const GroupScalar& secret, std::uint16_t t, const std::vector<PartyId>& parties, Rng& rng) {
  if (t >= parties.size()) throw Error(ErrorCode::kInvalidArgument, "threshold must be below the committee size");
  require_distinct(parties);
  CurveId curve = secret.curve();
  std::vector<GroupScalar> coeffs{secret};
  for (std::uint16_t j = 1; j <= t; ++j) coeffs.push_back(GroupScalar::random(curve, rng));

  ShamirDealing out;
  GroupPoint g = GroupPoint::generator(curve);
  for (const auto& a : coeffs) out.commitments.push_back(a * g);
  for (PartyId p : parties) {
    GroupScalar x = GroupScalar::from_u64(curve, p.value);
    GroupScalar y = GroupScalar::zero(curve);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) y = y * x + *it;
    out.shares.emplace(p, ShamirShare{p, y, t, static_cast<std::uint16_t>(parties.size())});
  }
  return out;
}

GroupPoint feldman_eval(const FeldmanCommitments& comms, PartyId id) {
  if (comms.empty()) throw Error(ErrorCode::kInvalidArgument, "empty Feldman commitments");
  CurveId curve = comms.front().curve();
  GroupScalar x = GroupScalar::from_u64(curve, id.value);
  GroupPoint acc = GroupPoint::identity(curve);
  for (auto it = comms.rbegin(); it != comms.rend(); ++it) acc = point_mul_public(x, acc) + *it;
  return acc;
}

bool feldman_verify(const ShamirShare& share, const FeldmanCommitments& comms) {
  if (comms.size() != static_cast<std::size_t>(share.t) + 1) return false;
  if (comms.front().curve() != share.value.curve()) return false;
  return share.value * GroupPoint::generator(share.value.curve()) == feldman_eval(comms, share.owner);
}

GroupScalar lagrange_coeff(CurveId curve, const std::vector<PartyId>& subset, PartyId i) {
  require_distinct(subset);
  if (std::find(subset.begin(), subset.end(), i) == subset.end()) {
    throw Error(ErrorCode::kInvalidArgument, "party not in interpolation subset");
  }
  GroupScalar num = GroupScalar::one(curve);
  GroupScalar den = GroupScalar::one(curve);
  GroupScalar xi = GroupScalar::from_u64(curve, i.value);
  for (PartyId j : subset) {
    if (j == i) continue;
    GroupScalar xj = GroupScalar::from_u64(curve, j.value);
    num *= xj;
    den *= xj - xi;
  }
  return num * den.inverse();
}

GroupScalar reconstruct(const std::vector<ShamirShare>& shares) {
  if (shares.empty()) throw Error(ErrorCode::kInvalidArgument, "no shares");
  if (shares.size() < static_cast<std::size_t>(shares.front().t) + 1) {
    throw Error(ErrorCode::kInvalidArgument, "insufficient shares to reconstruct");
  }
  CurveId curve = shares.front().value.curve();
  std::vector<PartyId> ids;
  for (const auto& s : shares) ids.push_back(s.owner);
  GroupScalar acc = GroupScalar::zero(curve);
  for (const auto& s : shares) acc += lagrange_coeff(curve, ids, s.owner) * s.value;
  return acc;
}

Bytes serialize(const ShamirShare& share) {
  return ByteWriter().u32(share.owner.value).raw(share.value.to_bytes()).u16(share.t).u16(share.n).bytes();
}

ShamirShare parse_shamir_share(ByteSpan bytes, CurveId curve) {
  ByteReader r(bytes);
  ShamirShare s{PartyId{r.u32()}, GroupScalar::from_bytes(curve, r.raw(32)), 0, 0};
  s.t = r.u16();
  s.n = r.u16();
  r.expect_done();
  if (s.t >= s.n) throw Error(ErrorCode::kInvalidEncoding, "share with t >= n");
  return s;
}

Bytes serialize(const FeldmanCommitments& comms) {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(comms.size()));
  for (const auto& c : comms) w.raw(encode_point(c));
  return std::move(w).take();
}

FeldmanCommitments parse_feldman_commitments(ByteSpan bytes, CurveId curve, DecodeMode mode) {
  ByteReader r(bytes);
  std::uint16_t count = r.u16();
  FeldmanCommitments out;
  for (std::uint16_t i = 0; i < count; ++i) out.push_back(decode_point(r.raw(kEncodedPointBytes), curve, mode));
  r.expect_done();
  if (out.empty()) throw Error(ErrorCode::kInvalidEncoding, "empty commitment vector");
  return out;
}

}  // namespace tdh
