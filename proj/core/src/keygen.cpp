#include <set>

#include "round_protocol.hpp"
#include "tdh/commitment.hpp"

namespace tdh {
namespace {

std::vector<std::uint32_t> party_senders(std::uint16_t n) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 1; i <= n; ++i) out.push_back(i);
  return out;
}

class NaiveKeygen final : public RoundProtocol {
 public:
  NaiveKeygen(const KeygenConfig& cfg, std::unique_ptr<Rng> rng)
      : RoundProtocol(cfg.session, ProtocolId::kNaiveKeygen, cfg.self.value, party_senders(cfg.params.n), 2,
                      std::move(rng)),
        params_(cfg.params) {}

  std::vector<Expectation> expected(std::uint8_t round) const override {
    return broadcasts_from(participants(), round == 1 ? PayloadKind::kCommit : PayloadKind::kDecommit);
  }

  std::vector<ProtocolEnvelope> begin() override {
    x_ = scalar_random(params_.curve, rng());
    EncodedPoint mine = encode_point(*x_ * GroupPoint::generator(params_.curve));
    auto [c, d] = commit(CommitDomain::kKeygen, mine, rng());
    decommit_ = std::move(d);
    return {broadcast(1, PayloadKind::kCommit, serialize(c))};
  }

  Outcome process(std::uint8_t round, const Inbox& inbox) override {
    if (round == 1) {
      for (auto j : participants()) commits_.emplace(j, parse_commitment(inbox.body(j, PayloadKind::kCommit)));
      Outcome out;
      out.outgoing.push_back(broadcast(2, PayloadKind::kDecommit, serialize(*decommit_)));
      secure_zero(decommit_->nonce);
      return out;
    }
    GroupPoint key = GroupPoint::identity(params_.curve);
    std::map<PartyId, GroupPoint> shares;
    for (auto j : participants()) {
      Bytes msg = open(CommitDomain::kKeygen, commits_.at(j), parse_decommitment(inbox.body(j, PayloadKind::kDecommit)));
      GroupPoint xj = decode_point(msg, params_.curve, DecodeMode::kSanitize);
      if (xj.is_identity()) throw Error(ErrorCode::kProtocolFailure, "identity public share");
      key += xj;
      shares.emplace(PartyId{j}, xj);
    }
    GroupPoint mine = shares.at(PartyId{self()});
    if (!(*x_ * GroupPoint::generator(params_.curve) == mine)) {
      throw Error(ErrorCode::kProtocolFailure, "own decommitment was altered");
    }
    if (key.is_identity()) throw Error(ErrorCode::kProtocolFailure, "aggregate key is the identity");
    Outcome out;
    out.output = SessionOutput{key, KeyShareRecord{params_, PartyId{self()}, *x_, mine, key, {}, std::move(shares)},
                               std::nullopt};
    return out;
  }

 private:
  SchemeParams params_;
  std::optional<GroupScalar> x_;
  std::optional<Decommitment> decommit_;
  std::map<std::uint32_t, Commitment> commits_;
};

class ThresholdKeygen final : public RoundProtocol {
 public:
  ThresholdKeygen(const KeygenConfig& cfg, std::unique_ptr<Rng> rng)
      : RoundProtocol(cfg.session, ProtocolId::kThresholdKeygen, cfg.self.value, party_senders(cfg.params.n), 3,
                      std::move(rng)),
        params_(cfg.params) {}

  std::vector<Expectation> expected(std::uint8_t round) const override {
    switch (round) {
      case 1:
        return broadcasts_from(participants(), PayloadKind::kCommit);
      case 2: {
        auto out = broadcasts_from(participants(), PayloadKind::kDecommit);
        auto pk = broadcasts_from(participants(), PayloadKind::kPubkey);
        out.insert(out.end(), pk.begin(), pk.end());
        for (auto j : participants()) {
          if (j != self()) out.push_back({j, PayloadKind::kVssShare, true});
        }
        return out;
      }
      default:
        return broadcasts_from(participants(), PayloadKind::kAck);
    }
  }

  std::vector<ProtocolEnvelope> begin() override {
    GroupScalar y = scalar_random(params_.curve, rng());
    dealing_ = shamir_share(y, params_.t, committee_ids(params_.n), rng());
    auto [c, d] = commit(CommitDomain::kKeygen, encode_point(dealing_->commitments.front()), rng());
    decommit_ = std::move(d);
    return {broadcast(1, PayloadKind::kCommit, serialize(c))};
  }

  Outcome process(std::uint8_t round, const Inbox& inbox) override {
    if (round == 1) return after_commits(inbox);
    if (round == 2) return after_shares(inbox);
    return after_acks(inbox);
  }

 private:
  Outcome after_commits(const Inbox& inbox) {
    for (auto j : participants()) commits_.emplace(j, parse_commitment(inbox.body(j, PayloadKind::kCommit)));
    Outcome out;
    out.outgoing.push_back(broadcast(2, PayloadKind::kDecommit, serialize(*decommit_)));
    out.outgoing.push_back(broadcast(2, PayloadKind::kPubkey, serialize(dealing_->commitments)));
    for (auto j : participants()) {
      if (j == self()) continue;
      out.outgoing.push_back(p2p(2, PayloadKind::kVssShare, j, serialize(dealing_->shares.at(PartyId{j}))));
    }
    secure_zero(decommit_->nonce);
    return out;
  }

  Outcome after_shares(const Inbox& inbox) {
    const CurveId curve = params_.curve;
    GroupPoint key = GroupPoint::identity(curve);
    FeldmanCommitments combined(static_cast<std::size_t>(params_.t) + 1, GroupPoint::identity(curve));
    GroupScalar x = GroupScalar::zero(curve);
    for (auto j : participants()) {
      Bytes msg = open(CommitDomain::kKeygen, commits_.at(j), parse_decommitment(inbox.body(j, PayloadKind::kDecommit)));
      GroupPoint yj = decode_point(msg, curve, DecodeMode::kSanitize);
      FeldmanCommitments comms = parse_feldman_commitments(inbox.body(j, PayloadKind::kPubkey), curve);
      if (comms.size() != combined.size()) throw Error(ErrorCode::kFeldmanReject, "commitment vector has wrong length");
      if (!(comms.front() == yj)) throw Error(ErrorCode::kFeldmanReject, "commitments do not match decommitted value");
      ShamirShare share = j == self() ? dealing_->shares.at(PartyId{self()})
                                      : parse_shamir_share(inbox.body(j, PayloadKind::kVssShare), curve);
      if (share.owner.value != self() || share.t != params_.t || share.n != params_.n) {
        throw Error(ErrorCode::kFeldmanReject, "share addressed to another party");
      }
      if (!feldman_verify(share, comms)) throw Error(ErrorCode::kFeldmanReject, "share fails Feldman verification");
      x += share.value;
      key += yj;
      for (std::size_t k = 0; k < combined.size(); ++k) combined[k] += comms[k];
    }
    dealing_.reset();
    if (key.is_identity()) throw Error(ErrorCode::kProtocolFailure, "aggregate key is the identity");
    x_ = x;
    key_ = key;
    combined_ = std::move(combined);
    GroupPoint mine = x * GroupPoint::generator(curve);
    ByteWriter w;
    w.raw(encode_point(key)).raw(encode_point(mine));
    Outcome out;
    out.outgoing.push_back(broadcast(3, PayloadKind::kAck, std::move(w).take()));
    return out;
  }

  Outcome after_acks(const Inbox& inbox) {
    std::map<PartyId, GroupPoint> shares;
    for (auto j : participants()) {
      ByteReader r(inbox.body(j, PayloadKind::kAck));
      GroupPoint key = read_point(r, params_.curve);
      GroupPoint xj = read_point(r, params_.curve);
      r.expect_done();
      if (!(key == *key_)) throw Error(ErrorCode::kProtocolFailure, "parties disagree on the public key");
      GroupPoint expected = feldman_eval(combined_, PartyId{j});
      if (!(xj == expected)) throw Error(ErrorCode::kFeldmanReject, "confirmed public share is inconsistent");
      shares.emplace(PartyId{j}, expected);
    }
    GroupPoint mine = shares.at(PartyId{self()});
    Outcome out;
    out.output = SessionOutput{*key_,
                               KeyShareRecord{params_, PartyId{self()}, *x_, mine, *key_, combined_, std::move(shares)},
                               std::nullopt};
    return out;
  }

  SchemeParams params_;
  std::optional<ShamirDealing> dealing_;
  std::optional<Decommitment> decommit_;
  std::map<std::uint32_t, Commitment> commits_;
  std::optional<GroupScalar> x_;
  std::optional<GroupPoint> key_;
  FeldmanCommitments combined_;
};

}  // namespace

std::unique_ptr<RoundProtocol> make_keygen_protocol(const KeygenConfig& cfg, std::unique_ptr<Rng> rng) {
  cfg.params.validate();
  if (cfg.self.value == 0 || cfg.self.value > cfg.params.n) {
    throw Error(ErrorCode::kPreconditionViolation, "party id outside the committee");
  }
  if (cfg.params.scheme == Scheme::kNaive) return std::make_unique<NaiveKeygen>(cfg, std::move(rng));
  return std::make_unique<ThresholdKeygen>(cfg, std::move(rng));
}

}  // namespace tdh
