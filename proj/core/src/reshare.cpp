#include <algorithm>
#include <set>

#include "round_protocol.hpp"

namespace tdh {
namespace {

std::vector<std::uint32_t> reshare_senders(const ReshareConfig& cfg) {
  auto out = as_senders(cfg.old_subset);
  auto fresh = as_senders(committee_ids(cfg.new_params.n), true);
  out.insert(out.end(), fresh.begin(), fresh.end());
  return out;
}

class Reshare final : public RoundProtocol {
 public:
  Reshare(const ReshareConfig& cfg, const KeyShareRecord* old_share, std::optional<PartyId> new_self,
          std::unique_ptr<Rng> rng)
      : RoundProtocol(cfg.session,
                      cfg.old_params.scheme == Scheme::kNaive ? ProtocolId::kNaiveReshare
                                                              : ProtocolId::kThresholdReshare,
                      old_share ? old_role(old_share->self.value) : new_role(new_self->value), reshare_senders(cfg), 4,
                      std::move(rng)),
        cfg_(cfg),
        curve_(cfg.new_params.curve),
        naive_(cfg.old_params.scheme == Scheme::kNaive),
        new_ids_(committee_ids(cfg.new_params.n)) {
    if (old_share) old_.emplace(*old_share);
    if (new_self) new_self_ = *new_self;
  }

  std::vector<Expectation> expected(std::uint8_t round) const override {
    switch (round) {
      case 1:
        return broadcasts_from(as_senders(cfg_.old_subset), PayloadKind::kPubkey);
      case 3: {
        std::vector<Expectation> out;
        if (is_new()) {
          for (auto s : as_senders(cfg_.old_subset)) out.push_back({s, PayloadKind::kVssShare, true});
        }
        return out;
      }
      default:
        return broadcasts_from(as_senders(new_ids_, true), PayloadKind::kAck);
    }
  }

  std::vector<ProtocolEnvelope> begin() override {
    if (is_new()) return {};
    const auto& rec = *old_;
    ByteWriter w;
    w.raw(encode_point(rec.public_key));
    GroupPoint g = GroupPoint::generator(curve_);
    if (naive_) {
      AdditiveShares z = additive_split(rec.private_share, new_ids_, rng());
      w.u16(static_cast<std::uint16_t>(new_ids_.size()));
      for (const auto& [j, zj] : z) {
        w.u32(j.value).raw(encode_point(zj * g));
        outgoing_shares_.emplace(j, ShamirShare{j, zj, cfg_.new_params.t, cfg_.new_params.n});
      }
    } else {
      GroupScalar w_i = lagrange_coeff(curve_, cfg_.old_subset, rec.self) * rec.private_share;
      ShamirDealing dealing = shamir_share(w_i, cfg_.new_params.t, new_ids_, rng());
      w.raw(serialize(dealing.commitments));
      outgoing_shares_ = std::move(dealing.shares);
    }
    return {broadcast(1, PayloadKind::kPubkey, std::move(w).take())};
  }

  Outcome process(std::uint8_t round, const Inbox& inbox) override {
    Outcome out;
    switch (round) {
      case 1:
        read_dealings(inbox);
        if (is_new()) out.outgoing.push_back(broadcast(2, PayloadKind::kAck, {}));
        break;
      case 2:
        if (!is_new()) {
          for (auto& [j, share] : outgoing_shares_) {
            out.outgoing.push_back(p2p(3, PayloadKind::kVssShare, new_role(j.value), serialize(share)));
            share.value = GroupScalar::zero(curve_);
          }
          outgoing_shares_.clear();
        }
        break;
      case 3:
        if (is_new()) out.outgoing.push_back(collect_shares(inbox));
        break;
      default:
        out.output = confirm(inbox);
        break;
    }
    return out;
  }

 private:
  bool is_new() const { return new_self_.has_value(); }

  void read_dealings(const Inbox& inbox) {
    GroupPoint total = GroupPoint::identity(curve_);
    std::vector<FeldmanCommitments> all_comms;
    std::map<PartyId, GroupPoint> images;
    for (auto j : new_ids_) images.emplace(j, GroupPoint::identity(curve_));
    for (auto k : cfg_.old_subset) {
      ByteReader r(inbox.body(old_role(k.value), PayloadKind::kPubkey));
      GroupPoint reported = read_point(r, curve_);
      if (!key_) key_ = reported;
      if (!(reported == *key_)) throw Error(ErrorCode::kProtocolFailure, "old parties disagree on the public key");
      GroupPoint contributed = GroupPoint::identity(curve_);
      if (naive_) {
        if (r.u16() != new_ids_.size()) throw Error(ErrorCode::kFeldmanReject, "wrong number of share images");
        for (auto j : new_ids_) {
          if (r.u32() != j.value) throw Error(ErrorCode::kFeldmanReject, "share images out of order");
          GroupPoint zj = read_point(r, curve_);
          images.at(j) += zj;
          contributed += zj;
          share_images_.insert_or_assign({k.value, j.value}, zj);
        }
        r.expect_done();
      } else {
        FeldmanCommitments comms = parse_feldman_commitments(r.raw(r.remaining()), curve_);
        if (comms.size() != static_cast<std::size_t>(cfg_.new_params.t) + 1) {
          throw Error(ErrorCode::kFeldmanReject, "commitment vector has wrong length");
        }
        contributed = comms.front();
        dealer_comms_.emplace(k.value, comms);
        all_comms.push_back(std::move(comms));
      }
      if (old_) {
        auto it = old_->public_shares.find(k);
        if (it == old_->public_shares.end()) throw Error(ErrorCode::kPreconditionViolation, "no public share for dealer");
        GroupPoint expected = naive_ ? it->second : point_mul_public(lagrange_coeff(curve_, cfg_.old_subset, k), it->second);
        if (!(contributed == expected)) throw Error(ErrorCode::kFeldmanReject, "dealing does not match dealer's share");
      }
      total += contributed;
    }
    if (!(total == *key_)) throw Error(ErrorCode::kFeldmanReject, "dealings do not sum to the public key");
    if (old_ && !(*key_ == old_->public_key)) throw Error(ErrorCode::kProtocolFailure, "unexpected public key");
    if (cfg_.expected_public_key && !(*key_ == *cfg_.expected_public_key)) {
      throw Error(ErrorCode::kProtocolFailure, "public key differs from the registered key");
    }
    if (!naive_) {
      combined_.assign(static_cast<std::size_t>(cfg_.new_params.t) + 1, GroupPoint::identity(curve_));
      for (const auto& comms : all_comms) {
        for (std::size_t i = 0; i < comms.size(); ++i) combined_[i] += comms[i];
      }
      for (auto j : new_ids_) images.at(j) = feldman_eval(combined_, j);
    }
    new_images_ = std::move(images);
  }

  ProtocolEnvelope collect_shares(const Inbox& inbox) {
    GroupScalar x = GroupScalar::zero(curve_);
    GroupPoint g = GroupPoint::generator(curve_);
    for (auto k : cfg_.old_subset) {
      ShamirShare share = parse_shamir_share(inbox.body(old_role(k.value), PayloadKind::kVssShare), curve_);
      if (share.owner != *new_self_ || share.t != cfg_.new_params.t || share.n != cfg_.new_params.n) {
        throw Error(ErrorCode::kFeldmanReject, "share addressed to another party");
      }
      bool ok = naive_ ? share.value * g == share_images_.at({k.value, new_self_->value})
                       : feldman_verify(share, dealer_comms_.at(k.value));
      if (!ok) throw Error(ErrorCode::kFeldmanReject, "share fails verification");
      x += share.value;
    }
    GroupPoint mine = x * g;
    if (!(mine == new_images_.at(*new_self_))) throw Error(ErrorCode::kFeldmanReject, "share sum is inconsistent");
    x_ = x;
    ByteWriter w;
    w.raw(encode_point(*key_)).raw(encode_point(mine));
    return broadcast(4, PayloadKind::kAck, std::move(w).take());
  }

  SessionOutput confirm(const Inbox& inbox) {
    for (auto j : new_ids_) {
      ByteReader r(inbox.body(new_role(j.value), PayloadKind::kAck));
      GroupPoint key = read_point(r, curve_);
      GroupPoint xj = read_point(r, curve_);
      r.expect_done();
      if (!(key == *key_)) throw Error(ErrorCode::kProtocolFailure, "new party confirmed another key");
      if (!(xj == new_images_.at(j))) throw Error(ErrorCode::kFeldmanReject, "confirmed public share is inconsistent");
    }
    if (!is_new()) return SessionOutput{*key_, std::nullopt, std::nullopt};
    GroupPoint mine = new_images_.at(*new_self_);
    return SessionOutput{*key_,
                         KeyShareRecord{cfg_.new_params, *new_self_, *x_, mine, *key_, combined_, new_images_},
                         std::nullopt};
  }

  ReshareConfig cfg_;
  CurveId curve_;
  bool naive_;
  std::vector<PartyId> new_ids_;
  std::optional<KeyShareRecord> old_;
  std::optional<PartyId> new_self_;
  std::map<PartyId, ShamirShare> outgoing_shares_;
  std::optional<GroupPoint> key_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, GroupPoint> share_images_;
  std::map<std::uint32_t, FeldmanCommitments> dealer_comms_;
  FeldmanCommitments combined_;
  std::map<PartyId, GroupPoint> new_images_;
  std::optional<GroupScalar> x_;
};

void check_reshare_config(const ReshareConfig& cfg) {
  cfg.old_params.validate();
  cfg.new_params.validate();
  if (cfg.old_params.curve != cfg.new_params.curve) throw Error(ErrorCode::kCurveMismatch, "reshare cannot change curve");
  if (cfg.old_params.scheme != cfg.new_params.scheme) {
    throw Error(ErrorCode::kInvalidArgument, "reshare cannot change scheme");
  }
  std::set<PartyId> members(cfg.old_subset.begin(), cfg.old_subset.end());
  if (members.size() != cfg.old_subset.size()) throw Error(ErrorCode::kPreconditionViolation, "duplicate old party");
  std::size_t need = cfg.old_params.scheme == Scheme::kNaive ? cfg.old_params.n : cfg.old_params.t + 1u;
  if (members.size() != need) throw Error(ErrorCode::kPreconditionViolation, "wrong number of old parties");
  for (auto p : members) {
    if (p.value == 0 || p.value > cfg.old_params.n) {
      throw Error(ErrorCode::kPreconditionViolation, "old party outside committee");
    }
  }
}

}  // namespace

std::unique_ptr<RoundProtocol> make_reshare_protocol(const ReshareConfig& cfg, const KeyShareRecord* old_share,
                                                     std::optional<PartyId> new_self, std::unique_ptr<Rng> rng) {
  check_reshare_config(cfg);
  if (old_share) {
    if (!(old_share->params == cfg.old_params)) throw Error(ErrorCode::kPreconditionViolation, "share from another committee");
    if (std::find(cfg.old_subset.begin(), cfg.old_subset.end(), old_share->self) == cfg.old_subset.end()) {
      throw Error(ErrorCode::kPreconditionViolation, "party is not in the old subset");
    }
  } else if (!new_self || new_self->value == 0 || new_self->value > cfg.new_params.n) {
    throw Error(ErrorCode::kPreconditionViolation, "party id outside the new committee");
  }
  return std::make_unique<Reshare>(cfg, old_share, new_self, std::move(rng));
}

}  // namespace tdh
