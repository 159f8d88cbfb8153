#include <algorithm>
#include <set>

#include "round_protocol.hpp"
#include "tdh/commitment.hpp"

namespace tdh {
namespace {

class Exchange final : public RoundProtocol {
 public:
  Exchange(const ExchangeConfig& cfg, GroupScalar weight, GroupPoint peer, std::unique_ptr<Rng> rng)
      : RoundProtocol(cfg.session,
                      cfg.share.params.scheme == Scheme::kNaive ? ProtocolId::kNaiveExchange
                                                                : ProtocolId::kThresholdExchange,
                      cfg.share.self.value, as_senders(cfg.subset), 2, std::move(rng)),
        curve_(cfg.share.params.curve),
        weight_(weight),
        peer_(peer),
        key_(cfg.share.public_key) {}

  std::vector<Expectation> expected(std::uint8_t round) const override {
    return broadcasts_from(participants(), round == 1 ? PayloadKind::kCommit : PayloadKind::kDecommit);
  }

  std::vector<ProtocolEnvelope> begin() override {
    GroupPoint s = weight_ * peer_;
    weight_ = GroupScalar::zero(curve_);
    auto [c, d] = commit(CommitDomain::kExchange, encode_point(s), rng());
    decommit_ = std::move(d);
    return {broadcast(1, PayloadKind::kCommit, serialize(c))};
  }

  Outcome process(std::uint8_t round, const Inbox& inbox) override {
    Outcome out;
    if (round == 1) {
      for (auto j : participants()) commits_.emplace(j, parse_commitment(inbox.body(j, PayloadKind::kCommit)));
      out.outgoing.push_back(broadcast(2, PayloadKind::kDecommit, serialize(*decommit_)));
      secure_zero(decommit_->nonce);
      return out;
    }
    GroupPoint shared = GroupPoint::identity(curve_);
    for (auto j : participants()) {
      Bytes msg =
          open(CommitDomain::kExchange, commits_.at(j), parse_decommitment(inbox.body(j, PayloadKind::kDecommit)));
      shared += decode_point(msg, curve_, DecodeMode::kSanitize);
    }
    if (shared.is_identity()) throw Error(ErrorCode::kProtocolFailure, "shared point is the identity");
    out.output = SessionOutput{key_, std::nullopt, ExchangeOutput{shared, derive_psk(shared)}};
    return out;
  }

 private:
  CurveId curve_;
  GroupScalar weight_;
  GroupPoint peer_;
  GroupPoint key_;
  std::optional<Decommitment> decommit_;
  std::map<std::uint32_t, Commitment> commits_;
};

}  // namespace

std::unique_ptr<RoundProtocol> make_exchange_protocol(const ExchangeConfig& cfg, std::unique_ptr<Rng> rng) {
  const auto& params = cfg.share.params;
  params.validate();
  if (cfg.peer_point.curve() != params.curve) throw Error(ErrorCode::kCurveMismatch, "peer point on another curve");
  std::set<PartyId> members(cfg.subset.begin(), cfg.subset.end());
  if (members.size() != cfg.subset.size()) throw Error(ErrorCode::kPreconditionViolation, "duplicate subset member");
  if (members.size() != static_cast<std::size_t>(params.t) + 1) {
    throw Error(ErrorCode::kPreconditionViolation, "exchange needs exactly t+1 participants");
  }
  for (auto p : members) {
    if (p.value == 0 || p.value > params.n) throw Error(ErrorCode::kPreconditionViolation, "subset member outside committee");
  }
  if (!members.contains(cfg.share.self)) throw Error(ErrorCode::kPreconditionViolation, "party is not in the subset");
  GroupPoint peer = sanitize_point(cfg.peer_point);
  if (peer.is_identity()) throw Error(ErrorCode::kProtocolFailure, "peer point has no prime-order component");
  GroupScalar weight = cfg.share.private_share;
  if (params.scheme == Scheme::kThreshold) {
    weight = lagrange_coeff(params.curve, cfg.subset, cfg.share.self) * weight;
  }
  return std::make_unique<Exchange>(cfg, weight, peer, std::move(rng));
}

}  // namespace tdh
