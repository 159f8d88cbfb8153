#pragma once

// Internal base for the six protocol engines driven by tdh::Session.

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "tdh/protocols.hpp"

namespace tdh {

struct Expectation {
  std::uint32_t sender;
  PayloadKind kind;
  bool p2p;
};

class Inbox {
 public:
  void put(const ProtocolEnvelope& env) { items_[{env.sender, env.kind}] = &env; }
  const Bytes& body(std::uint32_t sender, PayloadKind kind) const {
    auto it = items_.find({sender, kind});
    if (it == items_.end()) throw Error(ErrorCode::kUnexpectedMessage, "missing round message");
    return it->second->body;
  }

 private:
  std::map<std::pair<std::uint32_t, PayloadKind>, const ProtocolEnvelope*> items_;
};

class RoundProtocol {
 public:
  struct Outcome {
    std::vector<ProtocolEnvelope> outgoing;
    std::optional<SessionOutput> output;
  };

  RoundProtocol(const SessionId& session, ProtocolId protocol, std::uint32_t self,
                std::vector<std::uint32_t> participants, std::uint8_t final_round, std::unique_ptr<Rng> rng)
      : session_(session),
        protocol_(protocol),
        self_(self),
        participants_(std::move(participants)),
        final_round_(final_round),
        rng_(std::move(rng)) {}
  virtual ~RoundProtocol() = default;

  // Messages this party must hold before processing `round`.
  virtual std::vector<Expectation> expected(std::uint8_t round) const = 0;
  // Round-1 messages.
  virtual std::vector<ProtocolEnvelope> begin() = 0;
  // Consumes a complete round; returns the next round's messages.
  virtual Outcome process(std::uint8_t round, const Inbox& inbox) = 0;

  const SessionId& session() const { return session_; }
  ProtocolId protocol() const { return protocol_; }
  std::uint32_t self() const { return self_; }
  const std::vector<std::uint32_t>& participants() const { return participants_; }
  std::uint8_t final_round() const { return final_round_; }

 protected:
  ProtocolEnvelope broadcast(std::uint8_t round, PayloadKind kind, Bytes body) const {
    return ProtocolEnvelope{session_, protocol_, round, self_, kind, std::move(body), std::nullopt};
  }
  ProtocolEnvelope p2p(std::uint8_t round, PayloadKind kind, std::uint32_t to, Bytes body) const {
    return ProtocolEnvelope{session_, protocol_, round, self_, kind, std::move(body), to};
  }
  Rng& rng() { return *rng_; }

 private:
  SessionId session_;
  ProtocolId protocol_;
  std::uint32_t self_;
  std::vector<std::uint32_t> participants_;
  std::uint8_t final_round_;
  std::unique_ptr<Rng> rng_;
};

// Shared helpers.
inline std::vector<Expectation> broadcasts_from(const std::vector<std::uint32_t>& senders, PayloadKind kind) {
  std::vector<Expectation> out;
  for (auto s : senders) out.push_back({s, kind, false});
  return out;
}

inline GroupPoint read_point(ByteReader& r, CurveId curve) {
  return decode_point(r.raw(kEncodedPointBytes), curve, DecodeMode::kSanitize);
}

inline std::vector<std::uint32_t> as_senders(const std::vector<PartyId>& ids, bool new_committee = false) {
  std::vector<std::uint32_t> out;
  for (auto p : ids) out.push_back(new_committee ? new_role(p.value) : old_role(p.value));
  return out;
}

std::unique_ptr<RoundProtocol> make_keygen_protocol(const KeygenConfig& cfg, std::unique_ptr<Rng> rng);
std::unique_ptr<RoundProtocol> make_exchange_protocol(const ExchangeConfig& cfg, std::unique_ptr<Rng> rng);
std::unique_ptr<RoundProtocol> make_reshare_protocol(const ReshareConfig& cfg, const KeyShareRecord* old_share,
                                                     std::optional<PartyId> new_self, std::unique_ptr<Rng> rng);

}  // namespace tdh
