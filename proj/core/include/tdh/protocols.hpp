#pragma once

// Round-based state machines for the naive (n-of-n additive) and threshold
// (Shamir/Feldman) Diffie-Hellman schemes: keygen, exchange and reshare for
// each. Sessions do no I/O. The caller feeds received envelopes (including
// echoes of the session's own broadcasts) and ships whatever comes out.
//
// Rounds are strict barriers: nothing for round k+1 is emitted before every
// expected round-k message has arrived and verified. Any failure aborts the
// session permanently.

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tdh/envelope.hpp"
#include "tdh/hash.hpp"
#include "tdh/sharing.hpp"

namespace tdh {

enum class Scheme : std::uint8_t { kNaive = 1, kThreshold = 2 };

std::string_view scheme_name(Scheme scheme);
Scheme parse_scheme(std::string_view name);

struct SchemeParams {
  CurveId curve = CurveId::kP256;
  Scheme scheme = Scheme::kThreshold;
  std::uint16_t t = 0;
  std::uint16_t n = 1;

  // Naive requires t == n - 1; threshold requires t < n. Throws kInvalidArgument.
  void validate() const;
  bool operator==(const SchemeParams&) const = default;
};

std::vector<PartyId> committee_ids(std::uint16_t n);  // 1..n

struct KeyShareRecord {
  SchemeParams params;
  PartyId self;
  GroupScalar private_share;
  GroupPoint public_share;
  GroupPoint public_key;
  // Threshold scheme: commitments to the combined sharing polynomial.
  FeldmanCommitments verification;
  // Public image of every committee member's share.
  std::map<PartyId, GroupPoint> public_shares;

  // public_share == private_share * G, and for the threshold scheme the
  // share is consistent with `verification`. Throws kFeldmanReject.
  void check_consistency() const;
};

Bytes serialize(const KeyShareRecord& rec);
KeyShareRecord parse_key_share_record(ByteSpan bytes);

struct ExchangeOutput {
  GroupPoint shared_point;
  Digest psk{};
};

// SHA-256("TDH-PSK-v1" || encode(sanitize(S))). On Curve25519 the sign byte
// is fixed to 0: a classic X25519 peer only learns u(S) and cannot tell S
// from -S. Throws kProtocolFailure for the identity.
Digest derive_psk(const GroupPoint& shared);

struct SessionOutput {
  GroupPoint public_key;
  std::optional<KeyShareRecord> key;        // keygen, reshare (new committee)
  std::optional<ExchangeOutput> exchange;   // exchange
};

struct StepResult {
  std::vector<ProtocolEnvelope> outgoing;
  std::optional<SessionOutput> output;
};

class RoundProtocol;

class Session {
 public:
  explicit Session(std::unique_ptr<RoundProtocol> protocol);
  Session(Session&&) noexcept;
  Session& operator=(Session&&) noexcept;
  ~Session();

  // First-round envelopes. Call once.
  StepResult start();
  // Buffers `incoming`, advances through every complete round and returns
  // what the session emits. Throws Error on abort; afterwards every call
  // throws kSessionAborted-wrapped errors and emits nothing.
  StepResult step(std::span<const ProtocolEnvelope> incoming);

  const SessionId& id() const;
  ProtocolId protocol() const;
  std::uint32_t self() const;
  // Every sender id taking part (both committees for reshare).
  const std::vector<std::uint32_t>& participants() const;
  std::uint8_t round() const { return round_; }
  std::uint8_t final_round() const;
  bool finished() const { return finished_; }
  bool aborted() const { return abort_code_.has_value(); }
  std::optional<ErrorCode> abort_code() const { return abort_code_; }
  // Aborts from outside the state machine (timeouts, transport failures).
  void abort(ErrorCode code);

 private:
  StepResult advance();

  std::unique_ptr<RoundProtocol> protocol_;
  std::uint8_t round_ = 1;
  bool started_ = false;
  bool finished_ = false;
  std::optional<ErrorCode> abort_code_;
  std::map<std::uint8_t, std::vector<ProtocolEnvelope>> buffered_;
};

struct KeygenConfig {
  SessionId session{};
  SchemeParams params;
  PartyId self;
};

struct ExchangeConfig {
  SessionId session{};
  KeyShareRecord share;
  GroupPoint peer_point;
  // Threshold: the t+1 participating parties. Naive: must be the full committee.
  std::vector<PartyId> subset;
};

struct ReshareConfig {
  SessionId session{};
  SchemeParams old_params;
  SchemeParams new_params;
  // Naive: the whole old committee. Threshold: exactly t+1 old parties.
  std::vector<PartyId> old_subset;
  // Optional check for new-committee members (e.g. from the broker's key registry).
  std::optional<GroupPoint> expected_public_key;
};

Session make_keygen_session(const KeygenConfig& cfg, std::unique_ptr<Rng> rng);
Session make_exchange_session(const ExchangeConfig& cfg, std::unique_ptr<Rng> rng);
Session make_reshare_old_session(const ReshareConfig& cfg, const KeyShareRecord& old_share, std::unique_ptr<Rng> rng);
Session make_reshare_new_session(const ReshareConfig& cfg, PartyId new_self, std::unique_ptr<Rng> rng);

}  // namespace tdh
