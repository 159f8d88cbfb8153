#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "tdh/bytes.hpp"

namespace tdh {

using SessionId = std::array<std::uint8_t, 16>;

enum class ProtocolId : std::uint8_t {
  kNaiveKeygen = 1,
  kNaiveExchange = 2,
  kNaiveReshare = 3,
  kThresholdKeygen = 4,
  kThresholdExchange = 5,
  kThresholdReshare = 6,
};

enum class PayloadKind : std::uint8_t {
  kCommit = 1,
  kDecommit = 2,
  kVssShare = 3,
  kAck = 4,
  kPubkey = 5,
};

std::string_view protocol_name(ProtocolId id);
std::string_view payload_kind_name(PayloadKind kind);

// Sender ids: keygen and exchange use the party id directly. Reshare
// sessions tag new-committee roles with the high bit so one agent can take
// part in both committees.
inline constexpr std::uint32_t kNewCommitteeBit = 0x8000'0000u;
constexpr std::uint32_t old_role(std::uint32_t party) { return party; }
constexpr std::uint32_t new_role(std::uint32_t party) { return party | kNewCommitteeBit; }
constexpr bool is_new_role(std::uint32_t sender) { return sender & kNewCommitteeBit; }
constexpr std::uint32_t role_party(std::uint32_t sender) { return sender & ~kNewCommitteeBit; }

struct ProtocolEnvelope {
  SessionId session_id{};
  ProtocolId protocol = ProtocolId::kNaiveKeygen;
  std::uint8_t round = 0;
  std::uint32_t sender = 0;
  PayloadKind kind = PayloadKind::kCommit;
  Bytes body;
  // Routing only, not part of the payload layout: set for P2P messages.
  std::optional<std::uint32_t> recipient;

  bool operator==(const ProtocolEnvelope&) const = default;
};

// session_id(16) || protocol_id(1) || round(1) || sender(4, BE) || kind(1) || u32 len || body
Bytes serialize(const ProtocolEnvelope& env);
ProtocolEnvelope parse_envelope(ByteSpan bytes);

}  // namespace tdh
