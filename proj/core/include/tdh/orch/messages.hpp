#pragma once

// Customer-facing operation requests/results and the broker-to-agent
// requests, with their length-prefixed binary encodings.

#include <optional>
#include <string>
#include <vector>

#include "tdh/net/hub.hpp"
#include "tdh/protocols.hpp"

namespace tdh::orch {

enum class Operation : std::uint8_t { kKeygen = 1, kExchange = 2, kReshare = 3, kPskExchange = 4 };

std::string_view operation_name(Operation op);

struct OperationRequest {
  Operation op = Operation::kKeygen;
  std::string credential;
  std::string key_id;
  // Keygen: the new key's parameters. Reshare: the target (t, n); curve and
  // scheme must match the key.
  SchemeParams params;
  // Exchange: 33-byte encoded point. PskExchange: 32-byte X25519 public key.
  Bytes remote_pubkey;
};

struct OperationResult {
  std::optional<ErrorCode> error;
  std::string message;
  Bytes public_key;    // encoded point
  Bytes shared_point;  // exchange: encoded sanitized point
  Bytes psk;           // exchange: 32 bytes
  std::uint32_t version = 0;
  std::uint32_t attempts = 0;
  std::vector<std::string> agents;  // committee that produced the result

  bool ok() const { return !error.has_value(); }
};

Bytes serialize(const OperationRequest& req);
OperationRequest parse_operation_request(ByteSpan bytes);
Bytes serialize(const OperationResult& res);
OperationResult parse_operation_result(ByteSpan bytes);

enum class AgentAction : std::uint8_t { kRun = 1, kCommit = 2, kDiscard = 3, kRetire = 4, kHealth = 5 };

struct RosterEntry {
  std::uint32_t sender = 0;  // protocol sender id (role-tagged for reshare)
  std::string member;        // room identity
  std::string agent;         // agent that plays it

  bool operator==(const RosterEntry&) const = default;
};

struct AgentRequest {
  AgentAction action = AgentAction::kHealth;
  net::RoomId request_id{};
  Operation op = Operation::kKeygen;
  std::string key_id;
  SchemeParams params;      // keygen: new key; exchange/reshare: the key's current params
  SchemeParams new_params;  // reshare target
  std::vector<std::uint32_t> subset;  // exchange subset or reshare old subset
  std::vector<RosterEntry> roster;
  Bytes peer_point;          // exchange
  Bytes expected_public_key; // reshare
  std::uint32_t version = 0; // commit: version being installed
  std::uint32_t round_timeout_ms = 30000;
};

struct AgentResult {
  std::optional<ErrorCode> error;
  std::string message;
  Bytes public_key;
  Bytes shared_point;
  Bytes psk;

  bool ok() const { return !error.has_value(); }
};

Bytes serialize(const AgentRequest& req);
AgentRequest parse_agent_request(ByteSpan bytes);
Bytes serialize(const AgentResult& res);
AgentResult parse_agent_result(ByteSpan bytes);

// body || HMAC-SHA256(token, body)
Bytes sign_agent_request(const AgentRequest& req, std::string_view token);
// Throws kAuthFailure when the tag does not verify.
AgentRequest verify_agent_request(ByteSpan signed_bytes, std::string_view token);

}  // namespace tdh::orch
