#pragma once

// The broker authenticates customers, picks a committee of agents for each
// operation, opens a fresh room on the hub and fans the request out. It
// never sees private shares: agents return public outputs only.

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tdh/net/hub.hpp"
#include "tdh/orch/messages.hpp"

namespace tdh::orch {

class Authenticator {
 public:
  virtual ~Authenticator() = default;
  // The customer behind `credential`, or nullopt.
  virtual std::optional<std::string> authenticate(std::string_view credential) const = 0;
};

// Static bearer tokens: token -> customer.
class BearerTokenAuthenticator final : public Authenticator {
 public:
  explicit BearerTokenAuthenticator(std::map<std::string, std::string> tokens) : tokens_(std::move(tokens)) {}
  std::optional<std::string> authenticate(std::string_view credential) const override;

 private:
  std::map<std::string, std::string> tokens_;
};

// Broker-side handle on one agent.
class AgentEndpoint {
 public:
  virtual ~AgentEndpoint() = default;
  virtual const std::string& name() const = 0;
  // Sends a signed request and returns the encoded result. Throws
  // kAgentUnavailable when the agent cannot be reached.
  virtual Bytes call(ByteSpan signed_request) = 0;
};

struct KeyEntry {
  std::string owner;
  SchemeParams params;
  Bytes public_key;
  std::map<std::uint32_t, std::string> holders;  // party -> agent
  std::uint32_t version = 0;
};

struct AgentStatus {
  std::string name;
  bool healthy = false;
};

struct Committee {
  // (party, agent). Exchange: the participating holders. Keygen: the new
  // committee. Reshare: old subset and new committee.
  std::vector<std::pair<std::uint32_t, std::string>> old_members;
  std::vector<std::pair<std::uint32_t, std::string>> new_members;
};

// Deterministic selection: healthy agents in the given order, skipping
// `excluded`. Keygen assigns parties 1..n to the first n agents. Exchange
// uses the lowest-numbered t+1 holders (all n for naive). Reshare keeps the
// exchange choice for the old side and assigns the new committee like
// keygen. Throws kInsufficientAgents.
Committee committee_select(Operation op, const std::vector<AgentStatus>& agents, const SchemeParams& params,
                           const KeyEntry* key, const std::vector<std::string>& excluded = {});

struct BrokerOptions {
  std::string agent_token;
  std::chrono::milliseconds round_timeout{30000};
  // Empty: system randomness for room ids.
  std::string seed;
  // Health probes older than this are repeated before selecting a committee.
  std::chrono::milliseconds health_ttl{0};
  // Empty: the key registry lives in memory only.
  std::filesystem::path registry_path;
};

class Broker {
 public:
  Broker(BrokerOptions options, std::unique_ptr<Authenticator> auth, net::HubLink& hub);
  ~Broker();

  void add_agent(std::shared_ptr<AgentEndpoint> agent);
  // Never throws; failures are reported in the result.
  OperationResult handle(const OperationRequest& req);
  Bytes handle(ByteSpan encoded_request);

  // Probes every agent now.
  std::vector<AgentStatus> health();
  std::optional<KeyEntry> key(const std::string& key_id) const;

 private:
  struct Fanout {
    std::vector<std::pair<std::string, AgentResult>> results;
    std::optional<Error> failure;
    std::vector<std::string> unavailable;
  };

  OperationResult keygen(const std::string& customer, const OperationRequest& req);
  OperationResult exchange(const std::string& customer, const OperationRequest& req);
  OperationResult reshare(const std::string& customer, const OperationRequest& req);

  // Opens a room, runs `req` on every agent in parallel and closes the room.
  Fanout run(AgentRequest req, const std::vector<std::string>& agents);
  std::vector<std::pair<std::string, AgentResult>> call_all(const AgentRequest& req, const std::vector<std::string>& agents);
  void finish(AgentAction action, const AgentRequest& run_req, const std::vector<std::string>& agents);
  AgentResult call(const std::string& agent, const AgentRequest& req);
  std::vector<AgentStatus> known_health();
  void mark_down(const std::vector<std::string>& agents);
  void load_registry();
  void save_registry() const;
  KeyEntry owned_key(const std::string& customer, const std::string& key_id) const;
  std::shared_ptr<std::mutex> key_lock(const std::string& key_id);
  net::RoomId fresh_room();

  BrokerOptions options_;
  std::unique_ptr<Authenticator> auth_;
  net::HubLink& hub_;
  std::unique_ptr<Rng> rng_;
  std::mutex rng_mu_;
  mutable std::mutex mu_;
  std::vector<std::shared_ptr<AgentEndpoint>> agents_;
  std::map<std::string, KeyEntry> keys_;
  std::map<std::string, std::shared_ptr<std::mutex>> key_locks_;
  std::vector<AgentStatus> health_cache_;
  std::chrono::steady_clock::time_point probed_at_{};
};

}  // namespace tdh::orch
