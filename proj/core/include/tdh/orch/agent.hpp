#pragma once

// An agent holds key shares for one or more virtual parties. For each
// signed broker request it joins the request's room, plays its roles in
// the protocol and returns public outputs only.

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

#include "tdh/net/channel.hpp"
#include "tdh/orch/messages.hpp"
#include "tdh/orch/store.hpp"

namespace tdh::orch {

struct AgentOptions {
  std::string name;
  std::string token;  // shared with the broker (AGENT_TOKEN)
  std::filesystem::path store_dir;
  std::filesystem::path key_file;
  // Empty: system randomness. Otherwise every session draws from a stream
  // derived from this seed and the request.
  std::string seed;
};

class Agent {
 public:
  Agent(AgentOptions options, net::HubLink& hub);
  ~Agent();

  // Verifies the broker's signature, then serves. Returns an encoded
  // AgentResult; throws kAgentUnavailable after crash().
  Bytes handle(ByteSpan signed_request);
  AgentResult serve(const AgentRequest& req);

  const std::string& name() const { return options_.name; }
  AgentShareStore& store() { return *store_; }

  // Test hook: stop participating at once, without notifying anyone, as a
  // killed process would.
  void crash() { crashed_ = true; }
  void restart() { crashed_ = false; }
  bool crashed() const { return crashed_; }
  // Test hook: called whenever one of this agent's sessions enters a new round.
  using RoundHook = std::function<void(const AgentRequest& req, std::uint32_t sender, std::uint8_t round)>;
  void set_round_hook(RoundHook hook);

 private:
  struct RoleOutcome {
    std::optional<SessionOutput> output;
    std::optional<Error> error;
  };
  RoleOutcome run_role(const AgentRequest& req, const RosterEntry& me);
  SessionOutput drive(const AgentRequest& req, const RosterEntry& me, Session& session, net::RoomChannel& channel);
  std::unique_ptr<Rng> rng_for(const AgentRequest& req, std::string_view label);

  AgentOptions options_;
  net::HubLink& hub_;
  std::unique_ptr<Rng> store_rng_;
  std::unique_ptr<AgentShareStore> store_;
  std::atomic<bool> crashed_{false};
  std::mutex hook_mu_;
  RoundHook hook_;
};

SessionId session_id_for(const net::RoomId& request_id);

}  // namespace tdh::orch
