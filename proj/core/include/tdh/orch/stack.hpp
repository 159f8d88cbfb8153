#pragma once

// A complete deployment in one process: hub, broker and agents, with the
// agents' hub traffic shaped by a network profile.

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tdh/net/hub.hpp"
#include "tdh/orch/agent.hpp"
#include "tdh/orch/broker.hpp"

namespace tdh::orch {

struct StackOptions {
  std::size_t agents = 3;
  net::NetworkProfile profile = net::local_profile();
  // Empty: system randomness everywhere.
  std::string seed;
  // Empty: a fresh temporary directory, removed with the stack.
  std::filesystem::path root;
  std::chrono::milliseconds round_timeout{30000};
  std::chrono::milliseconds health_ttl{0};
  // Keeps the broker's key registry under root so a later stack over the
  // same root sees earlier keys.
  bool persist_registry = false;
  std::map<std::string, std::string> customers{{"demo-token", "demo"}};
  std::string agent_token = "stack-agent-token";
  bool allow_faults = false;
};

class Stack {
 public:
  explicit Stack(StackOptions options);
  ~Stack();
  Stack(const Stack&) = delete;
  Stack& operator=(const Stack&) = delete;

  OperationResult submit(const OperationRequest& req) { return broker_->handle(req); }

  net::Hub& hub() { return hub_; }
  Broker& broker() { return *broker_; }
  Agent& agent(std::size_t i) { return *agents_.at(i); }
  std::size_t agent_count() const { return agents_.size(); }
  const StackOptions& options() const { return options_; }
  const std::filesystem::path& root() const { return root_; }

 private:
  StackOptions options_;
  std::filesystem::path root_;
  bool owns_root_ = false;
  net::Hub hub_;
  net::DelayLine line_;
  net::LocalHubLink hub_link_;
  std::vector<std::unique_ptr<net::ShapedHubLink>> agent_links_;
  std::vector<std::unique_ptr<Agent>> agents_;
  std::unique_ptr<Broker> broker_;
};

std::string agent_name(std::size_t index);  // "agent-1", ...

}  // namespace tdh::orch
