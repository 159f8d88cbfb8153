#include "tdh/orch/stack.hpp"

#include <random>

#include "tdh/orch/service.hpp"

namespace tdh::orch {

std::string agent_name(std::size_t index) { return "agent-" + std::to_string(index + 1); }

namespace {

std::filesystem::path fresh_root() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto dir = std::filesystem::temp_directory_path() / ("tdh-stack-" + std::to_string(rd()));
    if (std::filesystem::create_directory(dir)) return dir;
  }
  throw Error(ErrorCode::kStorageFailure, "cannot create a stack directory");
}

}  // namespace

Stack::Stack(StackOptions options)
    : options_(std::move(options)), hub_(options_.allow_faults), hub_link_(hub_) {
  options_.profile.validate();
  if (options_.root.empty()) {
    root_ = fresh_root();
    owns_root_ = true;
  } else {
    root_ = options_.root;
    std::filesystem::create_directories(root_);
  }
  BrokerOptions bopts{options_.agent_token, options_.round_timeout, options_.seed, options_.health_ttl, {}};
  if (options_.persist_registry) bopts.registry_path = root_ / "registry.bin";
  broker_ = std::make_unique<Broker>(bopts, std::make_unique<BearerTokenAuthenticator>(options_.customers), hub_link_);
  for (std::size_t i = 0; i < options_.agents; ++i) {
    std::string name = agent_name(i);
    agent_links_.push_back(std::make_unique<net::ShapedHubLink>(hub_link_, options_.profile, line_));
    AgentOptions aopts{name, options_.agent_token, root_ / name / "shares", root_ / name / "store.key", options_.seed};
    agents_.push_back(std::make_unique<Agent>(aopts, *agent_links_.back()));
    broker_->add_agent(std::make_shared<LocalAgentEndpoint>(*agents_.back(), options_.profile));
  }
}

Stack::~Stack() {
  broker_.reset();
  line_.drain();
  agents_.clear();
  if (owns_root_) {
    std::error_code ec;
    std::filesystem::remove_all(root_, ec);
  }
}

}  // namespace tdh::orch
