#include "tdh/orch/broker.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <set>

namespace tdh::orch {

namespace {

bool transient(ErrorCode code) {
  return code == ErrorCode::kSessionAborted || code == ErrorCode::kMissingConfirmation ||
         code == ErrorCode::kAgentUnavailable;
}

int severity(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSessionAborted:
      return 0;
    case ErrorCode::kMissingConfirmation:
      return 1;
    case ErrorCode::kAgentUnavailable:
      return 2;
    default:
      return 3;
  }
}

std::vector<std::string> agents_of(const Committee& c) {
  std::vector<std::string> out;
  for (const auto* side : {&c.old_members, &c.new_members}) {
    for (const auto& [party, agent] : *side) {
      if (std::find(out.begin(), out.end(), agent) == out.end()) out.push_back(agent);
    }
  }
  return out;
}

std::vector<std::pair<std::uint32_t, std::string>> pick_holders(const std::vector<std::string>& healthy,
                                                                const KeyEntry& key) {
  std::size_t need = key.params.scheme == Scheme::kThreshold ? key.params.t + 1u : key.params.n;
  std::vector<std::pair<std::uint32_t, std::string>> out;
  for (const auto& [party, agent] : key.holders) {
    if (out.size() == need) break;
    if (std::find(healthy.begin(), healthy.end(), agent) != healthy.end()) out.emplace_back(party, agent);
  }
  if (out.size() < need) {
    throw Error(ErrorCode::kInsufficientAgents, "need " + std::to_string(need) + " live holders, have " +
                                                    std::to_string(out.size()));
  }
  return out;
}

std::vector<std::pair<std::uint32_t, std::string>> pick_fresh(const std::vector<std::string>& healthy,
                                                              const SchemeParams& params) {
  if (healthy.size() < params.n) {
    throw Error(ErrorCode::kInsufficientAgents, "need " + std::to_string(params.n) + " live agents, have " +
                                                    std::to_string(healthy.size()));
  }
  std::vector<std::pair<std::uint32_t, std::string>> out;
  for (std::uint32_t i = 0; i < params.n; ++i) out.emplace_back(i + 1, healthy[i]);
  return out;
}

void check_same(const std::vector<std::pair<std::string, AgentResult>>& results, Bytes AgentResult::*field,
                const char* what) {
  const Bytes* first = nullptr;
  for (const auto& [agent, res] : results) {
    const Bytes& v = res.*field;
    if (v.empty()) continue;
    if (first && *first != v) throw Error(ErrorCode::kAgentsDisagree, std::string("agents returned different ") + what);
    first = &v;
  }
}

}  // namespace

std::optional<std::string> BearerTokenAuthenticator::authenticate(std::string_view credential) const {
  for (const auto& [token, customer] : tokens_) {
    if (constant_time_equal(to_bytes(token), to_bytes(credential))) return customer;
  }
  return std::nullopt;
}

Committee committee_select(Operation op, const std::vector<AgentStatus>& agents, const SchemeParams& params,
                           const KeyEntry* key, const std::vector<std::string>& excluded) {
  std::vector<std::string> healthy;
  for (const auto& a : agents) {
    if (a.healthy && std::find(excluded.begin(), excluded.end(), a.name) == excluded.end()) healthy.push_back(a.name);
  }
  Committee c;
  switch (op) {
    case Operation::kKeygen:
      c.new_members = pick_fresh(healthy, params);
      break;
    case Operation::kExchange:
    case Operation::kPskExchange:
      if (!key) throw Error(ErrorCode::kUnknownKey, "exchange needs a key");
      c.old_members = pick_holders(healthy, *key);
      break;
    case Operation::kReshare:
      if (!key) throw Error(ErrorCode::kUnknownKey, "reshare needs a key");
      c.old_members = pick_holders(healthy, *key);
      c.new_members = pick_fresh(healthy, params);
      break;
  }
  return c;
}

Broker::Broker(BrokerOptions options, std::unique_ptr<Authenticator> auth, net::HubLink& hub)
    : options_(std::move(options)), auth_(std::move(auth)), hub_(hub) {
  if (options_.seed.empty()) {
    rng_ = std::make_unique<SystemRng>();
  } else {
    rng_ = std::make_unique<SeededRng>(options_.seed + "/broker");
  }
  if (!options_.registry_path.empty()) load_registry();
}

Broker::~Broker() = default;

void Broker::add_agent(std::shared_ptr<AgentEndpoint> agent) {
  std::lock_guard lock(mu_);
  agents_.push_back(std::move(agent));
}

std::optional<KeyEntry> Broker::key(const std::string& key_id) const {
  std::lock_guard lock(mu_);
  auto it = keys_.find(key_id);
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

Bytes Broker::handle(ByteSpan encoded_request) {
  OperationRequest req;
  try {
    req = parse_operation_request(encoded_request);
  } catch (const Error& e) {
    OperationResult res;
    res.error = e.code();
    res.message = e.what();
    return serialize(res);
  }
  return serialize(handle(req));
}

OperationResult Broker::handle(const OperationRequest& req) {
  try {
    auto customer = auth_->authenticate(req.credential);
    if (!customer) throw Error(ErrorCode::kAuthFailure, "credential rejected");
    if (req.key_id.empty()) throw Error(ErrorCode::kInvalidArgument, "key id must not be empty");
    switch (req.op) {
      case Operation::kKeygen:
        return keygen(*customer, req);
      case Operation::kExchange:
      case Operation::kPskExchange:
        return exchange(*customer, req);
      case Operation::kReshare:
        return reshare(*customer, req);
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown operation");
  } catch (const Error& e) {
    OperationResult res;
    res.error = e.code();
    res.message = e.what();
    return res;
  } catch (const std::exception& e) {
    OperationResult res;
    res.error = ErrorCode::kProtocolFailure;
    res.message = e.what();
    return res;
  }
}

std::vector<AgentStatus> Broker::health() {
  std::vector<std::string> names;
  {
    std::lock_guard lock(mu_);
    for (const auto& a : agents_) names.push_back(a->name());
  }
  AgentRequest req;
  req.action = AgentAction::kHealth;
  auto results = call_all(req, names);
  std::vector<AgentStatus> out;
  for (const auto& [name, res] : results) out.push_back({name, res.ok()});
  std::lock_guard lock(mu_);
  health_cache_ = out;
  probed_at_ = std::chrono::steady_clock::now();
  return out;
}

std::vector<AgentStatus> Broker::known_health() {
  {
    std::lock_guard lock(mu_);
    if (options_.health_ttl.count() > 0 && health_cache_.size() == agents_.size() &&
        std::chrono::steady_clock::now() - probed_at_ < options_.health_ttl) {
      return health_cache_;
    }
  }
  return health();
}

void Broker::mark_down(const std::vector<std::string>& agents) {
  std::lock_guard lock(mu_);
  for (auto& s : health_cache_) {
    if (std::find(agents.begin(), agents.end(), s.name) != agents.end()) s.healthy = false;
  }
}

// version(1) || u32 count || per key: str id, str owner, curve, scheme, u16 t,
// u16 n, var public key, u32 version, u16 holders, (u32 party, str agent)*
void Broker::save_registry() const {
  ByteWriter w;
  w.u8(1).u32(static_cast<std::uint32_t>(keys_.size()));
  for (const auto& [id, e] : keys_) {
    w.str(id).str(e.owner).u8(static_cast<std::uint8_t>(e.params.curve)).u8(static_cast<std::uint8_t>(e.params.scheme));
    w.u16(e.params.t).u16(e.params.n).var(e.public_key).u32(e.version).u16(static_cast<std::uint16_t>(e.holders.size()));
    for (const auto& [party, agent] : e.holders) w.u32(party).str(agent);
  }
  Bytes data = std::move(w).take();
  auto tmp = options_.registry_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::kStorageFailure, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, options_.registry_path);
}

void Broker::load_registry() {
  std::ifstream in(options_.registry_path, std::ios::binary);
  if (!in) return;
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ByteReader r(data);
  if (r.u8() != 1) throw Error(ErrorCode::kStorageFailure, "unknown registry version");
  std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string id = r.str();
    KeyEntry e;
    e.owner = r.str();
    e.params.curve = static_cast<CurveId>(r.u8());
    e.params.scheme = static_cast<Scheme>(r.u8());
    e.params.t = r.u16();
    e.params.n = r.u16();
    e.params.validate();
    auto pk = r.var();
    e.public_key.assign(pk.begin(), pk.end());
    e.version = r.u32();
    std::uint16_t holders = r.u16();
    for (std::uint16_t h = 0; h < holders; ++h) {
      std::uint32_t party = r.u32();
      e.holders[party] = r.str();
    }
    keys_[id] = std::move(e);
  }
}

KeyEntry Broker::owned_key(const std::string& customer, const std::string& key_id) const {
  std::lock_guard lock(mu_);
  auto it = keys_.find(key_id);
  // Keys of other customers are reported as unknown.
  if (it == keys_.end() || it->second.owner != customer) {
    throw Error(ErrorCode::kUnknownKey, "no key '" + key_id + "'");
  }
  return it->second;
}

std::shared_ptr<std::mutex> Broker::key_lock(const std::string& key_id) {
  std::lock_guard lock(mu_);
  auto& m = key_locks_[key_id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

net::RoomId Broker::fresh_room() {
  std::lock_guard lock(rng_mu_);
  net::RoomId id{};
  rng_->fill(id);
  return id;
}

AgentResult Broker::call(const std::string& agent, const AgentRequest& req) {
  std::shared_ptr<AgentEndpoint> endpoint;
  {
    std::lock_guard lock(mu_);
    for (const auto& a : agents_) {
      if (a->name() == agent) endpoint = a;
    }
  }
  AgentResult res;
  if (!endpoint) {
    res.error = ErrorCode::kAgentUnavailable;
    res.message = "no agent named " + agent;
    return res;
  }
  try {
    return parse_agent_result(endpoint->call(sign_agent_request(req, options_.agent_token)));
  } catch (const Error& e) {
    res.error = ErrorCode::kAgentUnavailable;
    res.message = agent + ": " + e.what();
  }
  return res;
}

std::vector<std::pair<std::string, AgentResult>> Broker::call_all(const AgentRequest& req,
                                                                  const std::vector<std::string>& agents) {
  std::vector<std::future<AgentResult>> futures;
  for (const auto& a : agents) futures.push_back(std::async(std::launch::async, [this, &a, &req] { return call(a, req); }));
  std::vector<std::pair<std::string, AgentResult>> out;
  for (std::size_t i = 0; i < agents.size(); ++i) out.emplace_back(agents[i], futures[i].get());
  return out;
}

Broker::Fanout Broker::run(AgentRequest req, const std::vector<std::string>& agents) {
  req.action = AgentAction::kRun;
  req.request_id = fresh_room();
  req.round_timeout_ms = static_cast<std::uint32_t>(options_.round_timeout.count());
  hub_.open(req.request_id);
  Fanout fan;
  try {
    fan.results = call_all(req, agents);
    std::vector<std::string> down;
    for (const auto& [agent, res] : fan.results) {
      if (!res.ok() && *res.error == ErrorCode::kAgentUnavailable) down.push_back(agent);
    }
    mark_down(down);
  } catch (...) {
    hub_.close(req.request_id);
    throw;
  }
  hub_.close(req.request_id);

  for (const auto& [agent, res] : fan.results) {
    if (res.ok()) continue;
    if (*res.error == ErrorCode::kAgentUnavailable) fan.unavailable.push_back(agent);
    if (!fan.failure || severity(*res.error) > severity(fan.failure->code())) {
      fan.failure = Error(*res.error, agent + ": " + res.message);
    }
  }
  return fan;
}

void Broker::finish(AgentAction action, const AgentRequest& run_req, const std::vector<std::string>& agents) {
  AgentRequest req = run_req;
  req.action = action;
  auto results = call_all(req, agents);
  for (const auto& [agent, res] : results) {
    if (!res.ok() && action == AgentAction::kCommit) {
      throw Error(ErrorCode::kStorageFailure, agent + " failed to commit: " + res.message);
    }
  }
}

OperationResult Broker::keygen(const std::string& customer, const OperationRequest& req) {
  req.params.validate();
  auto lock = key_lock(req.key_id);
  std::lock_guard guard(*lock);
  {
    std::lock_guard l(mu_);
    if (keys_.count(req.key_id)) throw Error(ErrorCode::kPreconditionViolation, "key id '" + req.key_id + "' exists");
  }
  Committee c = committee_select(Operation::kKeygen, known_health(), req.params, nullptr);
  AgentRequest run_req;
  run_req.op = Operation::kKeygen;
  run_req.key_id = req.key_id;
  run_req.params = req.params;
  run_req.version = 1;
  for (const auto& [party, agent] : c.new_members) {
    run_req.roster.push_back({party, agent + "#" + std::to_string(party), agent});
  }
  auto agents = agents_of(c);
  Fanout fan = run(run_req, agents);
  try {
    if (fan.failure) throw *fan.failure;
    check_same(fan.results, &AgentResult::public_key, "public keys");
  } catch (const Error&) {
    finish(AgentAction::kDiscard, run_req, agents);
    throw;
  }
  finish(AgentAction::kCommit, run_req, agents);

  KeyEntry entry{customer, req.params, fan.results.front().second.public_key, {}, 1};
  for (const auto& [party, agent] : c.new_members) entry.holders[party] = agent;
  {
    std::lock_guard l(mu_);
    keys_[req.key_id] = entry;
    if (!options_.registry_path.empty()) save_registry();
  }
  OperationResult res;
  res.public_key = entry.public_key;
  res.version = 1;
  res.attempts = 1;
  res.agents = agents;
  return res;
}

OperationResult Broker::exchange(const std::string& customer, const OperationRequest& req) {
  KeyEntry entry = owned_key(customer, req.key_id);
  GroupPoint peer = GroupPoint::identity(entry.params.curve);
  if (req.op == Operation::kPskExchange) {
    if (entry.params.curve != CurveId::kCurve25519) {
      throw Error(ErrorCode::kCurveMismatch, "PSK exchange needs a Curve25519 key");
    }
    if (req.remote_pubkey.size() != 32) throw Error(ErrorCode::kInvalidEncoding, "X25519 public key must be 32 bytes");
    peer = sanitize_point(from_x25519_u(req.remote_pubkey, 0));
  } else {
    peer = decode_point(req.remote_pubkey, entry.params.curve, DecodeMode::kSanitize);
  }
  if (peer.is_identity()) throw Error(ErrorCode::kProtocolFailure, "peer point has no prime-order component");
  EncodedPoint peer_enc = encode_point(peer);

  auto lock = key_lock(req.key_id);
  std::lock_guard guard(*lock);
  entry = owned_key(customer, req.key_id);

  std::vector<std::string> excluded;
  OperationResult res;
  for (std::uint32_t attempt = 1; attempt <= 2; ++attempt) {
    res.attempts = attempt;
    Committee c = committee_select(req.op, known_health(), entry.params, &entry, excluded);
    AgentRequest run_req;
    run_req.op = req.op;
    run_req.key_id = req.key_id;
    run_req.params = entry.params;
    run_req.peer_point.assign(peer_enc.begin(), peer_enc.end());
    for (const auto& [party, agent] : c.old_members) {
      run_req.subset.push_back(party);
      run_req.roster.push_back({party, agent + "#" + std::to_string(party), agent});
    }
    auto agents = agents_of(c);
    Fanout fan = run(run_req, agents);
    if (fan.failure) {
      // A retry only helps when it can route around someone.
      if (attempt == 1 && transient(fan.failure->code()) && !fan.unavailable.empty()) {
        excluded.insert(excluded.end(), fan.unavailable.begin(), fan.unavailable.end());
        continue;
      }
      throw *fan.failure;
    }
    check_same(fan.results, &AgentResult::public_key, "public keys");
    check_same(fan.results, &AgentResult::shared_point, "shared points");
    check_same(fan.results, &AgentResult::psk, "PSKs");
    const AgentResult& first = fan.results.front().second;
    if (first.public_key != entry.public_key) throw Error(ErrorCode::kAgentsDisagree, "agents used a different key");
    res.public_key = first.public_key;
    res.shared_point = first.shared_point;
    res.psk = first.psk;
    res.version = entry.version;
    res.agents = agents;
    return res;
  }
  throw Error(ErrorCode::kProtocolFailure, "exchange retries exhausted");
}

OperationResult Broker::reshare(const std::string& customer, const OperationRequest& req) {
  auto lock = key_lock(req.key_id);
  std::lock_guard guard(*lock);
  KeyEntry entry = owned_key(customer, req.key_id);
  if (req.params.curve != entry.params.curve) throw Error(ErrorCode::kCurveMismatch, "reshare cannot change the curve");
  if (req.params.scheme != entry.params.scheme) {
    throw Error(ErrorCode::kInvalidArgument, "reshare cannot change the scheme");
  }
  req.params.validate();

  Committee c = committee_select(Operation::kReshare, known_health(), req.params, &entry);
  AgentRequest run_req;
  run_req.op = Operation::kReshare;
  run_req.key_id = req.key_id;
  run_req.params = entry.params;
  run_req.new_params = req.params;
  run_req.expected_public_key = entry.public_key;
  run_req.version = entry.version + 1;
  for (const auto& [party, agent] : c.old_members) {
    run_req.subset.push_back(party);
    run_req.roster.push_back({old_role(party), agent + "#old" + std::to_string(party), agent});
  }
  std::vector<std::string> new_agents;
  for (const auto& [party, agent] : c.new_members) {
    run_req.roster.push_back({new_role(party), agent + "#new" + std::to_string(party), agent});
    new_agents.push_back(agent);
  }
  auto agents = agents_of(c);
  Fanout fan = run(run_req, agents);
  try {
    if (fan.failure) throw *fan.failure;
    check_same(fan.results, &AgentResult::public_key, "public keys");
    if (fan.results.front().second.public_key != entry.public_key) {
      throw Error(ErrorCode::kAgentsDisagree, "reshare changed the public key");
    }
  } catch (const Error&) {
    finish(AgentAction::kDiscard, run_req, new_agents);
    throw;
  }
  finish(AgentAction::kCommit, run_req, new_agents);
  std::vector<std::string> leaving;
  for (const auto& [party, agent] : entry.holders) {
    if (std::find(new_agents.begin(), new_agents.end(), agent) == new_agents.end()) leaving.push_back(agent);
  }
  finish(AgentAction::kRetire, run_req, leaving);

  entry.params = req.params;
  entry.version += 1;
  entry.holders.clear();
  for (const auto& [party, agent] : c.new_members) entry.holders[party] = agent;
  {
    std::lock_guard l(mu_);
    keys_[req.key_id] = entry;
    if (!options_.registry_path.empty()) save_registry();
  }
  OperationResult res;
  res.public_key = entry.public_key;
  res.version = entry.version;
  res.attempts = 1;
  res.agents = agents;
  return res;
}

}  // namespace tdh::orch
