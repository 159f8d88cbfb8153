#include "tdh/orch/agent.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace tdh::orch {

using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

SessionId session_id_for(const net::RoomId& request_id) {
  static constexpr std::string_view kTag = "TDH-SESSION-v1";
  Digest d = sha256({ByteSpan(reinterpret_cast<const std::uint8_t*>(kTag.data()), kTag.size()), request_id});
  SessionId id{};
  std::copy(d.begin(), d.begin() + static_cast<long>(id.size()), id.begin());
  return id;
}

Agent::Agent(AgentOptions options, net::HubLink& hub) : options_(std::move(options)), hub_(hub) {
  if (options_.seed.empty()) {
    store_rng_ = std::make_unique<SystemRng>();
  } else {
    store_rng_ = std::make_unique<SeededRng>(options_.seed + "/" + options_.name + "/store");
  }
  store_ = std::make_unique<AgentShareStore>(options_.store_dir, options_.key_file, *store_rng_);
}

Agent::~Agent() = default;

void Agent::set_round_hook(RoundHook hook) {
  std::lock_guard lock(hook_mu_);
  hook_ = std::move(hook);
}

std::unique_ptr<Rng> Agent::rng_for(const AgentRequest& req, std::string_view label) {
  if (options_.seed.empty()) return std::make_unique<SystemRng>();
  return std::make_unique<SeededRng>(options_.seed + "/" + options_.name + "/" + to_hex(req.request_id) + "/" +
                                     std::string(label));
}

Bytes Agent::handle(ByteSpan signed_request) {
  if (crashed_) throw Error(ErrorCode::kAgentUnavailable, options_.name + " is down");
  AgentResult res;
  try {
    res = serve(verify_agent_request(signed_request, options_.token));
  } catch (const Error& e) {
    res.error = e.code();
    res.message = e.what();
  }
  if (crashed_) throw Error(ErrorCode::kAgentUnavailable, options_.name + " is down");
  return serialize(res);
}

AgentResult Agent::serve(const AgentRequest& req) {
  AgentResult res;
  switch (req.action) {
    case AgentAction::kHealth:
      return res;
    case AgentAction::kCommit:
      store_->commit(req.key_id);
      return res;
    case AgentAction::kDiscard:
      store_->discard(req.key_id);
      return res;
    case AgentAction::kRetire:
      store_->retire(req.key_id);
      return res;
    case AgentAction::kRun:
      break;
  }
  std::vector<RosterEntry> mine;
  for (const auto& e : req.roster) {
    if (e.agent == options_.name) mine.push_back(e);
  }
  if (mine.empty()) throw Error(ErrorCode::kPreconditionViolation, "request assigns no role to " + options_.name);

  std::vector<RoleOutcome> outcomes(mine.size());
  if (mine.size() == 1) {
    outcomes[0] = run_role(req, mine[0]);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < mine.size(); ++i) {
      threads.emplace_back([&, i] { outcomes[i] = run_role(req, mine[i]); });
    }
    for (auto& t : threads) t.join();
  }

  for (const auto& o : outcomes) {
    if (o.error) throw *o.error;
  }
  std::optional<EncodedPoint> key;
  for (const auto& o : outcomes) {
    EncodedPoint k = encode_point(o.output->public_key);
    if (key && *key != k) throw Error(ErrorCode::kAgentsDisagree, "roles of one agent disagree on the key");
    key = k;
  }
  res.public_key.assign(key->begin(), key->end());
  for (std::size_t i = 0; i < mine.size(); ++i) {
    const auto& out = *outcomes[i].output;
    if (out.exchange) {
      EncodedPoint s = encode_point(out.exchange->shared_point);
      res.shared_point.assign(s.begin(), s.end());
      res.psk.assign(out.exchange->psk.begin(), out.exchange->psk.end());
    }
    if (out.key) store_->stage(req.key_id, *out.key, req.version);
  }
  return res;
}

Agent::RoleOutcome Agent::run_role(const AgentRequest& req, const RosterEntry& me) {
  RoleOutcome out;
  try {
    std::vector<std::string> members;
    for (const auto& e : req.roster) members.push_back(e.member);
    auto channel_rng = rng_for(req, me.member + "/channel");
    net::RoomChannel channel(hub_, req.request_id, me.member, members, *channel_rng);
    auto session_rng = rng_for(req, me.member + "/session");
    SessionId sid = session_id_for(req.request_id);

    auto run = [&](Session session) {
      SessionOutput o = drive(req, me, session, channel);
      out.output = std::move(o);
    };
    switch (req.op) {
      case Operation::kKeygen:
        run(make_keygen_session(KeygenConfig{sid, req.params, PartyId{me.sender}}, std::move(session_rng)));
        break;
      case Operation::kExchange:
      case Operation::kPskExchange: {
        auto stored = store_->current(req.key_id);
        if (!stored) throw Error(ErrorCode::kUnknownKey, options_.name + " holds no share of '" + req.key_id + "'");
        if (!(stored->record.params == req.params) || stored->record.self.value != me.sender) {
          throw Error(ErrorCode::kPreconditionViolation, "stored share does not match the request");
        }
        GroupPoint peer = decode_point(req.peer_point, req.params.curve, DecodeMode::kSanitize);
        std::vector<PartyId> subset;
        for (auto s : req.subset) subset.push_back(PartyId{s});
        run(make_exchange_session(ExchangeConfig{sid, stored->record, peer, subset}, std::move(session_rng)));
        break;
      }
      case Operation::kReshare: {
        std::vector<PartyId> subset;
        for (auto s : req.subset) subset.push_back(PartyId{s});
        ReshareConfig cfg{sid, req.params, req.new_params, subset, std::nullopt};
        if (!req.expected_public_key.empty()) {
          cfg.expected_public_key = decode_point(req.expected_public_key, req.params.curve);
        }
        if (is_new_role(me.sender)) {
          run(make_reshare_new_session(cfg, PartyId{role_party(me.sender)}, std::move(session_rng)));
        } else {
          auto stored = store_->current(req.key_id);
          if (!stored) throw Error(ErrorCode::kUnknownKey, options_.name + " holds no share of '" + req.key_id + "'");
          if (stored->record.self.value != me.sender) {
            throw Error(ErrorCode::kPreconditionViolation, "stored share does not match the request");
          }
          run(make_reshare_old_session(cfg, stored->record, std::move(session_rng)));
        }
        break;
      }
    }
  } catch (const Error& e) {
    out.error = e;
  }
  return out;
}

SessionOutput Agent::drive(const AgentRequest& req, const RosterEntry& me, Session& session,
                           net::RoomChannel& channel) {
  std::map<std::uint32_t, std::string> member_of;
  std::map<std::string, std::uint32_t> sender_of;
  for (const auto& e : req.roster) {
    member_of[e.sender] = e.member;
    sender_of[e.member] = e.sender;
  }
  const auto round_timeout = std::chrono::milliseconds(req.round_timeout_ms);

  auto dispatch = [&](const std::vector<ProtocolEnvelope>& out) {
    for (const auto& env : out) {
      Bytes wire = serialize(env);
      if (env.recipient) {
        auto it = member_of.find(*env.recipient);
        if (it == member_of.end()) throw Error(ErrorCode::kUnknownRecipient, "recipient outside the roster");
        channel.send(it->second, wire);
      } else {
        channel.broadcast(wire);
      }
    }
  };
  auto notify_round = [&] {
    RoundHook hook;
    {
      std::lock_guard lock(hook_mu_);
      hook = hook_;
    }
    if (hook) hook(req, me.sender, session.round());
  };

  channel.join();
  try {
    std::uint8_t round = session.round();
    auto deadline = Clock::now() + round_timeout;
    notify_round();
    StepResult step = session.start();
    dispatch(step.outgoing);
    while (!step.output) {
      if (crashed_) throw Error(ErrorCode::kAgentUnavailable, options_.name + " is down");
      auto ev = channel.next(std::min(deadline, Clock::now() + 20ms));
      if (crashed_) throw Error(ErrorCode::kAgentUnavailable, options_.name + " is down");
      if (!ev) {
        if (Clock::now() >= deadline) {
          session.abort(ErrorCode::kMissingConfirmation);
          throw Error(ErrorCode::kMissingConfirmation,
                      "round " + std::to_string(session.round()) + " timed out at " + me.member);
        }
        continue;
      }
      switch (ev->kind) {
        case net::ChannelEvent::Kind::kAbort:
          session.abort(ErrorCode::kSessionAborted);
          throw Error(ErrorCode::kSessionAborted,
                      ev->from + " aborted the session (" + std::string(error_code_name(ev->code)) + ")");
        case net::ChannelEvent::Kind::kBroadcast:
        case net::ChannelEvent::Kind::kDirect: {
          ProtocolEnvelope env = parse_envelope(ev->payload);
          auto it = sender_of.find(ev->from);
          if (it == sender_of.end() || it->second != env.sender) {
            throw Error(ErrorCode::kUnknownSender, "envelope sender does not match room identity " + ev->from);
          }
          if (ev->kind == net::ChannelEvent::Kind::kDirect) env.recipient = me.sender;
          step = session.step(std::span<const ProtocolEnvelope>(&env, 1));
          dispatch(step.outgoing);
          break;
        }
      }
      if (session.round() != round) {
        round = session.round();
        deadline = Clock::now() + round_timeout;
        if (!step.output) notify_round();
      }
    }
    return std::move(*step.output);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kAgentUnavailable && e.code() != ErrorCode::kSessionAborted) channel.abort(e.code());
    throw;
  }
}

}  // namespace tdh::orch
