#include "support/protocol_harness.hpp"

#include <deque>
#include <stdexcept>

namespace harness {

using namespace tdh;

SessionId session_id(const std::string& label) {
  Digest d = sha256(ByteSpan(reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
  SessionId id{};
  std::copy(d.begin(), d.begin() + id.size(), id.begin());
  return id;
}

RunResult run(std::vector<Session>& sessions, const Tamper& tamper, bool relay_aborts) {
  RunResult res;
  std::map<std::uint32_t, std::size_t> index;
  for (std::size_t i = 0; i < sessions.size(); ++i) index[sessions[i].self()] = i;

  struct Delivery {
    std::uint32_t to;
    ProtocolEnvelope env;
  };
  std::deque<Delivery> queue;

  auto record_abort = [&](std::uint32_t party, ErrorCode code) {
    res.aborts.emplace(party, code);
    if (!relay_aborts) return;
    for (auto& s : sessions) {
      if (!s.finished() && !s.aborted()) {
        s.abort(ErrorCode::kSessionAborted);
        res.aborts.emplace(s.self(), ErrorCode::kSessionAborted);
      }
    }
  };

  auto emit = [&](std::uint32_t from, StepResult&& step) {
    for (auto& env : step.outgoing) {
      if (tamper) tamper(env);
      res.trace.push_back({TraceEvent::Kind::kSend, from, env});
      if (env.recipient) {
        queue.push_back({*env.recipient, env});
      } else {
        for (const auto& s : sessions) queue.push_back({s.self(), env});
      }
    }
    if (step.output) res.outputs.emplace(from, std::move(*step.output));
  };

  for (auto& s : sessions) {
    try {
      emit(s.self(), s.start());
    } catch (const Error& e) {
      record_abort(s.self(), e.code());
    }
  }
  while (!queue.empty()) {
    Delivery d = std::move(queue.front());
    queue.pop_front();
    auto it = index.find(d.to);
    if (it == index.end()) throw std::logic_error("delivery to unknown party");
    Session& s = sessions[it->second];
    if (s.aborted() || s.finished()) continue;
    res.trace.push_back({TraceEvent::Kind::kReceive, d.to, d.env});
    try {
      emit(d.to, s.step(std::span<const ProtocolEnvelope>(&d.env, 1)));
    } catch (const Error& e) {
      record_abort(d.to, e.code());
    }
  }
  return res;
}

std::vector<KeyShareRecord> keygen(const SchemeParams& params, const std::string& seed) {
  std::vector<Session> sessions;
  for (auto id : committee_ids(params.n)) {
    sessions.push_back(make_keygen_session(KeygenConfig{session_id("kg/" + seed), params, id},
                                           std::make_unique<SeededRng>(seed + "/" + std::to_string(id.value))));
  }
  RunResult r = run(sessions);
  if (r.outputs.size() != params.n) throw std::runtime_error("keygen did not complete");
  std::vector<KeyShareRecord> out;
  for (auto& [id, o] : r.outputs) out.push_back(*o.key);
  return out;
}

std::vector<SessionOutput> exchange(const std::vector<KeyShareRecord>& records, const std::vector<PartyId>& subset,
                                    const GroupPoint& peer, const std::string& seed) {
  std::vector<Session> sessions;
  for (auto id : subset) {
    const KeyShareRecord& rec = records.at(id.value - 1);
    sessions.push_back(make_exchange_session(ExchangeConfig{session_id("ex/" + seed), rec, peer, subset},
                                             std::make_unique<SeededRng>(seed + "/" + std::to_string(id.value))));
  }
  RunResult r = run(sessions);
  if (r.outputs.size() != subset.size()) throw std::runtime_error("exchange did not complete");
  std::vector<SessionOutput> out;
  for (auto& [id, o] : r.outputs) out.push_back(o);
  return out;
}

std::vector<KeyShareRecord> reshare(const std::vector<KeyShareRecord>& records, const std::vector<PartyId>& old_subset,
                                    const SchemeParams& next, const std::string& seed) {
  ReshareConfig cfg{session_id("rs/" + seed), records.front().params, next, old_subset,
                    records.front().public_key};
  std::vector<Session> sessions;
  for (auto id : old_subset) {
    sessions.push_back(make_reshare_old_session(cfg, records.at(id.value - 1),
                                                std::make_unique<SeededRng>(seed + "/old/" + std::to_string(id.value))));
  }
  for (auto id : committee_ids(next.n)) {
    sessions.push_back(
        make_reshare_new_session(cfg, id, std::make_unique<SeededRng>(seed + "/new/" + std::to_string(id.value))));
  }
  RunResult r = run(sessions);
  if (r.outputs.size() != sessions.size()) throw std::runtime_error("reshare did not complete");
  std::vector<KeyShareRecord> out;
  for (auto& [id, o] : r.outputs) {
    if (o.key) out.push_back(*o.key);
  }
  return out;
}

oracle::Bytes32 oracle_secret(const std::vector<KeyShareRecord>& records) {
  const SchemeParams& p = records.front().params;
  if (p.scheme == Scheme::kNaive) {
    std::vector<oracle::Bytes32> values;
    for (const auto& r : records) values.push_back(r.private_share.to_bytes());
    return oracle::scalar_sum(p.curve, values);
  }
  std::vector<std::pair<std::uint32_t, oracle::Bytes32>> points;
  for (std::size_t i = 0; i <= p.t; ++i) points.emplace_back(records[i].self.value, records[i].private_share.to_bytes());
  return oracle::interpolate_at_zero(p.curve, points);
}

}  // namespace harness
