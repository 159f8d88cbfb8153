#include <benchmark/benchmark.h>

#include <deque>
#include <map>

#include "tdh/protocols.hpp"

using namespace tdh;

namespace {

CurveId curve_arg(const benchmark::State& state) {
  return state.range(0) == 0 ? CurveId::kP256 : CurveId::kCurve25519;
}

void label_curve(benchmark::State& state) { state.SetLabel(std::string(curve_name(curve_arg(state)))); }

// Delivers every envelope in memory until all sessions finish.
std::map<std::uint32_t, SessionOutput> drive(std::vector<Session>& sessions) {
  std::map<std::uint32_t, std::size_t> index;
  for (std::size_t i = 0; i < sessions.size(); ++i) index[sessions[i].self()] = i;
  std::deque<std::pair<std::uint32_t, ProtocolEnvelope>> queue;
  std::map<std::uint32_t, SessionOutput> out;
  auto emit = [&](std::uint32_t from, StepResult&& step) {
    for (auto& env : step.outgoing) {
      if (env.recipient) {
        queue.emplace_back(*env.recipient, env);
      } else {
        for (const auto& s : sessions) queue.emplace_back(s.self(), env);
      }
    }
    if (step.output) out.emplace(from, std::move(*step.output));
  };
  for (auto& s : sessions) emit(s.self(), s.start());
  while (!queue.empty()) {
    auto [to, env] = std::move(queue.front());
    queue.pop_front();
    Session& s = sessions[index.at(to)];
    if (s.finished()) continue;
    emit(to, s.step(std::span<const ProtocolEnvelope>(&env, 1)));
  }
  return out;
}

SessionId sid(std::uint64_t counter) {
  SessionId id{};
  for (int i = 0; i < 8; ++i) id[i] = static_cast<std::uint8_t>(counter >> (8 * i));
  return id;
}

std::vector<KeyShareRecord> run_keygen(const SchemeParams& params, std::uint64_t counter) {
  std::vector<Session> sessions;
  for (auto id : committee_ids(params.n)) {
    sessions.push_back(make_keygen_session({sid(counter), params, id},
                                           std::make_unique<SeededRng>("keygen/" + std::to_string(id.value))));
  }
  std::vector<KeyShareRecord> records;
  for (auto& [party, o] : drive(sessions)) records.push_back(*o.key);
  return records;
}

void BM_PointMul(benchmark::State& state) {
  CurveId curve = curve_arg(state);
  SeededRng rng("point-mul");
  auto s = GroupScalar::random(curve, rng);
  auto p = GroupPoint::generator(curve);
  for (auto _ : state) {
    p = point_mul(s, p);
    benchmark::DoNotOptimize(p);
  }
  label_curve(state);
}
BENCHMARK(BM_PointMul)->Arg(0)->Arg(1);

void BM_PointMulPublic(benchmark::State& state) {
  CurveId curve = curve_arg(state);
  SeededRng rng("point-mul-public");
  auto s = GroupScalar::random(curve, rng);
  auto p = GroupPoint::generator(curve);
  for (auto _ : state) {
    p = point_mul_public(s, p);
    benchmark::DoNotOptimize(p);
  }
  label_curve(state);
}
BENCHMARK(BM_PointMulPublic)->Arg(0)->Arg(1);

void BM_EncodeDecode(benchmark::State& state) {
  CurveId curve = curve_arg(state);
  SeededRng rng("codec");
  auto p = point_mul(GroupScalar::random(curve, rng), GroupPoint::generator(curve));
  for (auto _ : state) {
    auto enc = encode_point(p);
    benchmark::DoNotOptimize(decode_point(enc, curve));
  }
  label_curve(state);
}
BENCHMARK(BM_EncodeDecode)->Arg(0)->Arg(1);

void BM_ScalarInverse(benchmark::State& state) {
  CurveId curve = curve_arg(state);
  SeededRng rng("inverse");
  auto s = GroupScalar::random(curve, rng);
  for (auto _ : state) benchmark::DoNotOptimize(s.inverse());
  label_curve(state);
}
BENCHMARK(BM_ScalarInverse)->Arg(0)->Arg(1);

void BM_FeldmanVerify(benchmark::State& state) {
  CurveId curve = curve_arg(state);
  SeededRng rng("feldman");
  auto dealing = shamir_share(GroupScalar::random(curve, rng), 2, committee_ids(5), rng);
  const auto& share = dealing.shares.begin()->second;
  for (auto _ : state) benchmark::DoNotOptimize(feldman_verify(share, dealing.commitments));
  label_curve(state);
}
BENCHMARK(BM_FeldmanVerify)->Arg(0)->Arg(1);

// range(1): 0 naive, 1 threshold; committee of 3.
SchemeParams params_arg(const benchmark::State& state) {
  SchemeParams p;
  p.curve = curve_arg(state);
  p.scheme = state.range(1) == 0 ? Scheme::kNaive : Scheme::kThreshold;
  p.n = 3;
  p.t = p.scheme == Scheme::kNaive ? 2 : 1;
  return p;
}

void label_params(benchmark::State& state) {
  auto p = params_arg(state);
  state.SetLabel(std::string(scheme_name(p.scheme)) + "/" + std::string(curve_name(p.curve)));
}

void BM_KeygenSessions(benchmark::State& state) {
  auto params = params_arg(state);
  std::uint64_t counter = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_keygen(params, ++counter));
  label_params(state);
}
BENCHMARK(BM_KeygenSessions)->ArgsProduct({{0, 1}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ExchangeSessions(benchmark::State& state) {
  auto params = params_arg(state);
  auto records = run_keygen(params, 0);
  SeededRng rng("peer");
  auto peer = point_mul(GroupScalar::random(params.curve, rng), GroupPoint::generator(params.curve));
  std::vector<PartyId> subset;
  for (std::uint16_t i = 0; i <= params.t; ++i) subset.push_back(records[i].self);
  std::uint64_t counter = 1;
  for (auto _ : state) {
    std::vector<Session> sessions;
    auto id = sid(++counter);
    for (std::uint16_t i = 0; i <= params.t; ++i) {
      sessions.push_back(make_exchange_session({id, records[i], peer, subset},
                                               std::make_unique<SeededRng>(counter * 16 + i)));
    }
    benchmark::DoNotOptimize(drive(sessions));
  }
  label_params(state);
}
BENCHMARK(BM_ExchangeSessions)->ArgsProduct({{0, 1}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
