#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "bench/bench.hpp"
#include "tdh/aead.hpp"
#include "tdh/net/hub_server.hpp"
#include "tdh/orch/service.hpp"
#include "tdh/orch/stack.hpp"

using namespace tdh;

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string require_env(const char* name) {
  std::string v = env_or(name, "");
  if (v.empty()) throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be set");
  return v;
}

void wait_for_signal(const sigset_t& set) {
  int sig = 0;
  sigwait(&set, &sig);
}

struct ClientOptions {
  bool in_process = false;
  std::string state_dir;
  std::string profile = "local";
  std::size_t agents = 5;
  std::string token = env_or("TDH_TOKEN", "demo-token");
};

// Talks to BROKER_ADDR, or runs a whole deployment in this process with its
// state under --state so that separate invocations see the same keys.
class Client {
 public:
  explicit Client(const ClientOptions& o) : opts_(o) {
    std::string broker = env_or("BROKER_ADDR", "");
    if (!o.in_process && !broker.empty()) {
      remote_.emplace(net::parse_endpoint(broker));
      return;
    }
    orch::StackOptions so;
    so.agents = o.agents;
    so.profile = net::profile_by_name(o.profile);
    so.seed = env_or("TDH_SEED", "");
    so.root = o.state_dir;
    so.persist_registry = !o.state_dir.empty();
    so.customers = {{o.token, "cli"}};
    stack_ = std::make_unique<orch::Stack>(so);
  }

  orch::OperationResult submit(orch::OperationRequest req) {
    req.credential = opts_.token;
    if (remote_) return remote_->submit(req);
    return stack_->submit(req);
  }

 private:
  ClientOptions opts_;
  std::optional<orch::BrokerClient> remote_;
  std::unique_ptr<orch::Stack> stack_;
};

int report_failure(const orch::OperationResult& res) {
  std::cerr << "error: " << (res.message.empty() ? std::string(error_code_name(*res.error)) : res.message) << "\n";
  return 1;
}

void print_result(const std::string& key_id, const orch::OperationResult& res) {
  std::cout << "key_id: " << key_id << "\n";
  std::cout << "public_key: " << to_hex(res.public_key) << "\n";
  if (!res.shared_point.empty()) std::cout << "shared_point: " << to_hex(res.shared_point) << "\n";
  if (!res.psk.empty()) std::cout << "psk: " << to_hex(res.psk) << "\n";
  std::cout << "version: " << res.version << "\n";
  std::cout << "agents:";
  for (const auto& a : res.agents) std::cout << " " << a;
  std::cout << "\n";
}

SchemeParams make_params(const std::string& scheme, const std::string& curve, int t, int n) {
  SchemeParams p;
  p.scheme = parse_scheme(scheme);
  p.curve = parse_curve(curve);
  if (n < 1 || n > 0xffff) throw Error(ErrorCode::kInvalidArgument, "--n out of range");
  p.n = static_cast<std::uint16_t>(n);
  if (t < 0) t = p.scheme == Scheme::kNaive ? n - 1 : 1;
  if (t > 0xffff) throw Error(ErrorCode::kInvalidArgument, "--t out of range");
  p.t = static_cast<std::uint16_t>(t);
  p.validate();
  return p;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::pair<std::string, std::string> split_pair(const std::string& s, const char* what) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must look like name=value, got '" + s + "'");
  }
  return {s.substr(0, eq), s.substr(eq + 1)};
}

}  // namespace

int main(int argc, char** argv) {
  // Daemons wait for these with sigwait; block them before any thread starts.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  CLI::App app{"Threshold Diffie-Hellman key service"};
  app.require_subcommand(1);

  ClientOptions client;
  auto add_client_flags = [&](CLI::App* cmd) {
    cmd->add_flag("--in-process", client.in_process, "Run hub, broker and agents inside this process");
    cmd->add_option("--state", client.state_dir, "State directory for --in-process runs")
        ->default_str(".tdh-state");
    cmd->add_option("--profile", client.profile, "Network profile for --in-process runs (local, lan, wan, longhaul)");
    cmd->add_option("--agents", client.agents, "Number of in-process agents");
  };
  client.state_dir = env_or("STORE_PATH", ".tdh-state");

  std::string scheme = "threshold", curve = "curve25519", key_id = "default", peer_hex;
  int t = -1, n = 3;
  auto add_param_flags = [&](CLI::App* cmd) {
    cmd->add_option("--scheme", scheme, "naive or threshold");
    cmd->add_option("--curve", curve, "p256 or curve25519");
    cmd->add_option("--t", t, "Threshold (naive: n-1)");
    cmd->add_option("--n", n, "Committee size");
  };

  auto* keygen = app.add_subcommand("keygen", "Generate a shared key");
  add_client_flags(keygen);
  add_param_flags(keygen);
  keygen->add_option("--key-id", key_id, "Name of the key");

  auto* exchange = app.add_subcommand("exchange", "Diffie-Hellman with a peer public key");
  add_client_flags(exchange);
  exchange->add_option("--key-id", key_id, "Name of the key");
  exchange->add_option("--peer-pubkey", peer_hex, "33-byte encoded point or 32-byte X25519 key, hex")->required();

  auto* reshare = app.add_subcommand("reshare", "Move a key to a new (t, n) committee");
  add_client_flags(reshare);
  add_param_flags(reshare);
  reshare->add_option("--key-id", key_id, "Name of the key");

  auto* psk_demo = app.add_subcommand("psk-demo", "Threshold PSK against a classic X25519 peer");
  add_client_flags(psk_demo);
  add_param_flags(psk_demo);

  auto* bench = app.add_subcommand("bench", "Benchmarks");
  bench->require_subcommand(1);
  auto* bench_run = bench->add_subcommand("run", "Run the measurement matrix and write CSV");
  std::string matrix = "default", profiles = "local,lan,wan,longhaul", out_path, csv_path;
  std::size_t trials = 20;
  bool with_report = false;
  bench_run->add_option("--matrix", matrix, "Matrix to run")->check(CLI::IsMember({"default"}));
  bench_run->add_option("--trials", trials, "Trials per cell");
  bench_run->add_option("--profiles", profiles, "Comma-separated network profiles");
  bench_run->add_option("--out", out_path, "CSV output file (default stdout)");
  bench_run->add_flag("--report", with_report, "Print the comparison report to stderr afterwards");
  auto* bench_compare = bench->add_subcommand("compare", "Compare a CSV with the reference timings");
  bench_compare->add_option("--csv", csv_path, "CSV produced by bench run")->required();

  std::string listen, hub_addr = env_or("HUB_ADDR", "127.0.0.1:7700"), name, registry;
  std::vector<std::string> agent_specs, customer_specs;
  int round_timeout_ms = 30000;
  auto* hub = app.add_subcommand("hub", "Run the hub");
  hub->add_option("--listen", listen, "Address to listen on (default HUB_ADDR)");
  auto* broker = app.add_subcommand("broker", "Run the broker");
  broker->add_option("--listen", listen, "Address to listen on (default BROKER_ADDR)");
  broker->add_option("--hub", hub_addr, "Hub address (default HUB_ADDR)");
  broker->add_option("--agent", agent_specs, "name=host:port, repeatable")->required();
  broker->add_option("--customer", customer_specs, "token=name, repeatable (default demo-token=demo)");
  broker->add_option("--registry", registry, "File keeping the key registry across restarts");
  broker->add_option("--round-timeout-ms", round_timeout_ms, "Per-round deadline for agents");
  auto* agent = app.add_subcommand("agent", "Run an agent");
  agent->add_option("--name", name, "Agent name")->required();
  agent->add_option("--listen", listen, "Address to listen on")->required();
  agent->add_option("--hub", hub_addr, "Hub address (default HUB_ADDR)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*keygen) {
      Client c(client);
      orch::OperationRequest req;
      req.op = orch::Operation::kKeygen;
      req.key_id = key_id;
      req.params = make_params(scheme, curve, t, n);
      auto res = c.submit(req);
      if (!res.ok()) return report_failure(res);
      print_result(key_id, res);
      return 0;
    }
    if (*exchange) {
      Bytes peer = from_hex(peer_hex);
      orch::OperationRequest req;
      req.key_id = key_id;
      if (peer.size() == kEncodedPointBytes) {
        req.op = orch::Operation::kExchange;
      } else if (peer.size() == 32) {
        req.op = orch::Operation::kPskExchange;
      } else {
        throw Error(ErrorCode::kInvalidEncoding, "--peer-pubkey must be 33 or 32 bytes, got " + std::to_string(peer.size()));
      }
      req.remote_pubkey = std::move(peer);
      Client c(client);
      auto res = c.submit(req);
      if (!res.ok()) return report_failure(res);
      print_result(key_id, res);
      return 0;
    }
    if (*reshare) {
      Client c(client);
      orch::OperationRequest req;
      req.op = orch::Operation::kReshare;
      req.key_id = key_id;
      req.params = make_params(scheme, curve, t, n);
      auto res = c.submit(req);
      if (!res.ok()) return report_failure(res);
      print_result(key_id, res);
      return 0;
    }
    if (*psk_demo) {
      SchemeParams params = make_params(scheme, curve, t, n);
      if (params.curve != CurveId::kCurve25519) throw Error(ErrorCode::kCurveMismatch, "psk-demo needs curve25519");
      // A throwaway deployment unless a broker is configured.
      if (!client.in_process && env_or("BROKER_ADDR", "").empty()) client.state_dir.clear();
      client.agents = std::max<std::size_t>(client.agents, params.n);
      Client c(client);
      auto rng = make_rng_from_env("psk-demo");
      Bytes tag(8);
      rng->fill(tag);
      std::string id = "psk-demo-" + to_hex(tag);

      orch::OperationRequest kg;
      kg.op = orch::Operation::kKeygen;
      kg.key_id = id;
      kg.params = params;
      auto key = c.submit(kg);
      if (!key.ok()) return report_failure(key);
      auto u = to_x25519_u(decode_point(key.public_key, CurveId::kCurve25519));

      // The classic side only ever sees the u-coordinate, like any X25519 peer.
      X25519KeyPair peer(*rng);
      orch::OperationRequest ex;
      ex.op = orch::Operation::kPskExchange;
      ex.key_id = id;
      ex.remote_pubkey = to_bytes(peer.public_key());
      auto res = c.submit(ex);
      if (!res.ok()) return report_failure(res);

      auto shared_u = peer.agree(u);
      Bytes encoded(shared_u.begin(), shared_u.end());
      encoded.push_back(0);
      Bytes input = to_bytes(std::string_view("TDH-PSK-v1"));
      input.insert(input.end(), encoded.begin(), encoded.end());
      Digest peer_psk = sha256(input);

      std::cout << "virtual party (" << scheme_name(params.scheme) << " t=" << params.t << " n=" << params.n
                << ") x25519 public key: " << to_hex(u) << "\n";
      std::cout << "classic peer x25519 public key: " << to_hex(peer.public_key()) << "\n";
      std::cout << "virtual party psk: " << to_hex(res.psk) << "\n";
      std::cout << "classic peer psk:  " << to_hex(peer_psk) << "\n";
      bool match = res.psk == Bytes(peer_psk.begin(), peer_psk.end());
      std::cout << (match ? "PSK MATCH" : "PSK MISMATCH") << "\n";
      return match ? 0 : 1;
    }
    if (*bench_run) {
      bench::BenchOptions bo;
      bo.trials = trials;
      bo.seed = env_or("TDH_SEED", "");
      bo.on_row = [](const bench::BenchResult& r) {
        std::cerr << bench::scheme_label(r.cell.scheme) << " " << bench::protocol_label(r.cell.protocol) << " "
                  << curve_name(r.cell.curve) << " " << r.cell.profile << ": mean " << r.mean_ms << " ms over "
                  << r.trials << " trials\n";
      };
      auto results = bench::run_matrix(bench::default_matrix(split_list(profiles)), bo);
      if (out_path.empty()) {
        bench::write_csv(std::cout, results);
      } else {
        std::ofstream out(out_path);
        bench::write_csv(out, results);
        if (!out) throw Error(ErrorCode::kStorageFailure, "cannot write " + out_path);
      }
      if (with_report) std::cerr << "\n" << bench::compare_report(results);
      return 0;
    }
    if (*bench_compare) {
      std::ifstream in(csv_path);
      if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + csv_path);
      std::cout << bench::compare_report(bench::read_csv(in));
      return 0;
    }
    if (*hub) {
      bool faults = env_or("TDH_FAULTS", "") == "1";
      net::Hub h(faults);
      net::HubServer server(h, net::parse_endpoint(listen.empty() ? hub_addr : listen));
      std::cerr << "hub listening on port " << server.port() << (faults ? " (fault injection enabled)" : "") << "\n";
      wait_for_signal(signals);
      return 0;
    }
    if (*broker) {
      std::string token = require_env("AGENT_TOKEN");
      std::map<std::string, std::string> customers;
      for (const auto& s : customer_specs) customers.insert(split_pair(s, "--customer"));
      if (customers.empty()) customers = {{"demo-token", "demo"}};
      net::TcpHubLink link(net::parse_endpoint(hub_addr));
      orch::BrokerOptions bo;
      bo.agent_token = token;
      bo.round_timeout = std::chrono::milliseconds(round_timeout_ms);
      bo.seed = env_or("TDH_SEED", "");
      bo.registry_path = registry;
      orch::Broker b(bo, std::make_unique<orch::BearerTokenAuthenticator>(customers), link);
      for (const auto& s : agent_specs) {
        auto [agent_name, addr] = split_pair(s, "--agent");
        b.add_agent(std::make_shared<orch::TcpAgentEndpoint>(agent_name, net::parse_endpoint(addr)));
      }
      orch::RequestServer server(net::parse_endpoint(listen.empty() ? env_or("BROKER_ADDR", "127.0.0.1:7701") : listen),
                                 [&b](ByteSpan req) { return b.handle(req); });
      std::cerr << "broker listening on port " << server.port() << " with " << agent_specs.size() << " agents\n";
      wait_for_signal(signals);
      return 0;
    }
    if (*agent) {
      std::string token = require_env("AGENT_TOKEN");
      std::filesystem::path store = require_env("STORE_PATH");
      net::TcpHubLink link(net::parse_endpoint(hub_addr));
      orch::Agent a({name, token, store / "shares", store / "store.key", env_or("TDH_SEED", "")}, link);
      orch::RequestServer server(net::parse_endpoint(listen), [&a](ByteSpan req) { return a.handle(req); });
      std::cerr << "agent " << name << " listening on port " << server.port() << "\n";
      wait_for_signal(signals);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
