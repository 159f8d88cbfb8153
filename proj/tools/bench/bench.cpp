#include "bench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tdh/orch/stack.hpp"

namespace tdh::bench {

using Clock = std::chrono::steady_clock;

namespace {

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

SchemeParams params_for(const BenchCell& cell) {
  SchemeParams p;
  p.curve = cell.curve;
  p.scheme = cell.scheme == BenchScheme::kNaive ? Scheme::kNaive : Scheme::kThreshold;
  p.t = cell.t;
  p.n = cell.n;
  p.validate();
  return p;
}

std::unique_ptr<Rng> rng_for(const BenchOptions& options, const std::string& label) {
  if (options.seed.empty()) return std::make_unique<SystemRng>();
  return std::make_unique<SeededRng>(options.seed + "/" + label);
}

std::string cell_label(const BenchCell& c) {
  return std::string(scheme_label(c.scheme)) + "/" + std::string(protocol_label(c.protocol)) + "/" +
         std::string(curve_name(c.curve)) + "/" + c.profile;
}

std::vector<double> run_classic(const BenchCell& cell, const BenchOptions& options) {
  auto rng = rng_for(options, cell_label(cell));
  GroupPoint g = GroupPoint::generator(cell.curve);
  EncodedPoint peer = encode_point(scalar_random(cell.curve, *rng) * g);
  std::vector<double> samples;
  samples.reserve(options.classic_trials);
  volatile std::uint8_t sink = 0;
  for (std::size_t i = 0; i < options.classic_trials; ++i) {
    GroupScalar sk = scalar_random(cell.curve, *rng);
    auto start = Clock::now();
    EncodedPoint out = cell.protocol == BenchProtocol::kKeygen
                           ? encode_point(point_mul(scalar_random(cell.curve, *rng), g))
                           : encode_point(point_mul(sk, decode_point(peer, cell.curve)));
    samples.push_back(elapsed_ms(start));
    sink = sink ^ out[1];
  }
  return samples;
}

std::vector<double> run_stack(const BenchCell& cell, const BenchOptions& options) {
  orch::StackOptions so;
  so.agents = cell.n;
  so.profile = net::profile_by_name(cell.profile);
  so.seed = options.seed.empty() ? "" : options.seed + "/" + cell_label(cell);
  so.round_timeout = options.round_timeout;
  so.health_ttl = std::chrono::hours(1);
  orch::Stack stack(so);
  SchemeParams params = params_for(cell);
  auto rng = rng_for(options, cell_label(cell) + "/peer");

  auto submit = [&](orch::OperationRequest req) {
    req.credential = "demo-token";
    auto res = stack.submit(req);
    if (!res.ok()) throw Error(*res.error, cell_label(cell) + ": " + res.message);
    return res;
  };
  auto keygen = [&](const std::string& id) {
    orch::OperationRequest req;
    req.op = orch::Operation::kKeygen;
    req.key_id = id;
    req.params = params;
    return submit(req);
  };
  auto exchange_req = [&] {
    orch::OperationRequest req;
    req.op = orch::Operation::kExchange;
    req.key_id = "bench";
    EncodedPoint peer = encode_point(scalar_random(cell.curve, *rng) * GroupPoint::generator(cell.curve));
    req.remote_pubkey.assign(peer.begin(), peer.end());
    return req;
  };

  std::vector<double> samples;
  if (cell.protocol == BenchProtocol::kKeygen) {
    keygen("warm-up");
    for (std::size_t i = 0; i < options.trials; ++i) {
      auto start = Clock::now();
      keygen("k" + std::to_string(i));
      samples.push_back(elapsed_ms(start));
    }
  } else {
    keygen("bench");
    submit(exchange_req());
    for (std::size_t i = 0; i < options.trials; ++i) {
      auto req = exchange_req();
      auto start = Clock::now();
      submit(req);
      samples.push_back(elapsed_ms(start));
    }
  }
  return samples;
}

struct GroupKey {
  BenchScheme scheme;
  BenchProtocol protocol;
  CurveId curve;
  auto operator<=>(const GroupKey&) const = default;
};

std::map<GroupKey, std::map<std::string, const BenchResult*>> by_profile(const std::vector<BenchResult>& results) {
  std::map<GroupKey, std::map<std::string, const BenchResult*>> out;
  for (const auto& r : results) {
    if (r.cell.scheme == BenchScheme::kClassic) continue;
    out[{r.cell.scheme, r.cell.protocol, r.cell.curve}][r.cell.profile] = &r;
  }
  return out;
}

std::string group_name(const GroupKey& g) {
  return std::string(scheme_label(g.scheme)) + " " + std::string(protocol_label(g.protocol)) + " " +
         std::string(curve_name(g.curve));
}

}  // namespace

std::string_view scheme_label(BenchScheme s) {
  switch (s) {
    case BenchScheme::kClassic:
      return "classic";
    case BenchScheme::kNaive:
      return "naive";
    case BenchScheme::kThreshold:
      return "threshold";
  }
  return "unknown";
}

std::string_view protocol_label(BenchProtocol p) { return p == BenchProtocol::kKeygen ? "keygen" : "exchange"; }

BenchScheme parse_bench_scheme(std::string_view s) {
  for (auto v : {BenchScheme::kClassic, BenchScheme::kNaive, BenchScheme::kThreshold}) {
    if (scheme_label(v) == s) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown scheme '" + std::string(s) + "'");
}

BenchProtocol parse_bench_protocol(std::string_view s) {
  for (auto v : {BenchProtocol::kKeygen, BenchProtocol::kExchange}) {
    if (protocol_label(v) == s) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown protocol '" + std::string(s) + "'");
}

std::vector<BenchCell> default_matrix(const std::vector<std::string>& profiles) {
  std::vector<BenchCell> cells;
  for (auto scheme : {BenchScheme::kClassic, BenchScheme::kNaive, BenchScheme::kThreshold}) {
    for (auto protocol : {BenchProtocol::kKeygen, BenchProtocol::kExchange}) {
      for (auto curve : {CurveId::kP256, CurveId::kCurve25519}) {
        if (scheme == BenchScheme::kClassic) {
          cells.push_back({scheme, protocol, curve, std::string(kNoProfile), 0, 1});
          continue;
        }
        for (const auto& p : profiles) cells.push_back({scheme, protocol, curve, net::profile_by_name(p).name, 2, 3});
      }
    }
  }
  return cells;
}

BenchResult summarize(const BenchCell& cell, std::vector<double> samples_ms) {
  if (samples_ms.empty()) throw Error(ErrorCode::kInvalidArgument, "no samples");
  BenchResult r;
  r.cell = cell;
  r.trials = samples_ms.size();
  r.samples_ms = samples_ms;
  std::sort(samples_ms.begin(), samples_ms.end());
  r.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) / static_cast<double>(samples_ms.size());
  std::size_t n = samples_ms.size();
  r.median_ms = n % 2 ? samples_ms[n / 2] : (samples_ms[n / 2 - 1] + samples_ms[n / 2]) / 2;
  std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  r.p95_ms = samples_ms[std::max<std::size_t>(rank, 1) - 1];
  return r;
}

BenchResult run_cell(const BenchCell& cell, const BenchOptions& options) {
  auto samples = cell.scheme == BenchScheme::kClassic ? run_classic(cell, options) : run_stack(cell, options);
  return summarize(cell, std::move(samples));
}

std::vector<BenchResult> run_matrix(const std::vector<BenchCell>& cells, const BenchOptions& options) {
  std::vector<BenchResult> out;
  for (const auto& c : cells) {
    out.push_back(run_cell(c, options));
    if (options.on_row) options.on_row(out.back());
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<BenchResult>& results) {
  out << kCsvHeader << "\n";
  for (const auto& r : results) {
    out << scheme_label(r.cell.scheme) << ',' << protocol_label(r.cell.protocol) << ',' << curve_name(r.cell.curve)
        << ',' << r.cell.profile << ',' << r.cell.t << ',' << r.cell.n << ',' << r.trials << ',' << fixed(r.mean_ms, 6)
        << ',' << fixed(r.median_ms, 6) << ',' << fixed(r.p95_ms, 6) << "\n";
  }
}

std::vector<BenchResult> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split(line, ',') != split(std::string(kCsvHeader), ',')) {
    throw Error(ErrorCode::kInvalidArgument, "missing or unexpected CSV header");
  }
  std::vector<BenchResult> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split(line, ',');
    if (f.size() != 10) throw Error(ErrorCode::kInvalidArgument, "line " + std::to_string(lineno) + ": expected 10 fields");
    try {
      BenchResult r;
      r.cell.scheme = parse_bench_scheme(f[0]);
      r.cell.protocol = parse_bench_protocol(f[1]);
      r.cell.curve = parse_curve(f[2]);
      r.cell.profile = f[3];
      r.cell.t = static_cast<std::uint16_t>(std::stoul(f[4]));
      r.cell.n = static_cast<std::uint16_t>(std::stoul(f[5]));
      r.trials = std::stoul(f[6]);
      r.mean_ms = std::stod(f[7]);
      r.median_ms = std::stod(f[8]);
      r.p95_ms = std::stod(f[9]);
      out.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw Error(ErrorCode::kInvalidArgument, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

const std::vector<ReferenceValue>& reference_table() {
  using S = BenchScheme;
  using P = BenchProtocol;
  constexpr auto P256 = CurveId::kP256;
  constexpr auto X = CurveId::kCurve25519;
  static const std::vector<ReferenceValue> table{
      {S::kClassic, P::kKeygen, P256, "-", 0.012861, "12.861 us"},
      {S::kClassic, P::kKeygen, X, "-", 0.0001, "100 ns"},
      {S::kClassic, P::kExchange, P256, "-", 0.0525, "52.5 us"},
      {S::kClassic, P::kExchange, X, "-", 0.068942, "68.942 us"},

      {S::kNaive, P::kKeygen, P256, "local", 2.258, "2.258 ms"},
      {S::kNaive, P::kKeygen, P256, "lan", 21.324, "21.324 ms"},
      {S::kNaive, P::kKeygen, P256, "wan", 250.288, "250.288 ms"},
      {S::kNaive, P::kKeygen, P256, "longhaul", 1610, "1.61 s"},
      {S::kNaive, P::kKeygen, X, "local", 21.997, "21.997 ms"},
      {S::kNaive, P::kKeygen, X, "lan", 34.557, "34. 557 ms", true},
      {S::kNaive, P::kKeygen, X, "wan", 154.237, "154.237 ms"},
      {S::kNaive, P::kKeygen, X, "longhaul", 1235, "1.235 s"},
      {S::kNaive, P::kExchange, P256, "local", 2.31, "2.31 ms"},
      {S::kNaive, P::kExchange, P256, "lan", 18.151, "18.151 ms"},
      {S::kNaive, P::kExchange, P256, "wan", 245.41, "245.41 ms"},
      {S::kNaive, P::kExchange, P256, "longhaul", 1604, "1.604 s"},
      {S::kNaive, P::kExchange, X, "local", 32.602, "32.602 ms"},
      {S::kNaive, P::kExchange, X, "lan", 44.634, "44.634 ms"},
      {S::kNaive, P::kExchange, X, "wan", 165.386, "165.386 ms"},
      {S::kNaive, P::kExchange, X, "longhaul", 841.412, "841. 412 ms", true},

      {S::kThreshold, P::kKeygen, P256, "local", 3.183, "3.183 ms"},
      {S::kThreshold, P::kKeygen, P256, "lan", 28.968, "28.968 ms"},
      {S::kThreshold, P::kKeygen, P256, "wan", 365.94, "365.94 ms"},
      {S::kThreshold, P::kKeygen, P256, "longhaul", 2407, "2.407 s"},
      {S::kThreshold, P::kKeygen, X, "local", 58.15, "58.15 ms"},
      {S::kThreshold, P::kKeygen, X, "lan", 78.546, "78.546 ms"},
      {S::kThreshold, P::kKeygen, X, "wan", 315.555, "315.555 ms"},
      {S::kThreshold, P::kKeygen, X, "longhaul", 2076, "2.076 s"},
      {S::kThreshold, P::kExchange, P256, "local", 3.728, "3.728 ms"},
      {S::kThreshold, P::kExchange, P256, "lan", 19.56, "19.56 ms"},
      {S::kThreshold, P::kExchange, P256, "wan", 245.143, "245.143 ms"},
      {S::kThreshold, P::kExchange, P256, "longhaul", 1604, "1.604 s"},
      {S::kThreshold, P::kExchange, X, "local", 20.734, "20.734 ms"},
      {S::kThreshold, P::kExchange, X, "lan", 33.235, "33.235 ms"},
      {S::kThreshold, P::kExchange, X, "wan", 153.001, "153.001 ms"},
      {S::kThreshold, P::kExchange, X, "longhaul", 832.781, "832.781 ms"},
  };
  return table;
}

std::optional<ReferenceValue> find_reference(const BenchCell& cell) {
  for (const auto& r : reference_table()) {
    if (r.scheme == cell.scheme && r.protocol == cell.protocol && r.curve == cell.curve && r.profile == cell.profile) {
      return r;
    }
  }
  return std::nullopt;
}

unsigned broadcast_rounds(BenchScheme scheme, BenchProtocol protocol) {
  switch (scheme) {
    case BenchScheme::kClassic:
      return 0;
    case BenchScheme::kNaive:
      return 2;  // commit, decommit
    case BenchScheme::kThreshold:
      return protocol == BenchProtocol::kKeygen ? 3 : 2;  // + share acknowledgement
  }
  return 0;
}

double latency_lower_bound_ms(const BenchCell& cell) {
  if (cell.scheme == BenchScheme::kClassic || cell.profile == kNoProfile) return 0;
  return broadcast_rounds(cell.scheme, cell.protocol) * 2.0 * net::profile_by_name(cell.profile).latency_ms;
}

std::vector<Check> ordering_checks(const std::vector<BenchResult>& results) {
  std::vector<Check> out;
  for (const auto& [key, profiles] : by_profile(results)) {
    std::vector<const BenchResult*> chain;
    for (const char* p : {"local", "lan", "wan", "longhaul"}) {
      auto it = profiles.find(p);
      if (it != profiles.end()) chain.push_back(it->second);
    }
    if (chain.size() < 2) continue;
    Check mean{"ordering " + group_name(key), true, ""};
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (i) mean.detail += " < ";
      mean.detail += chain[i]->cell.profile + " " + fixed(chain[i]->mean_ms);
      if (i && !(chain[i - 1]->mean_ms < chain[i]->mean_ms)) mean.pass = false;
    }
    mean.detail += " ms";
    out.push_back(mean);

    std::size_t n = chain.front()->samples_ms.size();
    for (const auto* r : chain) n = std::min(n, r->samples_ms.size());
    if (n == 0) continue;
    std::size_t ordered = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool ok = true;
      for (std::size_t j = 1; j < chain.size(); ++j) ok = ok && chain[j - 1]->samples_ms[i] <= chain[j]->samples_ms[i];
      ordered += ok;
    }
    double share = static_cast<double>(ordered) / static_cast<double>(n);
    out.push_back({"per-trial ordering " + group_name(key), share >= 0.95,
                   std::to_string(ordered) + "/" + std::to_string(n) + " trials ordered"});
  }
  return out;
}

std::vector<Check> latency_checks(const std::vector<BenchResult>& results) {
  std::vector<Check> out;
  for (const auto& r : results) {
    if (r.cell.scheme == BenchScheme::kClassic) continue;
    double bound = latency_lower_bound_ms(r.cell);
    if (bound <= 0) continue;
    std::string name = std::string(scheme_label(r.cell.scheme)) + " " + std::string(protocol_label(r.cell.protocol)) +
                       " " + std::string(curve_name(r.cell.curve)) + " " + r.cell.profile;
    out.push_back({"lower bound " + name, r.mean_ms >= bound,
                   fixed(r.mean_ms) + " ms >= " + fixed(bound) + " ms (" +
                       std::to_string(broadcast_rounds(r.cell.scheme, r.cell.protocol)) + " rounds x 2 x latency)"});
    if (r.cell.scheme == BenchScheme::kThreshold && r.cell.protocol == BenchProtocol::kExchange &&
        r.cell.profile == "wan") {
      out.push_back({"within 3x of bound " + name, r.mean_ms <= 3 * bound,
                     fixed(r.mean_ms) + " ms <= " + fixed(3 * bound) + " ms (ratio " + fixed(r.mean_ms / bound, 2) + ")"});
    }
  }
  return out;
}

std::string compare_report(const std::vector<BenchResult>& results) {
  std::ostringstream o;
  o << std::left << std::setw(10) << "scheme" << std::setw(9) << "protocol" << std::setw(11) << "curve" << std::setw(9)
    << "profile" << std::right << std::setw(7) << "trials" << std::setw(13) << "mean_ms" << std::setw(13) << "ref_ms"
    << std::setw(10) << "ratio" << std::setw(11) << "bound_ms" << "  note\n";
  bool anomalies = false;
  for (const auto& r : results) {
    auto ref = find_reference(r.cell);
    o << std::left << std::setw(10) << scheme_label(r.cell.scheme) << std::setw(9) << protocol_label(r.cell.protocol)
      << std::setw(11) << curve_name(r.cell.curve) << std::setw(9) << r.cell.profile << std::right << std::setw(7)
      << r.trials << std::setw(13) << fixed(r.mean_ms, 4);
    if (ref) {
      o << std::setw(13) << fixed(ref->ms, 4) << std::setw(10) << fixed(r.mean_ms / ref->ms, 2);
    } else {
      o << std::setw(13) << "n/a" << std::setw(10) << "n/a";
    }
    double bound = latency_lower_bound_ms(r.cell);
    o << std::setw(11) << (bound > 0 ? fixed(bound, 1) : std::string("-"));
    if (ref && ref->anomaly) {
      o << "  reference typeset as \"" << ref->printed << "\"";
      anomalies = true;
    }
    o << "\n";
  }
  if (anomalies) {
    o << "\nTwo reference cells are typeset with a stray space (\"34. 557 ms\", \"841. 412 ms\");"
      << " they are read as 34.557 ms and 841.412 ms.\n";
  }

  o << "\nClassic vs multi-party (local profile, measured):\n";
  for (auto protocol : {BenchProtocol::kKeygen, BenchProtocol::kExchange}) {
    for (auto curve : {CurveId::kP256, CurveId::kCurve25519}) {
      const BenchResult* classic = nullptr;
      const BenchResult* thr = nullptr;
      const BenchResult* nai = nullptr;
      for (const auto& r : results) {
        if (r.cell.protocol != protocol || r.cell.curve != curve) continue;
        if (r.cell.scheme == BenchScheme::kClassic) classic = &r;
        if (r.cell.scheme == BenchScheme::kThreshold && r.cell.profile == "local") thr = &r;
        if (r.cell.scheme == BenchScheme::kNaive && r.cell.profile == "local") nai = &r;
      }
      if (!classic || classic->mean_ms <= 0) continue;
      o << "  " << protocol_label(protocol) << " " << curve_name(curve) << ":";
      if (nai) o << " naive/classic = " << fixed(nai->mean_ms / classic->mean_ms, 1) << "x";
      if (thr) o << " threshold/classic = " << fixed(thr->mean_ms / classic->mean_ms, 1) << "x";
      o << "\n";
    }
  }

  auto checks = ordering_checks(results);
  auto lat = latency_checks(results);
  checks.insert(checks.end(), lat.begin(), lat.end());
  if (!checks.empty()) {
    o << "\nChecks:\n";
    for (const auto& c : checks) o << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.name << ": " << c.detail << "\n";
  }
  return o.str();
}

}  // namespace tdh::bench
