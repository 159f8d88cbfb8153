#pragma once

// Measurement matrix over schemes, protocols, curves and network profiles,
// CSV I/O and the comparison report against the published timings.

#include <chrono>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdh/group.hpp"
#include "tdh/net/emulator.hpp"

namespace tdh::bench {

enum class BenchScheme : std::uint8_t { kClassic, kNaive, kThreshold };
enum class BenchProtocol : std::uint8_t { kKeygen, kExchange };

std::string_view scheme_label(BenchScheme s);      // classic, naive, threshold
std::string_view protocol_label(BenchProtocol p);  // keygen, exchange
BenchScheme parse_bench_scheme(std::string_view s);
BenchProtocol parse_bench_protocol(std::string_view s);

// Classic rows have no network dimension.
inline constexpr std::string_view kNoProfile = "-";

struct BenchCell {
  BenchScheme scheme = BenchScheme::kThreshold;
  BenchProtocol protocol = BenchProtocol::kExchange;
  CurveId curve = CurveId::kCurve25519;
  std::string profile = std::string(kNoProfile);
  std::uint16_t t = 0;
  std::uint16_t n = 1;

  bool operator==(const BenchCell&) const = default;
};

struct BenchResult {
  BenchCell cell;
  std::size_t trials = 0;
  double mean_ms = 0;
  double median_ms = 0;
  double p95_ms = 0;
  // Per-trial timings in run order; not part of the CSV.
  std::vector<double> samples_ms;
};

struct BenchOptions {
  std::size_t trials = 20;
  // Classic rows take microseconds, so they get more repetitions.
  std::size_t classic_trials = 2000;
  std::string seed;  // empty: system randomness
  std::chrono::milliseconds round_timeout{30000};
  std::function<void(const BenchResult&)> on_row;
};

// (t, n) = (2, 3) for both multi-party schemes.
std::vector<BenchCell> default_matrix(const std::vector<std::string>& profiles = {"local", "lan", "wan", "longhaul"});

BenchResult summarize(const BenchCell& cell, std::vector<double> samples_ms);
BenchResult run_cell(const BenchCell& cell, const BenchOptions& options);
std::vector<BenchResult> run_matrix(const std::vector<BenchCell>& cells, const BenchOptions& options);

inline constexpr std::string_view kCsvHeader = "scheme,protocol,curve,profile,t,n,trials,mean_ms,median_ms,p95_ms";
void write_csv(std::ostream& out, const std::vector<BenchResult>& results);
// Throws kInvalidArgument on a malformed file.
std::vector<BenchResult> read_csv(std::istream& in);

struct ReferenceValue {
  BenchScheme scheme;
  BenchProtocol protocol;
  CurveId curve;
  std::string profile;
  double ms;
  std::string printed;  // as typeset in the published table
  bool anomaly = false;
};

const std::vector<ReferenceValue>& reference_table();
std::optional<ReferenceValue> find_reference(const BenchCell& cell);

// Sequential echo-broadcast rounds in the protocol. Each costs at least a
// broadcast plus an echo, i.e. two one-way latencies.
unsigned broadcast_rounds(BenchScheme scheme, BenchProtocol protocol);
double latency_lower_bound_ms(const BenchCell& cell);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

// local < lan < wan (and wan < longhaul when present) on mean time for every
// multi-party cell, plus the per-trial version with a 95% threshold.
std::vector<Check> ordering_checks(const std::vector<BenchResult>& results);
// Measured mean >= round-count bound everywhere; WAN threshold exchange
// within 3x of its bound.
std::vector<Check> latency_checks(const std::vector<BenchResult>& results);

std::string compare_report(const std::vector<BenchResult>& results);

}  // namespace tdh::bench
