#include <gtest/gtest.h>

#include <sstream>

#include "bench/bench.hpp"

namespace tdh::bench {
namespace {

BenchResult result(BenchScheme s, BenchProtocol p, CurveId c, const std::string& profile, std::vector<double> samples) {
  return summarize(BenchCell{s, p, c, profile, 2, 3}, std::move(samples));
}

TEST(BenchMatrix, DefaultShape) {
  auto cells = default_matrix();
  ASSERT_EQ(cells.size(), 36u);
  std::size_t classic = 0;
  for (const auto& c : cells) {
    if (c.scheme == BenchScheme::kClassic) {
      ++classic;
      EXPECT_EQ(c.profile, kNoProfile);
    } else {
      EXPECT_EQ(c.t, 2);
      EXPECT_EQ(c.n, 3);
      EXPECT_TRUE(find_reference(c).has_value()) << c.profile;
    }
  }
  EXPECT_EQ(classic, 4u);
  EXPECT_EQ(default_matrix({"local"}).size(), 12u);
  EXPECT_THROW(default_matrix({"dialup"}), Error);
}

TEST(BenchStats, Summary) {
  auto r = summarize(BenchCell{}, {5, 1, 4, 2, 3});
  EXPECT_EQ(r.trials, 5u);
  EXPECT_DOUBLE_EQ(r.mean_ms, 3);
  EXPECT_DOUBLE_EQ(r.median_ms, 3);
  EXPECT_DOUBLE_EQ(r.p95_ms, 5);
  EXPECT_EQ(r.samples_ms, (std::vector<double>{5, 1, 4, 2, 3}));
  EXPECT_DOUBLE_EQ(summarize(BenchCell{}, {1, 2, 3, 4}).median_ms, 2.5);
}

TEST(BenchCsv, RoundTrip) {
  std::vector<BenchResult> rows{
      result(BenchScheme::kClassic, BenchProtocol::kKeygen, CurveId::kP256, "-", {0.0125, 0.013}),
      result(BenchScheme::kThreshold, BenchProtocol::kExchange, CurveId::kCurve25519, "wan", {150.5, 160.25, 155}),
  };
  rows[0].cell.t = 0;
  rows[0].cell.n = 1;
  std::stringstream s;
  write_csv(s, rows);
  std::string text = s.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  auto back = read_csv(s);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].cell, rows[i].cell);
    EXPECT_EQ(back[i].trials, rows[i].trials);
    EXPECT_NEAR(back[i].mean_ms, rows[i].mean_ms, 1e-6);
    EXPECT_NEAR(back[i].median_ms, rows[i].median_ms, 1e-6);
    EXPECT_NEAR(back[i].p95_ms, rows[i].p95_ms, 1e-6);
  }
}

TEST(BenchCsv, RejectsMalformedInput) {
  std::stringstream wrong_header("scheme,protocol\n");
  EXPECT_THROW(read_csv(wrong_header), Error);
  std::stringstream short_row(std::string(kCsvHeader) + "\nthreshold,exchange,P256,wan,2,3\n");
  EXPECT_THROW(read_csv(short_row), Error);
  std::stringstream bad_number(std::string(kCsvHeader) + "\nthreshold,exchange,P256,wan,2,3,x,1,1,1\n");
  EXPECT_THROW(read_csv(bad_number), Error);
}

TEST(BenchReference, PublishedValues) {
  EXPECT_EQ(reference_table().size(), 36u);
  auto wan = find_reference({BenchScheme::kThreshold, BenchProtocol::kExchange, CurveId::kCurve25519, "wan", 2, 3});
  ASSERT_TRUE(wan);
  EXPECT_DOUBLE_EQ(wan->ms, 153.001);
  EXPECT_FALSE(wan->anomaly);
  auto longhaul = find_reference({BenchScheme::kThreshold, BenchProtocol::kKeygen, CurveId::kCurve25519, "longhaul", 2, 3});
  ASSERT_TRUE(longhaul);
  EXPECT_DOUBLE_EQ(longhaul->ms, 2076);
  auto classic = find_reference({BenchScheme::kClassic, BenchProtocol::kKeygen, CurveId::kP256, "-", 0, 1});
  ASSERT_TRUE(classic);
  EXPECT_DOUBLE_EQ(classic->ms, 0.012861);

  std::size_t anomalies = 0;
  for (const auto& r : reference_table()) {
    if (!r.anomaly) continue;
    ++anomalies;
    EXPECT_NE(r.printed.find(". "), std::string::npos);
  }
  EXPECT_EQ(anomalies, 2u);
  EXPECT_DOUBLE_EQ(find_reference({BenchScheme::kNaive, BenchProtocol::kKeygen, CurveId::kCurve25519, "lan", 2, 3})->ms,
                   34.557);
  EXPECT_DOUBLE_EQ(
      find_reference({BenchScheme::kNaive, BenchProtocol::kExchange, CurveId::kCurve25519, "longhaul", 2, 3})->ms,
      841.412);
}

TEST(BenchBounds, RoundCounts) {
  BenchCell wan_exchange{BenchScheme::kThreshold, BenchProtocol::kExchange, CurveId::kCurve25519, "wan", 2, 3};
  EXPECT_DOUBLE_EQ(latency_lower_bound_ms(wan_exchange), 120);
  BenchCell wan_keygen{BenchScheme::kThreshold, BenchProtocol::kKeygen, CurveId::kP256, "wan", 2, 3};
  EXPECT_DOUBLE_EQ(latency_lower_bound_ms(wan_keygen), 180);
  BenchCell naive_longhaul{BenchScheme::kNaive, BenchProtocol::kKeygen, CurveId::kP256, "longhaul", 2, 3};
  EXPECT_DOUBLE_EQ(latency_lower_bound_ms(naive_longhaul), 800);
  EXPECT_DOUBLE_EQ(latency_lower_bound_ms({BenchScheme::kNaive, BenchProtocol::kKeygen, CurveId::kP256, "local", 2, 3}), 0);
  EXPECT_DOUBLE_EQ(latency_lower_bound_ms({}), 0);
}

TEST(BenchChecks, OrderingAndBounds) {
  auto cell = [](const std::string& p, std::vector<double> s) {
    return result(BenchScheme::kThreshold, BenchProtocol::kExchange, CurveId::kCurve25519, p, std::move(s));
  };
  std::vector<BenchResult> good{cell("local", {10, 11}), cell("lan", {20, 21}), cell("wan", {200, 210})};
  auto ordering = ordering_checks(good);
  ASSERT_EQ(ordering.size(), 2u);
  for (const auto& c : ordering) EXPECT_TRUE(c.pass) << c.name;
  auto bounds = latency_checks(good);
  ASSERT_EQ(bounds.size(), 3u);
  for (const auto& c : bounds) EXPECT_TRUE(c.pass) << c.name;

  std::vector<BenchResult> bad{cell("local", {30, 30}), cell("lan", {20, 21}), cell("wan", {400, 400})};
  EXPECT_FALSE(ordering_checks(bad)[0].pass);
  auto slow = latency_checks(bad);
  EXPECT_FALSE(std::find_if(slow.begin(), slow.end(), [](const Check& c) { return c.name.rfind("within", 0) == 0; })->pass);
}

TEST(BenchReport, ShowsReferenceAndRatio) {
  std::vector<BenchResult> rows{
      result(BenchScheme::kThreshold, BenchProtocol::kExchange, CurveId::kCurve25519, "wan", {306.002}),
      result(BenchScheme::kNaive, BenchProtocol::kKeygen, CurveId::kCurve25519, "lan", {34.557}),
  };
  std::string report = compare_report(rows);
  EXPECT_NE(report.find("153.001"), std::string::npos);
  EXPECT_NE(report.find("2.00"), std::string::npos);
  EXPECT_NE(report.find("34. 557"), std::string::npos);
}

TEST(BenchRun, ClassicCellIsMeasured) {
  BenchOptions opts;
  opts.classic_trials = 20;
  auto r = run_cell({BenchScheme::kClassic, BenchProtocol::kExchange, CurveId::kCurve25519, "-", 0, 1}, opts);
  EXPECT_EQ(r.trials, 20u);
  EXPECT_GT(r.mean_ms, 0);
}

TEST(BenchRun, LocalThresholdExchangeIsMeasured) {
  BenchOptions opts;
  opts.trials = 2;
  opts.seed = "bench-test";
  auto r = run_cell({BenchScheme::kThreshold, BenchProtocol::kExchange, CurveId::kP256, "local", 1, 2}, opts);
  EXPECT_EQ(r.trials, 2u);
  EXPECT_GT(r.mean_ms, 0);
}

}  // namespace
}  // namespace tdh::bench
