#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>

#include "qrechacha/bench.hpp"
#include "qrechacha/error.hpp"

using namespace qrechacha;

namespace {

BenchResult fake(const std::string& label, std::size_t bytes, double mean) {
  BenchResult r;
  r.label = label;
  r.payload_bytes = bytes;
  r.mean_seconds = mean;
  r.repetitions = 5;
  return r;
}

}  // namespace

TEST(Bench, Labels) {
  EXPECT_EQ(bench_label(BenchCipher::qre_chacha, 8), "QRE-ChaCha8");
  EXPECT_EQ(bench_label(BenchCipher::chacha, 20), "ChaCha20");
}

TEST(Bench, ResultFields) {
  const auto r = bench_cipher(BenchCipher::qre_chacha, 8, 1 << 20);
  EXPECT_EQ(r.seconds.size(), 5u);
  EXPECT_EQ(r.repetitions, 5);
  double sum = 0;
  for (double s : r.seconds) {
    EXPECT_GT(s, 0.0);
    sum += s;
  }
  EXPECT_DOUBLE_EQ(r.mean_seconds, sum / 5);
  EXPECT_DOUBLE_EQ(r.mbps, (1 << 20) / r.mean_seconds / 1e6);
  EXPECT_DOUBLE_EQ(r.ns_per_byte, r.mean_seconds * 1e9 / (1 << 20));
  EXPECT_GT(r.clock_resolution_ns, 0.0);
  EXPECT_FALSE(r.parallel);
}

TEST(Bench, Validation) {
  BenchOptions opts;
  opts.repetitions = 4;
  EXPECT_THROW(bench_cipher(BenchCipher::chacha, 8, 1000, opts), Error);
  EXPECT_THROW(bench_cipher(BenchCipher::chacha, 7, 1000), Error);
  EXPECT_THROW(bench_cipher(BenchCipher::chacha, 8, 0), Error);
}

TEST(Bench, DoublingPayloadRoughlyDoublesTime) {
  BenchOptions opts;
  opts.repetitions = 7;
  const auto one = bench_cipher(BenchCipher::chacha, 8, 8'000'000, opts);
  const auto two = bench_cipher(BenchCipher::chacha, 8, 16'000'000, opts);
  const double ratio = two.mean_seconds / one.mean_seconds;
  EXPECT_GE(ratio, 2.0 * 0.75);
  EXPECT_LE(ratio, 2.0 * 1.25);
}

TEST(Compare, IdenticalResultsGiveUnitRatios) {
  const std::vector<BenchResult> rs = {fake("A", 10, 1.0), fake("B", 10, 1.0)};
  const auto t = compare_report(rs);
  for (const auto& row : t.ratios)
    for (double v : row) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Compare, InsufficientResults) {
  try {
    compare_report({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::insufficient_results);
  }
  const std::vector<BenchResult> one = {fake("A", 10, 1.0)};
  EXPECT_THROW(compare_report(one), Error);
}

TEST(Compare, TableShapeAndRatios) {
  std::vector<BenchResult> rs;
  for (auto size : default_bench_sizes()) {
    rs.push_back(fake("ChaCha8", size, size * 1e-8));
    rs.push_back(fake("QRE-ChaCha8", size, size * 1.01e-8));
    rs.push_back(fake("ChaCha20", size, size * 1.9e-8));
  }
  const auto t = compare_report(rs);
  ASSERT_EQ(t.sizes, default_bench_sizes());
  EXPECT_EQ(t.labels, (std::vector<std::string>{"ChaCha8", "QRE-ChaCha8", "ChaCha20"}));
  EXPECT_NEAR(t.ratios[1][0], 1.01, 1e-12);
  EXPECT_NEAR(t.ratios[2][0], 1.9, 1e-12);
  const std::string text = t.text();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  EXPECT_NE(text.find("10 MB"), std::string::npos);
  EXPECT_NE(text.find("50 MB"), std::string::npos);
  EXPECT_EQ(t.csv().substr(0, t.csv().find('\n')), "bytes,ChaCha8,QRE-ChaCha8,ChaCha20");
}

TEST(Compare, CsvAndJsonOutput) {
  const std::vector<BenchResult> rs = {fake("ChaCha8", 100, 0.5), fake("ChaCha20", 100, 1.0)};
  const std::string csv = bench_to_csv(rs);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "cipher,rounds,bytes,reps,mean_s,mbps");
  const auto doc = nlohmann::json::parse(bench_to_json(rs));
  EXPECT_EQ(doc["results"].size(), 2u);
  EXPECT_EQ(doc["results"][1]["cipher"], "ChaCha20");
}
