#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "provlink/bench.hpp"
#include "provlink/error.hpp"

namespace provlink {
namespace {

TEST(SyntheticBatch, DistinctCanonicalAboveThreshold) {
  auto batch = synthetic_batch(5000, 3);
  ASSERT_EQ(batch.size(), 5000u);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : batch) {
    EXPECT_TRUE(e.canonical());
    EXPECT_GE(e.simsc, kDefaultTauStore);
    EXPECT_FALSE(e.cfm);
    EXPECT_TRUE(seen.emplace(e.id1.str(), e.id2.str()).second);
  }
  EXPECT_EQ(synthetic_batch(5000, 3), batch);
  EXPECT_NE(synthetic_batch(5000, 4), batch);
}

TEST(Benchmark, ReportsEveryLayoutAndSize) {
  BenchConfig cfg;
  cfg.pair_counts = {200, 2000};
  cfg.iterations = 2;
  auto reports = run_benchmark(cfg);
  ASSERT_EQ(reports.size(), 3u);
  for (const auto& r : reports) {
    EXPECT_EQ(r.pair_counts, cfg.pair_counts);
    ASSERT_EQ(r.avg_txn_seconds.size(), 2u);
    for (double s : r.avg_txn_seconds) EXPECT_GT(s, 0.0);
    EXPECT_EQ(r.ops_breakdown.size(), 4u);
    EXPECT_EQ(r.samples.size(), 2u * 2u * 4u);
  }
  std::ostringstream csv;
  write_bench_csv(csv, reports);
  auto text = csv.str();
  EXPECT_EQ(text.rfind("layout,pairs,iteration,seconds,op\n", 0), 0u);
  EXPECT_NE(text.find("kv_dual,2000,mean,"), std::string::npos);
  std::ostringstream dat;
  write_bench_gnuplot(dat, reports);
  EXPECT_NE(dat.str().find("200 indexed_table "), std::string::npos);
}

TEST(Benchmark, WithoutBreakdown) {
  BenchConfig cfg;
  cfg.layouts = {Layout::kv_single};
  cfg.pair_counts = {500};
  cfg.iterations = 1;
  cfg.breakdown = false;
  auto reports = run_benchmark(cfg);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].samples.size(), 1u);
  EXPECT_EQ(reports[0].ops_breakdown.size(), 1u);
}

TEST(Benchmark, RejectsBadConfig) {
  BenchConfig cfg;
  cfg.iterations = 0;
  EXPECT_THROW(run_benchmark(cfg), Error);
  cfg.iterations = 1;
  cfg.warmup = -1;
  EXPECT_THROW(run_benchmark(cfg), Error);
  cfg.warmup = 0;
  cfg.layouts.clear();
  EXPECT_THROW(run_benchmark(cfg), Error);
}

TEST(Benchmark, WarmupIsNotSampled) {
  BenchConfig cfg;
  cfg.layouts = {Layout::kv_dual};
  cfg.pair_counts = {200};
  cfg.iterations = 2;
  cfg.breakdown = false;
  for (int warmup : {0, 3}) {
    cfg.warmup = warmup;
    auto reports = run_benchmark(cfg);
    ASSERT_EQ(reports[0].samples.size(), 2u);
    EXPECT_EQ(reports[0].samples[0].iteration, 0);
    EXPECT_EQ(reports[0].samples[1].iteration, 1);
  }
}

}  // namespace
}  // namespace provlink
