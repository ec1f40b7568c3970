#pragma once

// Update-transaction benchmark over the similarity-store layouts.
//
// For every (pair count, iteration) a synthetic batch of distinct canonical
// pairs is drawn from a pool of about sqrt(4 * count) profile ids. Each layout
// is preloaded with the batch, then timed while applying an update transaction
// that re-scores every pair (search + delete + insert). The per-operation
// breakdown times separate search, delete and insert passes over the same
// batch afterwards. Warm-up iterations run the same steps and are discarded.

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "provlink/sim_store.hpp"

namespace provlink {

struct BenchConfig {
  std::vector<Layout> layouts{Layout::indexed_table, Layout::kv_single, Layout::kv_dual};
  std::vector<std::size_t> pair_counts{10'000, 100'000, 1'000'000};
  int iterations = 5;
  int warmup = 1;  // untimed iterations per size, run first
  std::uint64_t seed = 20190401;
  double tau_store = kDefaultTauStore;
  bool breakdown = true;  // also time separate search/delete/insert passes
};

struct BenchSample {
  std::size_t pairs = 0;
  int iteration = 0;
  std::string op;  // update_txn, search, delete, insert
  double seconds = 0.0;
};

struct BenchReport {
  Layout layout = Layout::kv_single;
  std::vector<std::size_t> pair_counts;
  std::vector<double> avg_txn_seconds;  // aligned with pair_counts
  std::map<std::string, std::vector<double>> ops_breakdown;  // op -> means aligned with pair_counts
  std::vector<BenchSample> samples;
};

std::vector<SimilarityEdge> synthetic_batch(std::size_t count, std::uint64_t seed,
                                            double min_score = kDefaultTauStore);

// Throws ConfigError when iterations < 1, warmup < 0 or a list is empty.
std::vector<BenchReport> run_benchmark(const BenchConfig& cfg);

// `layout,pairs,iteration,seconds,op` rows, then one `mean` row per
// (layout, pairs, op).
void write_bench_csv(std::ostream& out, const std::vector<BenchReport>& reports);
// Whitespace-separated aggregate: pairs, layout, mean seconds, log2(seconds).
void write_bench_gnuplot(std::ostream& out, const std::vector<BenchReport>& reports);

}  // namespace provlink
