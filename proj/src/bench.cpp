#include "provlink/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <unordered_set>

#include "provlink/error.hpp"

namespace provlink {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / double(xs.size());
}

}  // namespace

std::vector<SimilarityEdge> synthetic_batch(std::size_t count, std::uint64_t seed, double min_score) {
  // Enough ids for about twice as many distinct pairs as requested.
  auto pool = std::max<std::size_t>(3, std::size_t(std::ceil(std::sqrt(4.0 * double(count)))) + 1);
  // Ids as narrow as the pool allows, so pair keys stay short.
  int width = int(std::to_string(pool - 1).size());
  std::vector<ProfileId> ids;
  ids.reserve(pool);
  for (std::size_t i = 0; i < pool; ++i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "P%0*zu", width, i);
    ids.emplace_back(buf);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool - 1);
  std::uniform_real_distribution<double> score(min_score, min_score + 10.0);
  std::uniform_int_distribution<std::uint32_t> rej(0, 2);

  std::vector<SimilarityEdge> batch;
  batch.reserve(count);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count);
  while (batch.size() < count) {
    auto a = pick(rng);
    auto b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!seen.insert(std::uint64_t(a) * pool + b).second) continue;
    SimilarityEdge e;
    e.id1 = ids[a];
    e.id2 = ids[b];
    e.simsc = score(rng);
    e.rejsc = rej(rng);
    batch.push_back(std::move(e));
  }
  return batch;
}

std::vector<BenchReport> run_benchmark(const BenchConfig& cfg) {
  if (cfg.iterations < 1) throw Error(ErrorCode::ConfigError, "iterations must be >= 1");
  if (cfg.warmup < 0) throw Error(ErrorCode::ConfigError, "warmup must be >= 0");
  if (cfg.layouts.empty() || cfg.pair_counts.empty()) {
    throw Error(ErrorCode::ConfigError, "benchmark needs at least one layout and one pair count");
  }

  std::vector<BenchReport> reports;
  for (auto layout : cfg.layouts) {
    BenchReport r;
    r.layout = layout;
    r.pair_counts = cfg.pair_counts;
    reports.push_back(std::move(r));
  }

  static const char* kOps[] = {"update_txn", "search", "delete", "insert"};
  for (std::size_t ci = 0; ci < cfg.pair_counts.size(); ++ci) {
    auto count = cfg.pair_counts[ci];
    std::vector<std::map<std::string, std::vector<double>>> times(reports.size());
    for (int it = -cfg.warmup; it < cfg.iterations; ++it) {
      auto seed = cfg.seed + 1000003ULL * ci + std::uint64_t(it + cfg.warmup);
      auto preload = synthetic_batch(count, seed, cfg.tau_store);
      auto update = preload;
      std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
      std::uniform_real_distribution<double> score(cfg.tau_store, cfg.tau_store + 10.0);
      for (auto& e : update) e.simsc = score(rng);

      // Layouts interleaved per iteration so drift affects them alike.
      for (std::size_t li = 0; li < reports.size(); ++li) {
        auto store = make_similarity_store(reports[li].layout, cfg.tau_store);
        store->update_transaction(preload);
        if (it < 0) {
          store->update_transaction(update);
          continue;
        }
        auto& t = times[li];
        t["update_txn"].push_back(store->update_transaction(update));

        reports[li].samples.push_back(BenchSample{count, it, "update_txn", t["update_txn"].back()});
        if (!cfg.breakdown) continue;

        auto start = std::chrono::steady_clock::now();
        std::size_t hits = 0;
        for (const auto& e : update) hits += store->raw_find(e.id1, e.id2) ? 1 : 0;
        t["search"].push_back(seconds_since(start));
        if (hits != update.size()) {
          throw Error(ErrorCode::StorageFailure, "benchmark search missed loaded pairs");
        }

        start = std::chrono::steady_clock::now();
        for (const auto& e : update) store->raw_erase(e.id1, e.id2);
        t["delete"].push_back(seconds_since(start));

        start = std::chrono::steady_clock::now();
        for (const auto& e : update) store->raw_insert(e);
        t["insert"].push_back(seconds_since(start));

        for (const char* op : {"search", "delete", "insert"}) {
          reports[li].samples.push_back(BenchSample{count, it, op, t[op].back()});
        }
      }
    }
    for (std::size_t li = 0; li < reports.size(); ++li) {
      reports[li].avg_txn_seconds.push_back(mean(times[li]["update_txn"]));
      for (const char* op : kOps) {
        if (times[li].contains(op)) reports[li].ops_breakdown[op].push_back(mean(times[li][op]));
      }
    }
  }
  return reports;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchReport>& reports) {
  out << "layout,pairs,iteration,seconds,op\n";
  char buf[64];
  for (const auto& r : reports) {
    for (const auto& s : r.samples) {
      std::snprintf(buf, sizeof buf, "%.9f", s.seconds);
      out << layout_name(r.layout) << ',' << s.pairs << ',' << s.iteration << ',' << buf << ','
          << s.op << '\n';
    }
  }
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.pair_counts.size(); ++i) {
      for (const auto& [op, means] : r.ops_breakdown) {
        std::snprintf(buf, sizeof buf, "%.9f", means[i]);
        out << layout_name(r.layout) << ',' << r.pair_counts[i] << ",mean," << buf << ',' << op
            << '\n';
      }
    }
  }
}

void write_bench_gnuplot(std::ostream& out, const std::vector<BenchReport>& reports) {
  out << "# pairs layout mean_seconds log2_seconds\n";
  char buf[96];
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.pair_counts.size(); ++i) {
      auto s = r.avg_txn_seconds[i];
      std::snprintf(buf, sizeof buf, "%.9f %.6f", s, s > 0 ? std::log2(s) : 0.0);
      out << r.pair_counts[i] << ' ' << layout_name(r.layout) << ' ' << buf << '\n';
    }
  }
}

}  // namespace provlink
