#pragma once

// Similarity-edge storage over the ordered key-value substrate, in three
// physical layouts:
//
//   indexed_table  primary rows keyed by the canonical pair plus two secondary
//                  indexes (id1 -> pair, id2 -> pair), updated in one batch.
//   kv_single      one record per pair at key ID1 + "-" + ID2.
//   kv_dual        two records per pair, at ID1 + "-" + ID2 and ID2 + "-" + ID1.
//
// All layouts behave identically for get/upsert/delete/neighbors; they differ
// in write amplification and in how neighbors() finds edges where the id is
// the second member. kv_single answers that with a full scan.

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string_view>
#include <vector>

#include "provlink/ordered_kv.hpp"
#include "provlink/profile.hpp"

namespace provlink {

enum class Layout { indexed_table, kv_single, kv_dual };

std::string_view layout_name(Layout layout);
std::optional<Layout> parse_layout(std::string_view name);

inline constexpr double kDefaultTauStore = 0.5;

class SimilarityStore {
 public:
  SimilarityStore(Layout layout, double tau_store) : layout_(layout), tau_store_(tau_store) {}
  virtual ~SimilarityStore() = default;
  SimilarityStore(const SimilarityStore&) = delete;
  SimilarityStore& operator=(const SimilarityStore&) = delete;

  Layout layout() const { return layout_; }
  double tau_store() const { return tau_store_; }

  // Throws InvalidEdge for non-canonical edges, BelowThreshold when an
  // unconfirmed edge has simsc < tau_store. Confirmed edges are exempt so
  // their scores can keep refreshing.
  void upsert_edge(const SimilarityEdge& e);
  std::optional<SimilarityEdge> find_edge(const ProfileId& a, const ProfileId& b) const;
  SimilarityEdge get_edge(const ProfileId& a, const ProfileId& b) const;  // NotFound, SameId
  // Edges touching id, in (id1, id2) order.
  std::vector<SimilarityEdge> neighbors(const ProfileId& id) const;
  void delete_edge(const ProfileId& a, const ProfileId& b);  // idempotent

  // Per record key: search, delete if present, insert. Returns elapsed
  // seconds. The whole batch is validated first, then staged as replace
  // operations, stable-sorted by key and applied as one logged write, so every
  // key space is walked in order and the last write for a repeated pair wins.
  double update_transaction(std::span<const SimilarityEdge> batch);

  // Canonical edges in (id1, id2) order.
  std::vector<SimilarityEdge> all_edges() const;
  std::size_t edge_count() const;
  // Physical data records (index entries excluded).
  std::size_t record_count() const;

  // Persist under `dir` (log + snapshot); checkpoint() rewrites the snapshot.
  void attach(const std::filesystem::path& dir);
  void checkpoint();

  // Unlocked single-step primitives, exposed for the benchmark's per-operation
  // breakdown. Callers must not run them concurrently with other access.
  std::optional<SimilarityEdge> raw_find(const ProfileId& id1, const ProfileId& id2) const {
    return find_impl(id1, id2);
  }
  bool raw_erase(const ProfileId& id1, const ProfileId& id2) { return erase_impl(id1, id2); }
  void raw_insert(const SimilarityEdge& e) { insert_impl(e); }

 protected:
  virtual std::optional<SimilarityEdge> find_impl(const ProfileId& id1,
                                                  const ProfileId& id2) const = 0;
  // The records (data and index entries) that represent e.
  virtual void record_puts(const SimilarityEdge& e, std::vector<KvOp>& out) const = 0;
  void insert_impl(const SimilarityEdge& e);
  virtual bool erase_impl(const ProfileId& id1, const ProfileId& id2) = 0;
  virtual std::vector<SimilarityEdge> neighbors_impl(const ProfileId& id) const = 0;
  virtual std::vector<SimilarityEdge> all_impl() const = 0;
  virtual std::size_t record_count_impl() const = 0;

  OrderedKv kv_;

 private:
  void validate(const SimilarityEdge& e) const;
  void apply_one(const SimilarityEdge& e);

  Layout layout_;
  double tau_store_;
  mutable std::shared_mutex mu_;
};

std::unique_ptr<SimilarityStore> make_similarity_store(Layout layout,
                                                       double tau_store = kDefaultTauStore);

// Compact binary form of (simsc, rejsc, cfm, decision).
std::string encode_edge_fields(const SimilarityEdge& e);
void decode_edge_fields(std::string_view bytes, SimilarityEdge& e);

}  // namespace provlink
