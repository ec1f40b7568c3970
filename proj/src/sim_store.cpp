#include "provlink/sim_store.hpp"

#include <algorithm>
#include <chrono>
#include <tuple>
#include <cstring>
#include <mutex>

#include "provlink/error.hpp"

namespace provlink {

std::string_view layout_name(Layout layout) {
  switch (layout) {
    case Layout::indexed_table: return "indexed_table";
    case Layout::kv_single: return "kv_single";
    case Layout::kv_dual: return "kv_dual";
  }
  return "kv_single";
}

std::optional<Layout> parse_layout(std::string_view name) {
  if (name == "indexed_table") return Layout::indexed_table;
  if (name == "kv_single") return Layout::kv_single;
  if (name == "kv_dual") return Layout::kv_dual;
  return std::nullopt;
}

std::string encode_edge_fields(const SimilarityEdge& e) {
  std::string out(14, '\0');
  std::memcpy(out.data(), &e.simsc, 8);
  std::memcpy(out.data() + 8, &e.rejsc, 4);
  out[12] = e.cfm ? 1 : 0;
  out[13] = char(e.decision);
  return out;
}

void decode_edge_fields(std::string_view bytes, SimilarityEdge& e) {
  if (bytes.size() < 14) throw Error(ErrorCode::StorageFailure, "corrupt similarity record");
  std::memcpy(&e.simsc, bytes.data(), 8);
  std::memcpy(&e.rejsc, bytes.data() + 8, 4);
  e.cfm = bytes[12] != 0;
  e.decision = Decision(static_cast<unsigned char>(bytes[13]));
}

namespace {

std::string pair_key(const ProfileId& a, const ProfileId& b) {
  std::string k;
  k.reserve(a.str().size() + b.str().size() + 1);
  k += a.str();
  k += '-';
  k += b.str();
  return k;
}

std::pair<std::string_view, std::string_view> split_pair_key(std::string_view key) {
  auto dash = key.find('-');
  return {key.substr(0, dash), key.substr(dash + 1)};
}

SimilarityEdge edge_from(std::string_view a, std::string_view b, std::string_view fields) {
  SimilarityEdge e;
  if (a < b) {
    e.id1 = ProfileId(std::string(a));
    e.id2 = ProfileId(std::string(b));
  } else {
    e.id1 = ProfileId(std::string(b));
    e.id2 = ProfileId(std::string(a));
  }
  decode_edge_fields(fields, e);
  return e;
}

class KvSingleStore final : public SimilarityStore {
 public:
  explicit KvSingleStore(double tau) : SimilarityStore(Layout::kv_single, tau) {}

 protected:
  std::optional<SimilarityEdge> find_impl(const ProfileId& id1, const ProfileId& id2) const override {
    auto v = kv_.get(pair_key(id1, id2));
    if (!v) return std::nullopt;
    SimilarityEdge e{id1, id2};
    decode_edge_fields(*v, e);
    return e;
  }

  void record_puts(const SimilarityEdge& e, std::vector<KvOp>& out) const override {
    out.push_back({KvOp::Kind::put, pair_key(e.id1, e.id2), encode_edge_fields(e)});
  }

  bool erase_impl(const ProfileId& id1, const ProfileId& id2) override {
    return kv_.erase(pair_key(id1, id2));
  }

  std::vector<SimilarityEdge> neighbors_impl(const ProfileId& id) const override {
    std::vector<SimilarityEdge> out;
    // id in first position: prefix scan.
    kv_.scan_prefix(id.str() + '-', [&](const std::string& k, const std::string& v) {
      auto [a, b] = split_pair_key(k);
      out.push_back(edge_from(a, b, v));
      return true;
    });
    // id in second position: the key order gives no help, so scan everything.
    kv_.scan_all([&](const std::string& k, const std::string& v) {
      auto [a, b] = split_pair_key(k);
      if (b == id.str()) out.push_back(edge_from(a, b, v));
      return true;
    });
    return out;
  }

  std::vector<SimilarityEdge> all_impl() const override {
    std::vector<SimilarityEdge> out;
    kv_.scan_all([&](const std::string& k, const std::string& v) {
      auto [a, b] = split_pair_key(k);
      out.push_back(edge_from(a, b, v));
      return true;
    });
    return out;
  }

  std::size_t record_count_impl() const override { return kv_.size(); }
};

class KvDualStore final : public SimilarityStore {
 public:
  explicit KvDualStore(double tau) : SimilarityStore(Layout::kv_dual, tau) {}

 protected:
  std::optional<SimilarityEdge> find_impl(const ProfileId& id1, const ProfileId& id2) const override {
    auto v = kv_.get(pair_key(id1, id2));
    if (!v) return std::nullopt;
    SimilarityEdge e{id1, id2};
    decode_edge_fields(*v, e);
    return e;
  }

  void record_puts(const SimilarityEdge& e, std::vector<KvOp>& out) const override {
    auto fields = encode_edge_fields(e);
    out.push_back({KvOp::Kind::put, pair_key(e.id1, e.id2), fields});
    out.push_back({KvOp::Kind::put, pair_key(e.id2, e.id1), std::move(fields)});
  }

  bool erase_impl(const ProfileId& id1, const ProfileId& id2) override {
    auto forward = pair_key(id1, id2);
    if (!kv_.contains(forward)) return false;
    KvOp ops[2] = {{KvOp::Kind::erase, std::move(forward), {}},
                   {KvOp::Kind::erase, pair_key(id2, id1), {}}};
    kv_.apply(ops);
    return true;
  }

  std::vector<SimilarityEdge> neighbors_impl(const ProfileId& id) const override {
    std::vector<SimilarityEdge> out;
    kv_.scan_prefix(id.str() + '-', [&](const std::string& k, const std::string& v) {
      auto [a, b] = split_pair_key(k);
      out.push_back(edge_from(a, b, v));
      return true;
    });
    return out;
  }

  std::vector<SimilarityEdge> all_impl() const override {
    std::vector<SimilarityEdge> out;
    kv_.scan_all([&](const std::string& k, const std::string& v) {
      auto [a, b] = split_pair_key(k);
      if (a < b) out.push_back(edge_from(a, b, v));
      return true;
    });
    return out;
  }

  std::size_t record_count_impl() const override { return kv_.size(); }
};

// Relational analog: table rows keyed by the (id1, id2) primary key hold the
// score columns; two secondary indexes map each id to its pairs.
class IndexedTableStore final : public SimilarityStore {
 public:
  explicit IndexedTableStore(double tau) : SimilarityStore(Layout::indexed_table, tau) {}

 protected:
  static std::string row_key(std::string_view id1, std::string_view id2) {
    return key3('t', id1, id2);
  }
  static std::string index_key(char which, std::string_view lead, std::string_view other) {
    return key3(which, lead, other);
  }
  static std::string key3(char tag, std::string_view a, std::string_view b) {
    std::string k;
    k.reserve(a.size() + b.size() + 3);
    k += tag;
    k += '\0';
    k += a;
    k += '\0';
    k += b;
    return k;
  }

  // The row key carries the id columns; the row value the remaining ones.
  static SimilarityEdge decode_row(std::string_view key, std::string_view fields) {
    key.remove_prefix(2);
    auto z = key.find('\0');
    if (z == key.npos) throw Error(ErrorCode::StorageFailure, "corrupt similarity row key");
    return edge_from(key.substr(0, z), key.substr(z + 1), fields);
  }

  std::optional<SimilarityEdge> find_impl(const ProfileId& id1, const ProfileId& id2) const override {
    auto v = kv_.get(row_key(id1.str(), id2.str()));
    if (!v) return std::nullopt;
    SimilarityEdge e{id1, id2};
    decode_edge_fields(*v, e);
    return e;
  }

  void record_puts(const SimilarityEdge& e, std::vector<KvOp>& out) const override {
    out.push_back({KvOp::Kind::put, row_key(e.id1.str(), e.id2.str()), encode_edge_fields(e)});
    out.push_back({KvOp::Kind::put, index_key('a', e.id1.str(), e.id2.str()), {}});
    out.push_back({KvOp::Kind::put, index_key('b', e.id2.str(), e.id1.str()), {}});
  }

  bool erase_impl(const ProfileId& id1, const ProfileId& id2) override {
    auto key = row_key(id1.str(), id2.str());
    if (!kv_.contains(key)) return false;
    KvOp ops[3] = {{KvOp::Kind::erase, std::move(key), {}},
                   {KvOp::Kind::erase, index_key('a', id1.str(), id2.str()), {}},
                   {KvOp::Kind::erase, index_key('b', id2.str(), id1.str()), {}}};
    kv_.apply(ops);
    return true;
  }

  std::vector<SimilarityEdge> neighbors_impl(const ProfileId& id) const override {
    std::vector<SimilarityEdge> out;
    auto probe = [&](char which) {
      std::string prefix{which, '\0'};
      prefix += id.str();
      prefix += '\0';
      kv_.scan_prefix(prefix, [&](const std::string& k, const std::string&) {
        std::string_view other(k);
        other.remove_prefix(prefix.size());
        auto key = which == 'a' ? row_key(id.str(), other) : row_key(other, id.str());
        if (auto row = kv_.get(key)) out.push_back(decode_row(key, *row));
        return true;
      });
    };
    probe('a');
    probe('b');
    return out;
  }

  std::vector<SimilarityEdge> all_impl() const override {
    std::vector<SimilarityEdge> out;
    kv_.scan_prefix(std::string{'t', '\0'}, [&](const std::string& k, const std::string& v) {
      out.push_back(decode_row(k, v));
      return true;
    });
    return out;
  }

  std::size_t record_count_impl() const override { return kv_.size() / 3; }
};

}  // namespace

void SimilarityStore::validate(const SimilarityEdge& e) const {
  if (e.id1.empty() || e.id2.empty()) throw Error(ErrorCode::InvalidEdge, "edge with empty id");
  if (e.id1 == e.id2) throw Error(ErrorCode::SameId, "self edge on '" + e.id1.str() + "'");
  if (!e.canonical()) {
    throw Error(ErrorCode::InvalidEdge,
                "edge (" + e.id1.str() + "," + e.id2.str() + ") is not in canonical order");
  }
  if (!(e.simsc >= 0.0)) throw Error(ErrorCode::InvalidEdge, "simsc must be non-negative");
  if (!e.cfm && !(e.simsc >= tau_store_)) {
    throw Error(ErrorCode::BelowThreshold, "simsc " + std::to_string(e.simsc) +
                                               " below store threshold " + std::to_string(tau_store_));
  }
  if (e.cfm && e.decision == Decision::pending) {
    throw Error(ErrorCode::InvalidEdge, "confirmed edge must carry a decision");
  }
}

void SimilarityStore::insert_impl(const SimilarityEdge& e) {
  std::vector<KvOp> ops;
  record_puts(e, ops);
  kv_.apply(ops);
}

void SimilarityStore::apply_one(const SimilarityEdge& e) {
  if (find_impl(e.id1, e.id2)) erase_impl(e.id1, e.id2);
  insert_impl(e);
}

void SimilarityStore::upsert_edge(const SimilarityEdge& e) {
  validate(e);
  std::unique_lock lock(mu_);
  apply_one(e);
}

std::optional<SimilarityEdge> SimilarityStore::find_edge(const ProfileId& a,
                                                         const ProfileId& b) const {
  auto [id1, id2] = canonical_pair(a, b);
  std::shared_lock lock(mu_);
  return find_impl(id1, id2);
}

SimilarityEdge SimilarityStore::get_edge(const ProfileId& a, const ProfileId& b) const {
  auto e = find_edge(a, b);
  if (!e) {
    throw Error(ErrorCode::NotFound, "no similarity edge (" + a.str() + "," + b.str() + ")");
  }
  return std::move(*e);
}

std::vector<SimilarityEdge> SimilarityStore::neighbors(const ProfileId& id) const {
  std::vector<SimilarityEdge> out;
  {
    std::shared_lock lock(mu_);
    out = neighbors_impl(id);
  }
  std::sort(out.begin(), out.end(), [](const SimilarityEdge& a, const SimilarityEdge& b) {
    return std::tie(a.id1, a.id2) < std::tie(b.id1, b.id2);
  });
  return out;
}

void SimilarityStore::delete_edge(const ProfileId& a, const ProfileId& b) {
  auto [id1, id2] = canonical_pair(a, b);
  std::unique_lock lock(mu_);
  erase_impl(id1, id2);
}

double SimilarityStore::update_transaction(std::span<const SimilarityEdge> batch) {
  auto start = std::chrono::steady_clock::now();
  for (const auto& e : batch) validate(e);
  std::vector<KvOp> ops;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto first = ops.size();
    record_puts(batch[i], ops);
    if (i == 0) ops.reserve((ops.size() - first) * batch.size());
    for (auto k = first; k < ops.size(); ++k) ops[k].kind = KvOp::Kind::replace;
  }
  std::stable_sort(ops.begin(), ops.end(), [](const KvOp& x, const KvOp& y) { return x.key < y.key; });
  std::unique_lock lock(mu_);
  kv_.apply(ops);
  lock.unlock();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<SimilarityEdge> SimilarityStore::all_edges() const {
  std::shared_lock lock(mu_);
  return all_impl();
}

std::size_t SimilarityStore::edge_count() const {
  std::shared_lock lock(mu_);
  auto records = record_count_impl();
  return layout_ == Layout::kv_dual ? records / 2 : records;
}

std::size_t SimilarityStore::record_count() const {
  std::shared_lock lock(mu_);
  return record_count_impl();
}

void SimilarityStore::attach(const std::filesystem::path& dir) {
  std::unique_lock lock(mu_);
  kv_.attach(dir);
}

void SimilarityStore::checkpoint() {
  std::unique_lock lock(mu_);
  kv_.checkpoint();
}

std::unique_ptr<SimilarityStore> make_similarity_store(Layout layout, double tau_store) {
  switch (layout) {
    case Layout::indexed_table: return std::make_unique<IndexedTableStore>(tau_store);
    case Layout::kv_single: return std::make_unique<KvSingleStore>(tau_store);
    case Layout::kv_dual: return std::make_unique<KvDualStore>(tau_store);
  }
  return nullptr;
}

}  // namespace provlink
