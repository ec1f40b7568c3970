#pragma once

// Ordered key-value substrate shared by the KB store and the similarity-store
// layouts: a sorted in-memory map, optionally made durable by an append-only
// log of framed records plus a snapshot written on checkpoint.

#include <absl/container/btree_map.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace provlink {

// Append-only file of length-prefixed records (u32 little-endian length,
// then payload). A torn tail record is ignored when reading.
class FramedLog {
 public:
  FramedLog() = default;
  explicit FramedLog(const std::filesystem::path& path);

  bool is_open() const { return out_.is_open(); }
  void append(std::string_view record);
  void flush();
  void close();
  void truncate();

  static std::vector<std::string> read_all(const std::filesystem::path& path);
  // Writes all records to a temporary file and renames it over `path`.
  static void write_atomic(const std::filesystem::path& path,
                           std::span<const std::string> records);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct KvOp {
  // replace: search, delete if present, insert.
  enum class Kind : std::uint8_t { put, erase, replace };
  Kind kind = Kind::put;
  std::string key;
  std::string value;
};

class OrderedKv {
 public:
  using Map = absl::btree_map<std::string, std::string, std::less<>>;

  OrderedKv() = default;
  OrderedKv(const OrderedKv&) = delete;
  OrderedKv& operator=(const OrderedKv&) = delete;
  ~OrderedKv();

  // Loads `dir/snapshot`, replays `dir/log`, and logs subsequent writes there.
  void attach(const std::filesystem::path& dir);
  bool persistent() const { return log_.is_open(); }
  // Rewrites the snapshot from memory and truncates the log.
  void checkpoint();

  std::optional<std::string> get(std::string_view key) const;
  bool contains(std::string_view key) const;
  void put(std::string key, std::string value);
  bool erase(std::string_view key);
  // Applies all ops; when persistent they are logged as one record.
  void apply(std::span<const KvOp> ops);

  std::size_t size() const { return map_.size(); }
  void clear() { map_.clear(); }

  // Visits entries in key order until fn returns false.
  void scan_prefix(std::string_view prefix,
                   const std::function<bool(const std::string&, const std::string&)>& fn) const;
  void scan_all(const std::function<bool(const std::string&, const std::string&)>& fn) const;

 private:
  void apply_in_memory(const KvOp& op);
  void log_ops(std::span<const KvOp> ops);

  Map map_;
  std::filesystem::path dir_;
  FramedLog log_;
};

}  // namespace provlink
