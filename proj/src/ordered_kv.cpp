#include "provlink/ordered_kv.hpp"

#include <array>
#include <cstring>

#include "provlink/error.hpp"

namespace provlink {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  std::array<char, 4> buf{char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                          char((v >> 24) & 0xff)};
  out.append(buf.data(), buf.size());
}

bool get_u32(std::string_view& in, std::uint32_t& v) {
  if (in.size() < 4) return false;
  auto b = [&](int i) { return std::uint32_t(static_cast<unsigned char>(in[std::size_t(i)])); };
  v = b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
  in.remove_prefix(4);
  return true;
}

bool get_bytes(std::string_view& in, std::uint32_t n, std::string& out) {
  if (in.size() < n) return false;
  out.assign(in.data(), n);
  in.remove_prefix(n);
  return true;
}

std::string encode_ops(std::span<const KvOp> ops) {
  std::string rec;
  for (const auto& op : ops) {
    rec.push_back(char(op.kind));
    put_u32(rec, std::uint32_t(op.key.size()));
    rec += op.key;
    put_u32(rec, std::uint32_t(op.value.size()));
    rec += op.value;
  }
  return rec;
}

std::vector<KvOp> decode_ops(std::string_view rec) {
  std::vector<KvOp> ops;
  while (!rec.empty()) {
    KvOp op;
    auto kind = static_cast<std::uint8_t>(rec.front());
    if (kind > std::uint8_t(KvOp::Kind::replace)) throw Error(ErrorCode::StorageFailure, "corrupt kv log record");
    op.kind = KvOp::Kind(kind);
    rec.remove_prefix(1);
    std::uint32_t n = 0;
    if (!get_u32(rec, n) || !get_bytes(rec, n, op.key) || !get_u32(rec, n) ||
        !get_bytes(rec, n, op.value)) {
      throw Error(ErrorCode::StorageFailure, "corrupt kv log record");
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

}  // namespace

FramedLog::FramedLog(const std::filesystem::path& path) : path_(path) {
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorCode::StorageFailure, "cannot open log " + path.string());
}

void FramedLog::append(std::string_view record) {
  std::string frame;
  frame.reserve(record.size() + 4);
  put_u32(frame, std::uint32_t(record.size()));
  frame += record;
  out_.write(frame.data(), std::streamsize(frame.size()));
  if (!out_) throw Error(ErrorCode::StorageFailure, "write failed on " + path_.string());
}

void FramedLog::flush() {
  out_.flush();
  if (!out_) throw Error(ErrorCode::StorageFailure, "flush failed on " + path_.string());
}

void FramedLog::close() {
  if (out_.is_open()) out_.close();
}

void FramedLog::truncate() {
  close();
  out_.open(path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(ErrorCode::StorageFailure, "cannot truncate " + path_.string());
}

std::vector<std::string> FramedLog::read_all(const std::filesystem::path& path) {
  std::vector<std::string> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return records;
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string_view rest(data);
  std::uint32_t n = 0;
  std::string rec;
  while (get_u32(rest, n) && get_bytes(rest, n, rec)) records.push_back(std::move(rec));
  return records;
}

void FramedLog::write_atomic(const std::filesystem::path& path,
                             std::span<const std::string> records) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + tmp.string());
    std::string frame;
    for (const auto& r : records) {
      frame.clear();
      put_u32(frame, std::uint32_t(r.size()));
      frame += r;
      out.write(frame.data(), std::streamsize(frame.size()));
    }
    out.flush();
    if (!out) throw Error(ErrorCode::StorageFailure, "write failed on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "rename failed: " + ec.message());
}

OrderedKv::~OrderedKv() { log_.close(); }

void OrderedKv::attach(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot create " + dir.string());
  dir_ = dir;
  map_.clear();
  for (const auto& rec : FramedLog::read_all(dir / "snapshot")) {
    for (const auto& op : decode_ops(rec)) apply_in_memory(op);
  }
  for (const auto& rec : FramedLog::read_all(dir / "log")) {
    for (const auto& op : decode_ops(rec)) apply_in_memory(op);
  }
  log_ = FramedLog(dir / "log");
}

void OrderedKv::checkpoint() {
  if (!persistent()) return;
  std::vector<std::string> records;
  std::vector<KvOp> chunk;
  auto emit = [&] {
    records.push_back(encode_ops(chunk));
    chunk.clear();
  };
  for (const auto& [k, v] : map_) {
    chunk.push_back(KvOp{KvOp::Kind::put, k, v});
    if (chunk.size() == 4096) emit();
  }
  if (!chunk.empty()) emit();
  FramedLog::write_atomic(dir_ / "snapshot", records);
  log_.truncate();
}

std::optional<std::string> OrderedKv::get(std::string_view key) const {
  auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

bool OrderedKv::contains(std::string_view key) const { return map_.contains(key); }

void OrderedKv::put(std::string key, std::string value) {
  KvOp op{KvOp::Kind::put, std::move(key), std::move(value)};
  if (persistent()) log_ops({&op, 1});
  apply_in_memory(op);
}

bool OrderedKv::erase(std::string_view key) {
  auto it = map_.find(key);
  if (it == map_.end()) return false;
  if (persistent()) {
    KvOp op{KvOp::Kind::erase, std::string(key), {}};
    log_ops({&op, 1});
  }
  map_.erase(it);
  return true;
}

void OrderedKv::apply(std::span<const KvOp> ops) {
  if (persistent()) log_ops(ops);
  for (const auto& op : ops) apply_in_memory(op);
}

void OrderedKv::apply_in_memory(const KvOp& op) {
  switch (op.kind) {
    case KvOp::Kind::put:
      map_.insert_or_assign(op.key, op.value);
      break;
    case KvOp::Kind::erase:
      map_.erase(op.key);
      break;
    case KvOp::Kind::replace: {
      // One descent; the insert is hinted at the erased position.
      auto it = map_.lower_bound(op.key);
      if (it != map_.end() && it->first == op.key) it = map_.erase(it);
      map_.insert(it, {op.key, op.value});
      break;
    }
  }
}

void OrderedKv::log_ops(std::span<const KvOp> ops) {
  log_.append(encode_ops(ops));
  log_.flush();
}

void OrderedKv::scan_prefix(
    std::string_view prefix,
    const std::function<bool(const std::string&, const std::string&)>& fn) const {
  for (auto it = map_.lower_bound(prefix); it != map_.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    if (!fn(it->first, it->second)) break;
  }
}

void OrderedKv::scan_all(
    const std::function<bool(const std::string&, const std::string&)>& fn) const {
  for (const auto& [k, v] : map_) {
    if (!fn(k, v)) break;
  }
}

}  // namespace provlink
