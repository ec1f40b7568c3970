#include "provlink/scoring.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "provlink/error.hpp"
#include "provlink/temporal.hpp"

namespace provlink {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(),
                                   [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == text.npos) comma = text.size();
    auto item = trim(text.substr(start, comma - start));
    if (!item.empty()) out.emplace_back(item);
    start = comma + 1;
  }
  return out;
}

double parse_real(std::string_view name, std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ConfigError, "bad number for " + std::string(name));
  }
  return v;
}

std::uint64_t parse_count(std::string_view name, std::string_view text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ConfigError, "bad integer for " + std::string(name));
  }
  return v;
}

enum class PairKind { none, exact, phonetic, initial, approximate };

struct Level {
  double value = 0.0;
  PairKind kind = PairKind::none;
};

bool initial_of(std::string_view letter, std::string_view word) {
  return letter.size() == 1 && word.size() > 1 && word.front() == letter.front() &&
         std::isalpha(static_cast<unsigned char>(letter.front()));
}

Level classify(std::string_view w1, std::string_view w2, const MatchConfig& cfg,
               double threshold) {
  if (w1 == w2) return {1.0, PairKind::exact};
  if (all_digits(w1) || all_digits(w2)) return {};
  if (initial_of(w1, w2) || initial_of(w2, w1)) return {cfg.initial_weight, PairKind::initial};
  if (w1.size() > 1 && w2.size() > 1 && double_metaphone(w1).intersects(double_metaphone(w2))) {
    return {cfg.phonetic_weight, PairKind::phonetic};
  }
  if (ngram_sim(w1, w2, cfg.ngram_n) >= threshold) {
    return {edit_sim(w1, w2), PairKind::approximate};
  }
  return {};
}

bool retained(const Level& l, double threshold) {
  if (l.kind == PairKind::none) return false;
  return l.kind == PairKind::initial ? l.value > 0.0 : l.value >= threshold;
}

template <typename Objects>
void append_key(std::vector<std::string>& out, const Objects& objects) {
  for (const auto& o : objects) {
    if (o.key != kTypeKey) out.push_back(o.key);
  }
}

}  // namespace

double MatchConfig::threshold_for(std::string_view key) const {
  auto it = key_thresholds.find(key);
  return it == key_thresholds.end() ? value_match_threshold : it->second;
}

void MatchConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!(alpha > 0.0)) throw Error(ErrorCode::ConfigError, "alpha must be > 0");
  if (ngram_n < 1) throw Error(ErrorCode::ConfigError, "ngram_n must be >= 1");
  if (!unit(value_match_threshold) || !unit(phonetic_weight) || !unit(provenance_damping) ||
      !unit(initial_weight)) {
    throw Error(ErrorCode::ConfigError, "weights and value_match_threshold must lie in [0,1]");
  }
  for (const auto& [key, t] : key_thresholds) {
    if (!unit(t)) throw Error(ErrorCode::ConfigError, "threshold." + key + " must lie in [0,1]");
  }
  if (tau_store < 0.0 || tau_match < 0.0) {
    throw Error(ErrorCode::ConfigError, "thresholds must be non-negative");
  }
  if (candidates_k < 1) throw Error(ErrorCode::ConfigError, "k must be >= 1");
}

MatchConfig MatchConfig::parse(std::string_view text) {
  MatchConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == line.npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected name = value");
    }
    auto name = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (name == "alpha") cfg.alpha = parse_real(name, value);
    else if (name == "beta") cfg.beta = parse_real(name, value);
    else if (name == "ngram_n") cfg.ngram_n = int(parse_count(name, value));
    else if (name == "value_match_threshold") cfg.value_match_threshold = parse_real(name, value);
    else if (name == "phonetic_weight") cfg.phonetic_weight = parse_real(name, value);
    else if (name == "provenance_damping") cfg.provenance_damping = parse_real(name, value);
    else if (name == "initial_weight") cfg.initial_weight = parse_real(name, value);
    else if (name == "tau_store") cfg.tau_store = parse_real(name, value);
    else if (name == "tau_match") cfg.tau_match = parse_real(name, value);
    else if (name == "rho_max") cfg.rho_max = std::uint32_t(parse_count(name, value));
    else if (name == "k" || name == "candidates_k") cfg.candidates_k = parse_count(name, value);
    else if (name.starts_with("key_attributes.") && name.size() > 15) {
      cfg.key_attributes[std::string(name.substr(15))] = split_list(value);
    } else if (name.starts_with("threshold.") && name.size() > 10) {
      cfg.key_thresholds[std::string(name.substr(10))] = parse_real(name, value);
    } else {
      throw Error(ErrorCode::ConfigError, "unknown setting: " + std::string(name));
    }
  }
  cfg.validate();
  return cfg;
}

MatchConfig MatchConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void WordStats::add(std::span<const std::string> bag) {
  ++total_;
  for (const auto& w : bag) ++counts_[w];
}

void WordStats::remove(std::span<const std::string> bag) {
  if (total_ > 0) --total_;
  for (const auto& w : bag) {
    auto it = counts_.find(w);
    if (it == counts_.end()) continue;
    if (--it->second == 0) counts_.erase(it);
  }
}

void WordStats::clear() {
  counts_.clear();
  total_ = 0;
}

std::size_t WordStats::count(std::string_view word) const {
  auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

InfWeight inf(std::size_t m_count, const MatchConfig& cfg) {
  double x = cfg.alpha * double(m_count) - cfg.beta;
  return InfWeight(1) / (InfWeight(1) + expq(InfWeight(x)));
}

double word_level(std::string_view w1, std::string_view w2, const MatchConfig& cfg,
                  double threshold) {
  return classify(w1, w2, cfg, threshold).value;
}

double provenance_factor(std::span<const ProvPair> prov1, std::span<const ProvPair> prov2,
                         const MatchConfig& cfg) {
  if (!has_temporal(prov1) || !has_temporal(prov2)) return 1.0;
  return validity_interval(prov1).overlaps(validity_interval(prov2)) ? 1.0
                                                                     : cfg.provenance_damping;
}

MatchResult match_level(std::string_view key, std::span<const ValueBag> vals1,
                        std::span<const ValueBag> vals2, const MatchConfig& cfg) {
  MatchResult out;
  if (vals1.empty() || vals2.empty()) return out;
  double threshold = cfg.threshold_for(key);
  std::map<std::pair<std::string, std::string>, double> kept;
  for (const auto& v1 : vals1) {
    for (const auto& v2 : vals2) {
      double best = 0.0;
      for (const auto& w1 : v1.words) {
        for (const auto& w2 : v2.words) {
          auto l = classify(w1, w2, cfg, threshold);
          if (!retained(l, threshold)) continue;
          best = std::max(best, l.value);
          auto& slot = kept[{w1, w2}];
          slot = std::max(slot, l.value);
        }
      }
      if (best > 0.0) {
        out.score = std::max(out.score, best * provenance_factor(v1.prov, v2.prov, cfg));
      }
    }
  }
  for (auto& [words, level] : kept) out.pairs.push_back({words.first, words.second, level});
  return out;
}

double info_level(std::span<const MatchedPair> pairs, const WordStats& stats,
                  const MatchConfig& cfg) {
  InfWeight best = 0;
  for (const auto& p : pairs) {
    best = std::max(best, (inf(stats.count(p.w1), cfg) + inf(stats.count(p.w2), cfg)) / 2);
  }
  return double(best);
}

std::vector<std::string> value_words(std::string_view value, const Analyzer& analyzer) {
  auto v = trim(value);
  if (v.find_first_of("-./") != v.npos && parse_date(v)) {
    std::string digits;
    for (char c : v) {
      if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
    }
    return {digits};
  }
  return analyzer.words(v);
}

std::vector<std::string> own_words(const Profile& p, const Analyzer& analyzer) {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  for (const auto& a : p.attributes) {
    if (a.key == kTypeKey) continue;
    for (auto& w : value_words(a.value, analyzer)) {
      if (seen.insert(w).second) out.push_back(std::move(w));
    }
  }
  return out;
}

std::vector<std::string> shared_keys(const Profile& p1, const Profile& p2) {
  std::vector<std::string> k1, k2, out;
  append_key(k1, p1.attributes);
  append_key(k1, p1.relations);
  append_key(k2, p2.attributes);
  append_key(k2, p2.relations);
  std::sort(k1.begin(), k1.end());
  std::sort(k2.begin(), k2.end());
  k1.erase(std::unique(k1.begin(), k1.end()), k1.end());
  k2.erase(std::unique(k2.begin(), k2.end()), k2.end());
  std::set_intersection(k1.begin(), k1.end(), k2.begin(), k2.end(), std::back_inserter(out));
  return out;
}

Scorer::Scorer(const MatchConfig& cfg, const Analyzer& analyzer, const WordStats& stats,
               Resolver resolve)
    : cfg_(cfg), analyzer_(analyzer), stats_(stats), resolve_(std::move(resolve)) {}

std::vector<ValueBag> Scorer::bags(const Profile& p, std::string_view key) const {
  std::vector<ValueBag> out;
  for (const auto& a : p.attributes) {
    if (a.key == key) out.push_back({value_words(a.value, analyzer_), a.prov});
  }
  for (const auto& r : p.relations) {
    if (r.key != key) continue;
    std::optional<Profile> target = resolve_ ? resolve_(r.target) : std::nullopt;
    out.push_back({target ? own_words(*target, analyzer_) : tokenize(r.target.str()), r.prov});
  }
  return out;
}

MatchResult Scorer::match(std::string_view key, const Profile& p1, const Profile& p2) const {
  auto b1 = bags(p1, key);
  auto b2 = bags(p2, key);
  return match_level(key, b1, b2, cfg_);
}

double Scorer::simsc(const Profile& p1, const Profile& p2) const {
  if (p1.id == p2.id) throw Error(ErrorCode::SameId, "simsc of a profile with itself");
  double total = 0.0;
  for (const auto& key : shared_keys(p1, p2)) {
    auto m = match(key, p1, p2);
    if (m.score > 0.0) total += m.score * info_level(m.pairs, stats_, cfg_);
  }
  return total;
}

std::uint32_t Scorer::rejsc(const Profile& p1, const Profile& p2) const {
  auto label = p1.label();
  if (label != p2.label()) return 0;
  auto it = cfg_.key_attributes.find(label);
  if (it == cfg_.key_attributes.end()) return 0;
  std::uint32_t penalty = 0;
  for (const auto& key : it->second) {
    auto b1 = bags(p1, key);
    auto b2 = bags(p2, key);
    if (b1.empty() || b2.empty()) continue;
    if (match_level(key, b1, b2, cfg_).score < cfg_.threshold_for(key)) ++penalty;
  }
  return penalty;
}

}  // namespace provlink
