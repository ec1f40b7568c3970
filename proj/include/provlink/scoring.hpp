#pragma once

// Pairwise similarity: match level M, information level I, the rarity weight
// inf(w), simsc and the key-attribute rejection score rejsc.
//
//   simsc(p1, p2) = sum over keys X shared by p1 and p2 of M_X * I_X
//   inf(m)        = 1 / (1 + exp(alpha * m - beta))

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "provlink/analyzers.hpp"
#include "provlink/profile.hpp"

namespace provlink {

struct MatchConfig {
  double alpha = 0.1;
  double beta = 60.0;
  int ngram_n = 2;
  double value_match_threshold = 0.7;
  double phonetic_weight = 0.9;
  double provenance_damping = 0.8;
  double initial_weight = 0.6;  // single-letter token vs a word with that initial
  std::map<std::string, std::vector<std::string>, std::less<>> key_attributes{
      {"person", {"bdate"}}, {"location", {"post"}}};
  std::map<std::string, double, std::less<>> key_thresholds;  // per-key override
  double tau_store = 0.5;
  double tau_match = 1.5;
  std::uint32_t rho_max = 0;
  std::size_t candidates_k = 50;

  double threshold_for(std::string_view key) const;

  // Throws ConfigError on out-of-range values.
  void validate() const;

  // `name = value` lines, '#' comments. Recognized names are the fields above
  // (candidates_k also as `k`), `key_attributes.<type> = a,b` and
  // `threshold.<key> = x`. Unknown names are a ConfigError.
  static MatchConfig parse(std::string_view text);
  static MatchConfig load(const std::filesystem::path& path);
};

// m(w): number of indexed profiles whose summary contains w.
class WordStats {
 public:
  void add(std::span<const std::string> bag);
  void remove(std::span<const std::string> bag);
  void clear();

  std::size_t count(std::string_view word) const;
  std::size_t total_profiles() const { return total_; }
  const std::map<std::string, std::size_t, std::less<>>& counts() const { return counts_; }

  friend bool operator==(const WordStats&, const WordStats&) = default;

 private:
  std::map<std::string, std::size_t, std::less<>> counts_;
  std::size_t total_ = 0;
};

// For small m, 1 - inf(m) is far below double resolution (about 1e-26 at
// m = 0 with the defaults); binary128 keeps the values strictly decreasing.
using InfWeight = __float128;

// 1 / (1 + exp(alpha * m - beta)). The exponent is formed in double, the rest
// is evaluated in binary128.
InfWeight inf(std::size_t m_count, const MatchConfig& cfg);

// One attribute/relation value reduced to its normalized words.
struct ValueBag {
  std::vector<std::string> words;
  Provenance prov;
};

struct MatchedPair {
  std::string w1;
  std::string w2;
  double level = 0.0;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct MatchResult {
  double score = 0.0;
  std::vector<MatchedPair> pairs;
};

// Level of a single word pair: 1 exact, phonetic_weight on a shared
// double-metaphone code, initial_weight for an initial against a word with
// that initial, otherwise edit_sim when the n-gram similarity reaches the
// threshold. Numeric words only match exactly.
double word_level(std::string_view w1, std::string_view w2, const MatchConfig& cfg,
                  double threshold);

double provenance_factor(std::span<const ProvPair> prov1, std::span<const ProvPair> prov2,
                         const MatchConfig& cfg);

MatchResult match_level(std::string_view key, std::span<const ValueBag> vals1,
                        std::span<const ValueBag> vals2, const MatchConfig& cfg);

double info_level(std::span<const MatchedPair> pairs, const WordStats& stats,
                  const MatchConfig& cfg);

// Words of a value as indexed: a whole-value calendar date becomes one digit
// token (1980.12.12 and 1980-12-12 both give 19801212); anything else goes
// through the analyzer.
std::vector<std::string> value_words(std::string_view value, const Analyzer& analyzer);

// Normalized words of the profile's own attribute values, "type" excluded.
std::vector<std::string> own_words(const Profile& p, const Analyzer& analyzer);

using Resolver = std::function<std::optional<Profile>(const ProfileId&)>;

class Scorer {
 public:
  Scorer(const MatchConfig& cfg, const Analyzer& analyzer, const WordStats& stats,
         Resolver resolve);

  // Values of `key` as bags; relation targets contribute the target's own
  // words, or the tokenized id when the target does not resolve.
  std::vector<ValueBag> bags(const Profile& p, std::string_view key) const;

  MatchResult match(std::string_view key, const Profile& p1, const Profile& p2) const;

  // Throws SameId when both profiles carry the same id.
  double simsc(const Profile& p1, const Profile& p2) const;
  std::uint32_t rejsc(const Profile& p1, const Profile& p2) const;

 private:
  const MatchConfig& cfg_;
  const Analyzer& analyzer_;
  const WordStats& stats_;
  Resolver resolve_;
};

// Keys with values in both profiles, "type" excluded, ascending.
std::vector<std::string> shared_keys(const Profile& p1, const Profile& p2);

}  // namespace provlink
