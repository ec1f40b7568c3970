#pragma once

// Text normalization and string-similarity primitives shared by the indexer
// and the scoring functions.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace provlink {

// Lowercase maximal runs of ASCII letters/digits. Bytes >= 0x80 are kept
// inside words so UTF-8 names are not split.
std::vector<std::string> tokenize(std::string_view text);

struct PhoneticCode {
  std::string primary;
  std::string alternate;  // equals primary when the word has no alternate

  bool empty() const { return primary.empty() && alternate.empty(); }
  bool intersects(const PhoneticCode& other) const;

  friend bool operator==(const PhoneticCode&, const PhoneticCode&) = default;
};

inline constexpr std::size_t kMetaphoneMaxLength = 4;

// Double metaphone (Lawrence Philips). Case-insensitive; purely numeric words
// yield empty codes.
PhoneticCode double_metaphone(std::string_view word,
                              std::size_t max_length = kMetaphoneMaxLength);

// Canonical name -> aliases. Lookups are symmetric: an alias expands to its
// canonical names as well.
class AliasDictionary {
 public:
  AliasDictionary() = default;

  void add(std::string_view canonical, std::string_view alias);
  std::size_t size() const { return entries_.size(); }

  // [word] followed by everything one dictionary step away, in dictionary order.
  std::vector<std::string> expand(std::string_view word) const;

  // `canonical<TAB>alias1,alias2,...`; '#' starts a comment line.
  static AliasDictionary load(const std::filesystem::path& path);
  static AliasDictionary parse(std::string_view text);
  static const AliasDictionary& builtin();

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
  std::map<std::string, std::vector<std::string>, std::less<>> reverse_;
};

std::vector<std::string> expand_aliases(std::string_view word, const AliasDictionary& dict);

class StreetTypeDictionary {
 public:
  void add(std::string_view abbrev, std::string_view full);

  // Counterpart of a street-type word in either direction; empty if none.
  std::string counterpart(std::string_view word) const;
  bool is_abbreviation(std::string_view word) const;

  // `abbrev<TAB>full`; '#' starts a comment line.
  static StreetTypeDictionary load(const std::filesystem::path& path);
  static StreetTypeDictionary parse(std::string_view text);
  static const StreetTypeDictionary& builtin();

 private:
  std::map<std::string, std::string, std::less<>> abbrev_to_full_;
  std::map<std::string, std::string, std::less<>> full_to_abbrev_;
};

// Each street-type word is followed by its counterpart so both forms are
// present; other words pass through unchanged.
std::vector<std::string> normalize_address(const std::vector<std::string>& words,
                                           const StreetTypeDictionary& dict);

// Dice coefficient over the sets of character n-grams. Strings shorter than
// n compare by equality. Throws InvalidN when n < 1.
double ngram_sim(std::string_view a, std::string_view b, int n);

std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - levenshtein / max length; two empty strings are identical.
double edit_sim(std::string_view a, std::string_view b);

// Dictionaries bundled for the normalization pipeline.
struct Analyzer {
  AliasDictionary aliases = AliasDictionary::builtin();
  StreetTypeDictionary streets = StreetTypeDictionary::builtin();

  // tokenize, then alias and street-type expansion; duplicates removed,
  // first occurrence order kept.
  std::vector<std::string> words(std::string_view text) const;
};

}  // namespace provlink
