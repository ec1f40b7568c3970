#include "provlink/analyzers.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "builtin_dictionaries.hpp"
#include "provlink/error.hpp"

namespace provlink {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(char(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = char(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Calls fn(left, right) for each `left<TAB>right` line; skips blanks and comments.
template <typename Fn>
void for_each_tsv_line(std::string_view text, std::string_view what, Fn&& fn) {
  std::size_t lineno = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::SchemaError,
                  std::string(what) + " line " + std::to_string(lineno) + ": missing TAB");
    }
    fn(trim(line.substr(0, tab)), trim(line.substr(tab + 1)));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void push_unique(std::vector<std::string>& v, std::string s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(std::move(s));
}

}  // namespace

void AliasDictionary::add(std::string_view canonical, std::string_view alias) {
  auto c = lower(canonical);
  auto a = lower(alias);
  if (c.empty() || a.empty() || c == a) return;
  push_unique(entries_[c], a);
  push_unique(reverse_[a], c);
}

std::vector<std::string> AliasDictionary::expand(std::string_view word) const {
  std::vector<std::string> out{std::string(word)};
  if (auto it = entries_.find(word); it != entries_.end()) {
    for (const auto& a : it->second) push_unique(out, a);
  }
  if (auto it = reverse_.find(word); it != reverse_.end()) {
    for (const auto& c : it->second) push_unique(out, c);
  }
  return out;
}

AliasDictionary AliasDictionary::parse(std::string_view text) {
  AliasDictionary dict;
  for_each_tsv_line(text, "alias dictionary", [&](std::string_view canonical, std::string_view rest) {
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto comma = rest.find(',', start);
      auto alias = trim(rest.substr(start, comma == std::string_view::npos ? rest.npos : comma - start));
      if (!alias.empty()) dict.add(canonical, alias);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  });
  return dict;
}

AliasDictionary AliasDictionary::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

const AliasDictionary& AliasDictionary::builtin() {
  static const AliasDictionary dict = parse(builtin::kAliasesTsv);
  return dict;
}

std::vector<std::string> expand_aliases(std::string_view word, const AliasDictionary& dict) {
  return dict.expand(word);
}

void StreetTypeDictionary::add(std::string_view abbrev, std::string_view full) {
  auto a = lower(abbrev);
  auto f = lower(full);
  if (a.empty() || f.empty()) return;
  abbrev_to_full_.insert_or_assign(a, f);
  full_to_abbrev_.insert_or_assign(f, a);
}

std::string StreetTypeDictionary::counterpart(std::string_view word) const {
  auto w = lower(word);
  if (auto it = abbrev_to_full_.find(w); it != abbrev_to_full_.end()) return it->second;
  if (auto it = full_to_abbrev_.find(w); it != full_to_abbrev_.end()) return it->second;
  return {};
}

bool StreetTypeDictionary::is_abbreviation(std::string_view word) const {
  return abbrev_to_full_.contains(lower(word));
}

StreetTypeDictionary StreetTypeDictionary::parse(std::string_view text) {
  StreetTypeDictionary dict;
  for_each_tsv_line(text, "street-type dictionary",
                    [&](std::string_view abbrev, std::string_view full) { dict.add(abbrev, full); });
  return dict;
}

StreetTypeDictionary StreetTypeDictionary::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

const StreetTypeDictionary& StreetTypeDictionary::builtin() {
  static const StreetTypeDictionary dict = parse(builtin::kStreetTypesTsv);
  return dict;
}

std::vector<std::string> normalize_address(const std::vector<std::string>& words,
                                           const StreetTypeDictionary& dict) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    out.push_back(w);
    if (auto other = dict.counterpart(w); !other.empty()) out.push_back(std::move(other));
  }
  return out;
}

double ngram_sim(std::string_view a, std::string_view b, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidN, "n-gram size must be >= 1");
  auto un = std::size_t(n);
  if (a.size() < un || b.size() < un) return a == b ? 1.0 : 0.0;
  auto grams = [un](std::string_view s) {
    std::set<std::string_view> g;
    for (std::size_t i = 0; i + un <= s.size(); ++i) g.insert(s.substr(i, un));
    return g;
  };
  auto ga = grams(a);
  auto gb = grams(b);
  std::size_t shared = 0;
  for (const auto& g : ga) shared += gb.count(g);
  return 2.0 * double(shared) / double(ga.size() + gb.size());
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0u : 1u)});
      diag = up;
    }
  }
  return row[b.size()];
}

double edit_sim(std::string_view a, std::string_view b) {
  auto longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - double(levenshtein(a, b)) / double(longest);
}

std::vector<std::string> Analyzer::words(std::string_view text) const {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(text)) {
    for (auto& w : normalize_address(expand_aliases(tok, aliases), streets)) {
      push_unique(out, std::move(w));
    }
  }
  return out;
}

}  // namespace provlink
