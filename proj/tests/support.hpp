#pragma once

// Shared fixtures, generators and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "provlink/profile.hpp"
#include "provlink/sim_store.hpp"

namespace provlink {

inline void PrintTo(const ProfileId& id, std::ostream* os) { *os << id.str(); }
inline void PrintTo(Layout layout, std::ostream* os) { *os << layout_name(layout); }

}  // namespace provlink

namespace provlink::testing {

inline AttributeObject attr(std::string k, std::string v, Provenance prov = {}) {
  return {std::move(k), std::move(v), std::move(prov)};
}

inline RelationObject rel(std::string k, std::string target, Provenance prov = {}) {
  return {std::move(k), ProfileId(std::move(target)), std::move(prov)};
}

// The four profiles of the running example.
inline Profile p1() {
  return make_profile(ProfileId("P1"),
                      {attr("type", "person"), attr("name", "John"),
                       attr("name", "Peter", {{"until", "1991"}}), attr("sex", "m")},
                      {rel("lives_at", "L1", {{"from", "1989"}, {"to", "1995"}}),
                       rel("friend", "P2"), rel("owns", "L1")});
}

inline Profile p2() {
  return make_profile(ProfileId("P2"),
                      {attr("type", "person"), attr("name", "Bob"),
                       attr("name", "John", {{"until", "1990"}}), attr("bdate", "1980.12.12")},
                      {rel("lives_at", "L1", {{"from", "1990"}, {"to", "2000"}}),
                       rel("lives_at", "L2", {{"from", "2001"}}), rel("friend", "P1")});
}

inline Profile p3() {
  return make_profile(ProfileId("L1"),
                      {attr("type", "location"), attr("numb", "1"), attr("street", "Brown Blvd."),
                       attr("post", "2000")},
                      {rel("owned_by", "P1", {{"from", "1989"}})});
}

inline Profile p4() {
  return make_profile(ProfileId("L2"),
                      {attr("type", "location"), attr("numb", "69"), attr("street", "Brown Ave."),
                       attr("post", "5000")},
                      {});
}

inline std::vector<Profile> table2() { return {p1(), p2(), p3(), p4()}; }

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(PROVLINK_SOURCE_DIR) / "fixtures" / name;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("provlink-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Hand-rolled generators over a seeded engine.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  std::string word(std::size_t min_len, std::size_t max_len, std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz") {
    std::string w;
    auto len = min_len + below(max_len - min_len + 1);
    for (std::size_t i = 0; i < len; ++i) w += alphabet[below(alphabet.size())];
    return w;
  }

  template <typename T>
  const T& pick(const std::vector<T>& xs) { return xs[below(xs.size())]; }

  std::string year() { return std::to_string(1950 + below(70)); }

  Provenance prov() {
    Provenance out;
    switch (below(5)) {
      case 0: out.push_back({"from", year()}); break;
      case 1: out.push_back({"until", year()}); break;
      case 2: out.push_back({"source", word(3, 6)}); break;
      case 3: out.push_back({"from", year()}); out.push_back({"to", year()}); break;
      default: break;
    }
    return out;
  }

  // Random profile over a small vocabulary so values collide often.
  Profile profile(const std::string& id, const std::vector<std::string>& vocab,
                  const std::vector<std::string>& ids) {
    static const std::vector<std::string> attr_keys{"name", "city", "sex", "bdate", "post"};
    static const std::vector<std::string> rel_keys{"friend", "lives_at", "knows"};
    std::vector<AttributeObject> attrs;
    attrs.push_back(attr("type", coin() ? "person" : "location"));
    auto n = below(5);
    for (std::size_t i = 0; i < n; ++i) {
      std::string value = pick(vocab);
      if (coin(0.3)) value += " " + pick(vocab);
      attrs.push_back(attr(pick(attr_keys), value, prov()));
    }
    std::vector<RelationObject> rels;
    auto r = below(3);
    for (std::size_t i = 0; i < r && !ids.empty(); ++i) rels.push_back(rel(pick(rel_keys), pick(ids), prov()));
    return make_profile(ProfileId(id), std::move(attrs), std::move(rels));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// ---- oracles ----

inline std::size_t levenshtein_oracle(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

inline double dice_oracle(const std::string& a, const std::string& b, std::size_t n) {
  if (a.size() < n || b.size() < n) return a == b ? 1.0 : 0.0;
  std::set<std::string> ga, gb;
  for (std::size_t i = 0; i + n <= a.size(); ++i) ga.insert(a.substr(i, n));
  for (std::size_t i = 0; i + n <= b.size(); ++i) gb.insert(b.substr(i, n));
  std::size_t shared = 0;
  for (const auto& g : ga) shared += gb.count(g);
  return 2.0 * double(shared) / double(ga.size() + gb.size());
}

inline double sigmoid_oracle(double m, double alpha = 0.1, double beta = 60.0) {
  return 1.0 / (1.0 + std::exp(alpha * m - beta));
}

// Same expression at 50 decimal digits. The exponent is formed in double, as
// the configuration parameters are doubles.
using Precise = boost::multiprecision::cpp_bin_float_50;

inline Precise sigmoid_precise(double m, double alpha = 0.1, double beta = 60.0) {
  Precise x(alpha * m - beta);
  return 1 / (1 + boost::multiprecision::exp(x));
}

}  // namespace provlink::testing
