#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "provlink/json_codec.hpp"
#include "provlink/error.hpp"
#include "provlink/scoring.hpp"
#include "support.hpp"

namespace provlink {
namespace {

using testing::attr;
using testing::rel;

const Analyzer& analyzer() {
  static const Analyzer a;
  return a;
}

struct Corpus {
  std::map<std::string, Profile> profiles;
  WordStats stats;

  explicit Corpus(const std::vector<Profile>& ps) {
    for (const auto& p : ps) profiles.insert_or_assign(p.id.str(), p);
    for (const auto& p : ps) {
      auto w = own_words(p, analyzer());
      stats.add(w);
    }
  }
  Resolver resolver() const {
    return [this](const ProfileId& id) -> std::optional<Profile> {
      auto it = profiles.find(id.str());
      if (it == profiles.end()) return std::nullopt;
      return it->second;
    };
  }
};

TEST(Inf, FormulaValues) {
  MatchConfig cfg;
  EXPECT_TRUE(inf(600, cfg) == 0.5);
  EXPECT_NEAR(double(inf(0, cfg)), 1.0, 1e-12);
  EXPECT_TRUE(inf(0, cfg) < 1);
  EXPECT_DOUBLE_EQ(double(inf(700, cfg)), 1.0 / (1.0 + std::exp(10.0)));
  EXPECT_NEAR(double(inf(700, cfg)), 4.54e-5, 1e-7);
  for (std::size_t m = 0; m < 1200; ++m) {
    EXPECT_EQ(double(inf(m, cfg)), double(testing::sigmoid_precise(double(m)))) << m;
    EXPECT_TRUE(inf(m, cfg) > inf(m + 1, cfg)) << m;
    EXPECT_TRUE(inf(m, cfg) > 0 && inf(m, cfg) < 1) << m;
  }
}

TEST(WordLevel, Kinds) {
  MatchConfig cfg;
  EXPECT_EQ(word_level("john", "john", cfg, 0.7), 1.0);
  EXPECT_EQ(word_level("john", "jon", cfg, 0.7), 0.9);
  EXPECT_DOUBLE_EQ(word_level("peter", "pete", cfg, 0.7), 0.8);
  EXPECT_EQ(word_level("j", "john", cfg, 0.7), 0.6);
  EXPECT_EQ(word_level("2000", "2001", cfg, 0.7), 0.0);
  EXPECT_EQ(word_level("brown", "green", cfg, 0.7), 0.0);
}

TEST(MatchLevel, PeterPete) {
  MatchConfig cfg;
  std::vector<ValueBag> a{{{"peter"}, {}}};
  std::vector<ValueBag> b{{{"pete"}, {}}};
  auto r = match_level("name", a, b, cfg);
  EXPECT_DOUBLE_EQ(r.score, 0.8);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].w1, "peter");
  EXPECT_DOUBLE_EQ(r.pairs[0].level, 0.8);
  EXPECT_DOUBLE_EQ(testing::dice_oracle("peter", "pete", 2), 6.0 / 7.0);
}

TEST(MatchLevel, AliasesAndEmpty) {
  MatchConfig cfg;
  std::vector<ValueBag> a{{analyzer().words("Richard"), {}}};
  std::vector<ValueBag> b{{analyzer().words("Dick"), {}}};
  EXPECT_GE(match_level("name", a, b, cfg).score, 0.9);
  EXPECT_EQ(match_level("name", a, {}, cfg).score, 0.0);
  EXPECT_TRUE(match_level("name", {}, b, cfg).pairs.empty());
}

TEST(MatchLevel, ProvenanceDamping) {
  MatchConfig cfg;
  std::vector<ValueBag> a{{{"john"}, {{"until", "1991"}}}};
  std::vector<ValueBag> b{{{"john"}, {{"since", "2005"}}}};
  EXPECT_DOUBLE_EQ(match_level("name", a, b, cfg).score, 0.8);
  std::vector<ValueBag> c{{{"john"}, {}}};
  EXPECT_DOUBLE_EQ(match_level("name", a, c, cfg).score, 1.0);
}

TEST(ProvenanceFactor, Examples) {
  MatchConfig cfg;
  EXPECT_EQ(provenance_factor({}, Provenance{{"from", "1989"}}, cfg), 1.0);
  EXPECT_EQ(provenance_factor(Provenance{{"until", "1991"}}, Provenance{{"since", "2005"}}, cfg), 0.8);
  EXPECT_EQ(provenance_factor(Provenance{{"from", "1989"}, {"to", "1995"}},
                              Provenance{{"from", "1990"}, {"to", "2000"}}, cfg),
            1.0);
  EXPECT_EQ(provenance_factor(Provenance{{"source", "a"}}, Provenance{{"until", "1900"}}, cfg), 1.0);
}

TEST(ProvenanceFactor, AgreesWithIntervalOracle) {
  MatchConfig cfg;
  testing::Gen gen(31);
  for (int i = 0; i < 3000; ++i) {
    auto a = gen.prov();
    auto b = gen.prov();
    EXPECT_EQ(provenance_factor(a, b, cfg), testing::oracle_damping(a, b, cfg))
        << prov_to_json(a).dump() << " " << prov_to_json(b).dump();
  }
}

TEST(InfoLevel, MaxOfPairAverages) {
  MatchConfig cfg;
  WordStats stats;
  for (int i = 0; i < 640; ++i) stats.add(std::vector<std::string>{"smith"});
  for (int i = 0; i < 590; ++i) stats.add(std::vector<std::string>{"smiths"});
  for (int i = 0; i < 620; ++i) stats.add(std::vector<std::string>{"john"});
  for (int i = 0; i < 560; ++i) stats.add(std::vector<std::string>{"jones"});
  std::vector<MatchedPair> pairs{{"john", "jones", 0.9}, {"smith", "smiths", 0.8}};
  auto a = (testing::sigmoid_precise(620) + testing::sigmoid_precise(560)) / 2;
  auto b = (testing::sigmoid_precise(640) + testing::sigmoid_precise(590)) / 2;
  EXPECT_EQ(info_level(pairs, stats, cfg), double(std::max(a, b)));
  EXPECT_EQ(info_level({}, stats, cfg), 0.0);
}

TEST(ValueWords, DatesBecomeOneToken) {
  EXPECT_EQ(value_words("1980.12.12", analyzer()), std::vector<std::string>{"19801212"});
  EXPECT_EQ(value_words("1980-12-12", analyzer()), std::vector<std::string>{"19801212"});
  EXPECT_EQ(value_words("1 Brown Blvd.", analyzer()),
            (std::vector<std::string>{"1", "brown", "blvd", "boulevard"}));
}

TEST(Simsc, Table2NamesContributeAboutOne) {
  Corpus c(testing::table2());
  MatchConfig cfg;
  Scorer s(cfg, analyzer(), c.stats, c.resolver());
  auto name = s.match("name", testing::p1(), testing::p2());
  EXPECT_EQ(name.score, 1.0);
  EXPECT_EQ(c.stats.count("john"), 2u);
  EXPECT_NEAR(name.score * info_level(name.pairs, c.stats, cfg), 1.0, 1e-12);
  auto total = s.simsc(testing::p1(), testing::p2());
  EXPECT_NEAR(total, testing::simsc_oracle(testing::p1(), testing::p2(), cfg, analyzer(), c.stats, c.profiles),
              1e-12);
  EXPECT_GT(total, 1.0);
  EXPECT_THROW(s.simsc(testing::p1(), testing::p1()), Error);
}

TEST(Simsc, SymmetricAndOracleEquivalentOnRandomCorpora) {
  MatchConfig cfg;
  testing::Gen gen(41);
  std::vector<std::string> vocab{"john", "jon", "peter", "pete", "j", "brown", "smith",
                                 "smiths", "2000", "1 brown blvd", "richard", "dick"};
  for (int round = 0; round < 40; ++round) {
    std::vector<std::string> ids{"A", "B", "C", "D", "E"};
    std::vector<Profile> ps;
    for (const auto& id : ids) ps.push_back(gen.profile(id, vocab, ids));
    Corpus c(ps);
    Scorer s(cfg, analyzer(), c.stats, c.resolver());
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        double ab = s.simsc(ps[i], ps[j]);
        EXPECT_EQ(ab, s.simsc(ps[j], ps[i]));
        EXPECT_NEAR(ab, testing::simsc_oracle(ps[i], ps[j], cfg, analyzer(), c.stats, c.profiles), 1e-9);
      }
    }
  }
}

TEST(Simsc, KeyDisjointIsZero) {
  Corpus c({});
  MatchConfig cfg;
  Scorer s(cfg, analyzer(), c.stats, c.resolver());
  auto a = make_profile(ProfileId("A"), {attr("type", "person"), attr("name", "John")}, {});
  auto b = make_profile(ProfileId("B"), {attr("type", "person"), attr("city", "John")}, {});
  EXPECT_EQ(s.simsc(a, b), 0.0);
  EXPECT_TRUE(shared_keys(a, b).empty());
}

TEST(Simsc, SelfCopyPositiveAndRareWordsDominate) {
  MatchConfig cfg;
  auto a = make_profile(ProfileId("A"), {attr("name", "zed")}, {});
  auto b = make_profile(ProfileId("B"), {attr("name", "zed")}, {});
  WordStats common;
  WordStats rare;
  for (int i = 0; i < 700; ++i) common.add(std::vector<std::string>{"zed"});
  rare.add(std::vector<std::string>{"zed"});
  Scorer sc(cfg, analyzer(), common, [](const ProfileId&) { return std::nullopt; });
  Scorer sr(cfg, analyzer(), rare, [](const ProfileId&) { return std::nullopt; });
  EXPECT_GT(sc.simsc(a, b), 0.0);
  EXPECT_GT(sr.simsc(a, b), sc.simsc(a, b));
}

TEST(Simsc, RelationsCompareTargetWords) {
  Corpus c(testing::table2());
  MatchConfig cfg;
  Scorer s(cfg, analyzer(), c.stats, c.resolver());
  auto bags = s.bags(testing::p2(), "lives_at");
  ASSERT_EQ(bags.size(), 2u);
  EXPECT_EQ(bags[0].words, (std::vector<std::string>{"1", "brown", "blvd", "boulevard", "2000"}));
  auto dangling = make_profile(ProfileId("X"), {}, {rel("friend", "Nobody7")});
  EXPECT_EQ(s.bags(dangling, "friend")[0].words, std::vector<std::string>{"nobody7"});
}

TEST(Rejsc, KeyAttributes) {
  Corpus c({});
  MatchConfig cfg;
  Scorer s(cfg, analyzer(), c.stats, c.resolver());
  auto person = [](std::string id, std::string bdate) {
    return make_profile(ProfileId(std::move(id)),
                        {attr("type", "person"), attr("name", "John"), attr("bdate", std::move(bdate))}, {});
  };
  EXPECT_EQ(s.rejsc(person("A", "1980-12-12"), person("B", "1990-01-01")), 1u);
  EXPECT_EQ(s.rejsc(person("A", "1980-12-12"), person("B", "1980.12.12")), 0u);
  EXPECT_EQ(s.rejsc(testing::p3(), testing::p4()), 1u);
  EXPECT_EQ(s.rejsc(testing::p1(), testing::p2()), 0u);
  EXPECT_EQ(s.rejsc(testing::p2(), testing::p3()), 0u);
}

TEST(Rejsc, BoundedByKeyAttributeCount) {
  MatchConfig cfg;
  cfg.key_attributes["person"] = {"bdate", "sex"};
  Corpus c({});
  Scorer s(cfg, analyzer(), c.stats, c.resolver());
  testing::Gen gen(51);
  for (int i = 0; i < 500; ++i) {
    auto a = gen.profile("A", {"m", "f", "1980", "1990"}, {});
    auto b = gen.profile("B", {"m", "f", "1980", "1990"}, {});
    auto r = s.rejsc(a, b);
    EXPECT_EQ(r, s.rejsc(b, a));
    EXPECT_LE(r, 2u);
    if (a.label() != b.label()) {
      EXPECT_EQ(r, 0u);
    }
  }
}

TEST(MatchConfig, ParseAndValidate) {
  auto cfg = MatchConfig::parse(
      "# tuned\nalpha = 0.2\nk = 20\nkey_attributes.person = bdate, sex\nthreshold.post = 1\n");
  EXPECT_EQ(cfg.alpha, 0.2);
  EXPECT_EQ(cfg.candidates_k, 20u);
  EXPECT_EQ(cfg.key_attributes.at("person"), (std::vector<std::string>{"bdate", "sex"}));
  EXPECT_EQ(cfg.threshold_for("post"), 1.0);
  EXPECT_EQ(cfg.threshold_for("name"), 0.7);
  auto code = [](std::string_view text) {
    try {
      MatchConfig::parse(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Conflict;
  };
  EXPECT_EQ(code("gamma = 1\n"), ErrorCode::ConfigError);
  EXPECT_EQ(code("alpha = 0\n"), ErrorCode::ConfigError);
  EXPECT_EQ(code("phonetic_weight = 1.5\n"), ErrorCode::ConfigError);
  EXPECT_EQ(code("alpha\n"), ErrorCode::ConfigError);
  try {
    MatchConfig::load("/nonexistent/provlink.conf");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileNotFound);
  }
}

}  // namespace
}  // namespace provlink
