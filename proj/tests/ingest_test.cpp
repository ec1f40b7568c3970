#include <gtest/gtest.h>

#include <fstream>

#include "provlink/error.hpp"
#include "provlink/ingest.hpp"
#include "provlink/linker.hpp"
#include "support.hpp"

namespace provlink {
namespace {

std::filesystem::path write(const testing::TempDir& dir, const std::string& name, const std::string& text) {
  auto path = dir.path() / name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

TEST(IngestJsonl, Table2Fixture) {
  Engine e;
  auto report = ingest_jsonl(e, testing::fixture("table2.jsonl"));
  EXPECT_EQ(report.accepted, 4u);
  EXPECT_TRUE(report.errors.empty());
  for (const auto& p : testing::table2()) EXPECT_EQ(e.get_profile(p.id), p);
}

TEST(IngestJsonl, CollectsErrorsAndContinues) {
  testing::TempDir dir("jsonl");
  auto path = write(dir, "in.jsonl",
                    "{\"id\":\"A\",\"attributes\":[{\"key\":\"name\",\"value\":\"Ann\"}],\"relations\":[]}\n"
                    "not json\n"
                    "\n"
                    "{\"id\":\"B-1\",\"attributes\":[],\"relations\":[]}\n"
                    "{\"id\":\"C\",\"attributes\":[{\"key\":\"name\",\"value\":\"\"}],\"relations\":[]}\n"
                    "{\"id\":\"D\",\"attributes\":[],\"relations\":[]}\n");
  Engine e;
  auto report = ingest_jsonl(e, path);
  EXPECT_EQ(report.accepted, 2u);
  ASSERT_EQ(report.errors.size(), 3u);
  EXPECT_EQ(report.errors[0].line, 2u);
  EXPECT_EQ(report.errors[0].code, ErrorCode::SchemaError);
  EXPECT_EQ(report.errors[1].line, 4u);
  EXPECT_EQ(report.errors[1].code, ErrorCode::InvalidId);
  EXPECT_EQ(report.errors[2].code, ErrorCode::EmptyValue);
  EXPECT_TRUE(e.find_profile(ProfileId("D")));
  try {
    ingest_jsonl(e, dir.path() / "missing.jsonl");
    FAIL();
  } catch (const Error& ex) {
    EXPECT_EQ(ex.code(), ErrorCode::FileNotFound);
  }
}

TEST(ParseCsv, Rfc4180) {
  auto rows = parse_csv("a,b,c\r\n\"x, y\",\"say \"\"hi\"\"\",\"two\nlines\"\n1,,3");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"x, y", "say \"hi\"", "two\nlines"}));
  EXPECT_EQ(rows[2], (std::vector<std::string>{"1", "", "3"}));
}

CsvMapping people_mapping() {
  return CsvMapping::from_json(nlohmann::json::parse(R"({
    "id_column": "id", "type": "person",
    "attributes": {"full_name": "name", "born": "bdate"},
    "relations": {"home": "lives_at"},
    "provenance": {"name_until": {"column": "full_name", "pkey": "until"},
                   "src": {"column": "home", "pkey": "source"}}})"));
}

TEST(IngestCsv, MappedColumns) {
  testing::TempDir dir("csv");
  auto path = write(dir, "people.csv",
                    "id,full_name,born,home,name_until,src,ignored\n"
                    "P7,\"Smith, John\",1980-12-12,L1,1991,census,x\n"
                    "P8,Ann,,,,,\n"
                    "bad-id,Bob,,,,,\n");
  Engine e;
  auto report = ingest_csv(e, path, people_mapping());
  EXPECT_EQ(report.accepted, 2u);
  ASSERT_EQ(report.errors.size(), 1u);
  EXPECT_EQ(report.errors[0].line, 4u);
  auto p7 = e.get_profile(ProfileId("P7"));
  auto want = make_profile(
      ProfileId("P7"),
      {testing::attr("type", "person"), testing::attr("name", "Smith, John", {{"until", "1991"}}),
       testing::attr("bdate", "1980-12-12")},
      {testing::rel("lives_at", "L1", {{"source", "census"}})});
  EXPECT_EQ(p7, want);
  EXPECT_EQ(e.get_profile(ProfileId("P8")).attributes.size(), 2u);
}

TEST(IngestCsv, MappingErrors) {
  testing::TempDir dir("csvmap");
  auto path = write(dir, "people.csv", "id,name\nP1,Ann\n");
  Engine e;
  try {
    ingest_csv(e, path, people_mapping());
    FAIL();
  } catch (const Error& ex) {
    EXPECT_EQ(ex.code(), ErrorCode::MappingError);
  }
  EXPECT_THROW(CsvMapping::from_json(nlohmann::json::parse(R"({"attributes": 3})")), Error);
  auto mapping_path = write(dir, "map.json", R"({"id_column":"id","attributes":{"name":"name"}})");
  auto m = CsvMapping::load(mapping_path);
  EXPECT_EQ(ingest_csv(e, path, m).accepted, 1u);
  EXPECT_EQ(e.get_profile(ProfileId("P1")).attributes[0].value, "Ann");
}

TEST(IngestTriples, MentionsBecomeProfiles) {
  testing::TempDir dir("triples");
  auto path = write(dir, "t.tsv",
                    "John Smith\tworks_for\tAcme Corp\tsource=news;from=2001\n"
                    "john  smith\tlives_in\tSpringfield\n"
                    "broken line\n"
                    "Ann\tknows\tJohn Smith\tsource\n");
  Engine e;
  auto report = ingest_triples(e, path);
  EXPECT_EQ(report.accepted, 2u);
  ASSERT_EQ(report.errors.size(), 2u);
  EXPECT_EQ(report.errors[0].line, 3u);
  EXPECT_EQ(report.errors[1].line, 4u);
  auto john = e.get_profile(mention_id("JOHN SMITH"));
  ASSERT_EQ(john.relations.size(), 2u);
  EXPECT_EQ(john.relations[0].target, mention_id("acme corp"));
  EXPECT_EQ(john.relations[0].prov, (Provenance{{"source", "news"}, {"from", "2001"}}));
  EXPECT_EQ(john.attributes[0].value, "John Smith");
  EXPECT_FALSE(e.find_profile(mention_id("ann")));
  EXPECT_EQ(e.profile_count(), 3u);

  auto more = write(dir, "more.tsv", "John Smith\tknows\tAnn\n");
  EXPECT_EQ(ingest_triples(e, more).accepted, 1u);
  EXPECT_EQ(e.get_profile(mention_id("john smith")).relations.size(), 3u);
}

TEST(MentionId, Stable) {
  EXPECT_EQ(mention_id("John  Smith"), mention_id(" john smith "));
  EXPECT_NE(mention_id("john smith"), mention_id("john smyth"));
  EXPECT_EQ(mention_id("a").str().size(), 18u);
}

}  // namespace
}  // namespace provlink
