#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "provlink/json_codec.hpp"
#include "provlink/service.hpp"
#include "support.hpp"

namespace provlink {
namespace {

using nlohmann::json;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (const auto& p : testing::table2()) engine_.put_profile(p);
    service_ = std::make_unique<Service>(engine_);
    port_ = service_->start_background();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override { service_->stop(); }

  json get(const std::string& path, int want) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res) << path;
    if (!res) return {};
    EXPECT_EQ(res->status, want) << path << " " << res->body;
    EXPECT_EQ(res->get_header_value("Content-Type"), "application/json");
    return json::parse(res->body);
  }
  json post(const std::string& path, const std::string& body, int want) {
    auto res = client_->Post(path, body, "application/json");
    EXPECT_TRUE(res) << path;
    if (!res) return {};
    EXPECT_EQ(res->status, want) << path << " " << res->body;
    return json::parse(res->body);
  }
  json run_link() {
    post("/link/run", "", 202);
    for (int i = 0; i < 500; ++i) {
      auto s = get("/link/status", 200);
      if (s["state"] != "running") return s;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ADD_FAILURE() << "link run did not finish";
    return {};
  }

  Engine engine_;
  std::unique_ptr<Service> service_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServiceTest, GetProfile) {
  auto body = get("/profiles/P1", 200);
  EXPECT_EQ(profile_from_json(body), testing::p1());
  auto missing = get("/profiles/NOPE", 404);
  EXPECT_EQ(missing["code"], "NotFound");
  EXPECT_EQ(missing["status"], 404);
  EXPECT_EQ(get("/profiles/a-b", 400)["code"], "InvalidId");
  EXPECT_EQ(get("/no/such/route", 404)["code"], "NotFound");
}

TEST_F(ServiceTest, Search) {
  auto body = get("/search?q=jon&k=2", 200);
  EXPECT_EQ(body["query"], "jon");
  ASSERT_EQ(body["hits"].size(), 2u);
  EXPECT_EQ(body["hits"][0]["id"], "L1");
  EXPECT_EQ(get("/search?q=jon&k=zero", 400)["code"], "SchemaError");
  EXPECT_EQ(get("/search?q=nothingmatches", 200)["hits"].size(), 0u);
}

TEST_F(ServiceTest, StructuredSearch) {
  auto body = post("/search/structured",
                   R"({"clauses":[{"key":"name","value":"peter","prov":[{"pkey":"until","pvalue":"1991"}]}]})",
                   200);
  EXPECT_EQ(body["ids"], json::array({"P1"}));
  body = post("/search/structured",
              R"({"clauses":[{"key":"lives_at","target":{"post":"5000"}}]})", 200);
  EXPECT_EQ(body["ids"], json::array({"P2"}));
  EXPECT_EQ(post("/search/structured", R"({"clauses":[]})", 400)["code"], "MalformedQuery");
  EXPECT_EQ(post("/search/structured", R"({"nope":1})", 400)["code"], "MalformedQuery");
  EXPECT_EQ(post("/search/structured", "{", 400)["code"], "SchemaError");
}

TEST_F(ServiceTest, ReviewLoop) {
  auto status = run_link();
  EXPECT_EQ(status["state"], "done");
  EXPECT_EQ(status["stats"]["profiles_processed"], 4);
  auto queue = get("/matches/pending", 200)["matches"];
  ASSERT_EQ(queue.size(), 2u);
  EXPECT_EQ(queue[0]["id1"], "P1");
  EXPECT_EQ(queue[0]["id2"], "P2");
  EXPECT_EQ(queue[0]["cfm"], false);
  EXPECT_EQ(get("/matches/pending?limit=1", 200)["matches"].size(), 1u);
  EXPECT_EQ(get("/matches/pending?min_score=100", 200)["matches"].size(), 0u);

  auto edge = post("/matches/P1/P2/confirm", R"({"verdict":"match"})", 200);
  EXPECT_EQ(edge["cfm"], true);
  EXPECT_EQ(edge["decision"], "match");
  queue = get("/matches/pending", 200)["matches"];
  ASSERT_EQ(queue.size(), 1u);
  EXPECT_EQ(queue[0]["id1"], "L1");

  edge = post("/matches/L2/L1/confirm", R"({"verdict":"nonmatch"})", 200);
  EXPECT_EQ(edge["cfm"], true);
  EXPECT_EQ(get("/matches/pending", 200)["matches"].size(), 0u);

  run_link();
  auto similar = get("/profiles/P2/similar", 200);
  ASSERT_EQ(similar["edges"].size(), 1u);
  EXPECT_EQ(similar["edges"][0]["decision"], "match");
  EXPECT_EQ(similar["edges"][0]["cfm"], true);
  EXPECT_EQ(get("/profiles/NOPE/similar", 404)["code"], "NotFound");
}

TEST_F(ServiceTest, ConfirmErrors) {
  EXPECT_EQ(post("/matches/P1/L2/confirm", R"({"verdict":"match"})", 409)["code"], "NotFound");
  EXPECT_EQ(post("/matches/P1/P2/confirm", R"({"verdict":"perhaps"})", 400)["code"], "SchemaError");
  EXPECT_EQ(post("/matches/P1/P1/confirm", R"({"verdict":"match"})", 400)["code"], "SameId");
}

TEST_F(ServiceTest, PostProfileLinksIncrementally) {
  auto body = post("/profiles",
                   R"({"id":"P5","attributes":[{"key":"type","value":"person"},{"key":"name","value":"Jon"},)"
                   R"({"key":"name","value":"Peter"}],"relations":[]})",
                   201);
  EXPECT_EQ(body["profile"]["id"], "P5");
  EXPECT_FALSE(body["edges"].empty());
  for (const auto& e : body["edges"]) EXPECT_TRUE(e["id1"] == "P5" || e["id2"] == "P5");
  EXPECT_EQ(get("/profiles/P5", 200)["attributes"].size(), 3u);
  EXPECT_EQ(post("/profiles", R"({"id":"","attributes":[],"relations":[]})", 400)["code"], "InvalidId");
  EXPECT_EQ(post("/profiles", R"({"attributes":[]})", 400)["code"], "SchemaError");
}

TEST_F(ServiceTest, LinkRunRejectsOverlap) {
  EngineOptions opts;
  Engine big(opts);
  testing::Gen gen(111);
  std::vector<std::string> vocab{"ann", "bob", "cy", "dee", "eve", "fay", "gus"};
  std::vector<std::string> ids;
  for (int i = 0; i < 400; ++i) ids.push_back("B" + std::to_string(i));
  for (const auto& id : ids) big.put_profile(gen.profile(id, vocab, ids));
  LinkJob job(big);
  ASSERT_TRUE(job.start(std::nullopt));
  bool second = job.start(std::nullopt);
  auto state = job.status()["state"];
  job.wait();
  if (state == "running") {
    EXPECT_FALSE(second);
  }
  EXPECT_EQ(job.status()["state"], "done");
}

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status(ErrorCode::NotFound), 404);
  EXPECT_EQ(http_status(ErrorCode::Conflict), 409);
  EXPECT_EQ(http_status(ErrorCode::MalformedQuery), 400);
  EXPECT_EQ(http_status(ErrorCode::StorageFailure), 500);
  EXPECT_EQ(api_error(400, "SchemaError", "x").dump(), R"({"status":400,"code":"SchemaError","message":"x"})");
}

}  // namespace
}  // namespace provlink
