#pragma once

// HTTP API over an Engine. JSON in, JSON out; failures carry
// {"status":..,"code":..,"message":..}.
//
//   GET  /profiles/{id}                 profile in the JSONL schema
//   POST /profiles                      store, index and link one profile
//   GET  /search?q=&k=                  keyword search
//   POST /search/structured             nested query
//   GET  /profiles/{id}/similar         similarity edges of a profile
//   GET  /matches/pending?min_score=&limit=
//   POST /matches/{id1}/{id2}/confirm   {"verdict":"match"|"nonmatch"}
//   POST /link/run                      background link run; 409 while one runs
//   GET  /link/status

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "provlink/error.hpp"
#include "provlink/linker.hpp"

namespace httplib {
class Server;
}

namespace provlink {

inline constexpr int kDefaultPort = 8087;

int http_status(ErrorCode code);
nlohmann::ordered_json api_error(int status, std::string_view code, std::string_view message);

// JSON body of POST /search/structured:
//   {"clauses":[{"key":"lives_at","value":"","target":{"numb":"1","street":"brown"},
//                "prov":[{"pkey":"until","pvalue":"2000"}]}]}
// Throws MalformedQuery.
NestedQuery nested_query_from_json(const nlohmann::json& j);

class LinkJob {
 public:
  explicit LinkJob(Engine& engine) : engine_(engine) {}
  ~LinkJob();

  // False when a run is already in progress.
  bool start(std::optional<std::size_t> k);
  void wait();
  nlohmann::ordered_json status() const;

 private:
  Engine& engine_;
  mutable std::mutex mu_;
  std::thread worker_;
  std::string state_ = "idle";  // idle, running, done, failed
  LinkRunStats last_;
  std::string error_;
};

struct ServiceOptions {
  std::optional<std::filesystem::path> ui_dir;  // served under /ui when set
};

class Service {
 public:
  explicit Service(Engine& engine, ServiceOptions opts = {});
  ~Service();

  // Blocks until stop().
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and serves on a background thread.
  int start_background(const std::string& host = "127.0.0.1");
  void stop();

  LinkJob& link_job() { return job_; }

 private:
  void routes();

  Engine& engine_;
  ServiceOptions opts_;
  LinkJob job_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace provlink
