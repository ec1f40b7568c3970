#include "provlink/service.hpp"

#include <charconv>

#include <httplib.h>

#include "provlink/error.hpp"
#include "provlink/json_codec.hpp"

namespace provlink {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::Conflict:
      return 409;
    case ErrorCode::StorageFailure:
    case ErrorCode::FileNotFound:
    case ErrorCode::ConfigError:
      return 500;
    default:
      return 400;
  }
}

ojson api_error(int status, std::string_view code, std::string_view message) {
  return {{"status", status}, {"code", code}, {"message", message}};
}

NestedQuery nested_query_from_json(const json& j) {
  try {
    NestedQuery q;
    for (const auto& c : j.at("clauses")) {
      QueryClause clause;
      clause.key = c.at("key").get<std::string>();
      clause.value = c.value("value", std::string());
      if (c.contains("target")) {
        for (const auto& [k, v] : c.at("target").items()) {
          clause.target.emplace_back(k, v.get<std::string>());
        }
      }
      if (c.contains("prov")) clause.prov = prov_from_json(c.at("prov"));
      q.clauses.push_back(std::move(clause));
    }
    return q;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::MalformedQuery, std::string("bad structured query: ") + ex.what());
  } catch (const Error& ex) {
    throw Error(ErrorCode::MalformedQuery, ex.what());
  }
}

LinkJob::~LinkJob() { wait(); }

bool LinkJob::start(std::optional<std::size_t> k) {
  std::lock_guard lock(mu_);
  if (state_ == "running") return false;
  if (worker_.joinable()) worker_.join();
  state_ = "running";
  error_.clear();
  worker_ = std::thread([this, k] {
    try {
      auto stats = k ? engine_.link_all(*k) : engine_.link_all();
      std::lock_guard l(mu_);
      last_ = stats;
      state_ = "done";
    } catch (const std::exception& ex) {
      std::lock_guard l(mu_);
      error_ = ex.what();
      state_ = "failed";
    }
  });
  return true;
}

void LinkJob::wait() {
  std::thread t;
  {
    std::lock_guard lock(mu_);
    t = std::move(worker_);
  }
  if (t.joinable()) t.join();
}

ojson LinkJob::status() const {
  std::lock_guard lock(mu_);
  ojson out{{"state", state_}};
  if (state_ == "done") {
    out["stats"] = {{"profiles_processed", last_.profiles_processed},
                    {"pairs_scored", last_.pairs_scored},
                    {"edges_upserted", last_.edges_upserted},
                    {"edges_pruned", last_.edges_pruned},
                    {"elapsed_seconds", last_.elapsed_seconds}};
  }
  if (state_ == "failed") out["error"] = error_;
  return out;
}

namespace {

void send(httplib::Response& res, int status, const ojson& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  send(res, status, api_error(status, code, message));
}

// Runs fn, mapping library errors onto API errors.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& ex) {
      fail(res, http_status(ex.code()), error_code_name(ex.code()), ex.what());
    } catch (const json::exception& ex) {
      fail(res, 400, "SchemaError", ex.what());
    } catch (const std::exception& ex) {
      fail(res, 500, "Internal", ex.what());
    }
  };
}

std::size_t count_param(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  auto text = req.get_param_value(name);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v == 0) {
    throw Error(ErrorCode::SchemaError, std::string(name) + " must be a positive integer");
  }
  return v;
}

double real_param(const httplib::Request& req, const char* name, double fallback) {
  if (!req.has_param(name)) return fallback;
  auto text = req.get_param_value(name);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::SchemaError, std::string(name) + " must be a number");
  }
  return v;
}

ojson edges_json(const std::vector<SimilarityEdge>& edges) {
  ojson out = ojson::array();
  for (const auto& e : edges) out.push_back(edge_to_json(e));
  return out;
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::SchemaError, std::string("request body is not JSON: ") + ex.what());
  }
}

}  // namespace

Service::Service(Engine& engine, ServiceOptions opts)
    : engine_(engine), opts_(std::move(opts)), job_(engine), server_(std::make_unique<httplib::Server>()) {
  routes();
}

Service::~Service() {
  stop();
  job_.wait();
}

void Service::routes() {
  auto& s = *server_;

  s.Get("/profiles/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send(res, 200, profile_to_json(engine_.get_profile(ProfileId(req.path_params.at("id")))));
  }));

  s.Post("/profiles", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto p = profile_from_json(parse_body(req));
    auto edges = engine_.put_and_link(p);
    send(res, 201, {{"profile", profile_to_json(p)}, {"edges", edges_json(edges)}});
  }));

  s.Get("/search", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto q = req.get_param_value("q");
    auto k = count_param(req, "k", 10);
    ojson hits = ojson::array();
    for (const auto& h : engine_.search(q, k)) hits.push_back({{"id", h.id.str()}, {"score", h.score}});
    send(res, 200, {{"query", q}, {"hits", hits}});
  }));

  s.Post("/search/structured", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto q = nested_query_from_json(parse_body(req));
    ojson ids = ojson::array();
    for (const auto& id : engine_.structured_search(q)) ids.push_back(id.str());
    send(res, 200, {{"ids", ids}});
  }));

  s.Get("/profiles/:id/similar", guarded([this](const httplib::Request& req, httplib::Response& res) {
    ProfileId id(req.path_params.at("id"));
    if (!engine_.find_profile(id)) throw Error(ErrorCode::NotFound, "profile not found: " + id.str());
    send(res, 200, {{"id", id.str()}, {"edges", edges_json(engine_.similar(id))}});
  }));

  s.Get("/matches/pending", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto min_score = real_param(req, "min_score", 0.0);
    auto limit = count_param(req, "limit", 50);
    send(res, 200, {{"matches", edges_json(engine_.pending(min_score, limit))}});
  }));

  s.Post("/matches/:id1/:id2/confirm",
         guarded([this](const httplib::Request& req, httplib::Response& res) {
           auto body = parse_body(req);
           auto verdict = parse_verdict(body.value("verdict", std::string()));
           if (!verdict) throw Error(ErrorCode::SchemaError, "verdict must be match or nonmatch");
           ProfileId a(req.path_params.at("id1"));
           ProfileId b(req.path_params.at("id2"));
           try {
             send(res, 200, edge_to_json(engine_.confirm(a, b, *verdict)));
           } catch (const Error& ex) {
             if (ex.code() != ErrorCode::NotFound) throw;
             fail(res, 409, error_code_name(ErrorCode::NotFound), ex.what());
           }
         }));

  s.Post("/link/run", guarded([this](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::size_t> k;
    if (!req.body.empty()) {
      auto body = parse_body(req);
      if (body.contains("k")) k = body.at("k").get<std::size_t>();
    }
    if (!job_.start(k)) {
      fail(res, 409, error_code_name(ErrorCode::Conflict), "a link run is already in progress");
      return;
    }
    send(res, 202, job_.status());
  }));

  s.Get("/link/status", guarded([this](const httplib::Request&, httplib::Response& res) {
    send(res, 200, job_.status());
  }));

  if (opts_.ui_dir) s.set_mount_point("/ui", opts_.ui_dir->string());

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      fail(res, res.status, res.status == 404 ? "NotFound" : "HttpError", "no such route");
    }
  });
}

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }

int Service::start_background(const std::string& host) {
  int port = server_->bind_to_any_port(host);
  if (port < 0) throw Error(ErrorCode::StorageFailure, "cannot bind " + host);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void Service::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace provlink
