// provlink: command-line front end for ingestion, linking, search, review
// and the similarity-store benchmark. Exit codes: 0 ok, 1 usage, 2 runtime.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "provlink/bench.hpp"
#include "provlink/error.hpp"
#include "provlink/ingest.hpp"
#include "provlink/json_codec.hpp"
#include "provlink/linker.hpp"
#include "provlink/service.hpp"

using namespace provlink;

namespace {

struct Options {
  std::string data = std::getenv("PROVLINK_DATA") ? std::getenv("PROVLINK_DATA") : "provlink-data";
  std::string config;
  std::string layout = "kv_dual";
};

EngineOptions engine_options(const Options& o) {
  EngineOptions eo;
  eo.data_dir = o.data;
  if (!o.config.empty()) eo.cfg = MatchConfig::load(o.config);
  auto layout = parse_layout(o.layout);
  if (!layout) throw Error(ErrorCode::ConfigError, "unknown layout: " + o.layout);
  eo.layout = *layout;
  return eo;
}

void report_errors(const IngestReport& r) {
  for (const auto& e : r.errors) {
    std::cerr << "line " << e.line << ": " << error_code_name(e.code) << ": " << e.message << '\n';
  }
}

int serve(Engine& engine, const std::string& host, int port, const std::string& ui) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ServiceOptions so;
  if (!ui.empty()) so.ui_dir = ui;
  Service service(engine, so);
  std::thread server([&] {
    if (!service.listen(host, port)) {
      std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
      kill(getpid(), SIGTERM);
    }
  });
  std::cout << "listening on http://" << host << ':' << port << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  service.stop();
  server.join();
  service.link_job().wait();
  engine.checkpoint();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Provenance-aware entity linking"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opts;
  app.add_option("--data", opts.data, "Data directory (kb/, idx/, sim/)");
  app.add_option("--config", opts.config, "Match configuration file (name = value)");
  app.add_option("--layout", opts.layout, "Similarity-store layout")
      ->check(CLI::IsMember({"indexed_table", "kv_single", "kv_dual"}));

  auto* ingest = app.add_subcommand("ingest", "Load profiles from a file");
  std::string format, path, mapping;
  ingest->add_option("format", format)->required()->check(CLI::IsMember({"jsonl", "csv", "triples"}));
  ingest->add_option("path", path)->required();
  ingest->add_option("--mapping", mapping, "CSV column mapping (JSON)");

  auto* link = app.add_subcommand("link", "Link every stored profile");
  std::size_t link_k = 0;
  link->add_option("--k", link_k, "Candidates per profile")->check(CLI::PositiveNumber);

  auto* search = app.add_subcommand("search", "Keyword search");
  std::string query;
  std::size_t search_k = 10;
  search->add_option("query", query)->required();
  search->add_option("--k", search_k)->check(CLI::PositiveNumber);

  auto* get = app.add_subcommand("get", "Print a profile");
  std::string get_id;
  get->add_option("id", get_id)->required();

  auto* confirm = app.add_subcommand("confirm", "Confirm a similarity edge");
  std::string id1, id2, verdict;
  confirm->add_option("id1", id1)->required();
  confirm->add_option("id2", id2)->required();
  confirm->add_option("verdict", verdict)->required()->check(CLI::IsMember({"match", "nonmatch"}));

  auto* bench = app.add_subcommand("bench", "Benchmark similarity-store update transactions");
  BenchConfig bench_cfg;
  std::vector<std::string> layouts;
  std::string bench_out = "bench.csv", bench_plot = "bench.dat";
  bench->add_option("--layouts", layouts)->delimiter(',');
  bench->add_option("--pairs", bench_cfg.pair_counts)->delimiter(',');
  bench->add_option("--iters", bench_cfg.iterations)->check(CLI::PositiveNumber);
  bench->add_option("--warmup", bench_cfg.warmup, "Untimed iterations per size")->check(CLI::NonNegativeNumber);
  bench->add_option("--seed", bench_cfg.seed);
  bench->add_option("--out", bench_out, "CSV report");
  bench->add_option("--gnuplot", bench_plot, "Aggregate file with log2 column");
  bench->add_flag("!--no-breakdown", bench_cfg.breakdown, "Skip per-operation timing passes");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  int port = std::getenv("PORT") ? std::atoi(std::getenv("PORT")) : kDefaultPort;
  std::string host = "0.0.0.0", ui;
  serve_cmd->add_option("--port", port)->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--ui", ui, "Directory served under /ui");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*bench) {
      if (!layouts.empty()) {
        bench_cfg.layouts.clear();
        for (const auto& name : layouts) {
          auto l = parse_layout(name);
          if (!l) {
            std::cerr << "unknown layout: " << name << '\n';
            return 1;
          }
          bench_cfg.layouts.push_back(*l);
        }
      }
      auto reports = run_benchmark(bench_cfg);
      std::ofstream csv(bench_out), plot(bench_plot);
      if (!csv || !plot) throw Error(ErrorCode::StorageFailure, "cannot write benchmark output");
      write_bench_csv(csv, reports);
      write_bench_gnuplot(plot, reports);
      write_bench_gnuplot(std::cout, reports);
      std::cout << "CSV report written to " << bench_out << '\n';
      return 0;
    }

    Engine engine(engine_options(opts));
    if (*ingest) {
      IngestReport r;
      if (format == "jsonl") {
        r = ingest_jsonl(engine, path);
      } else if (format == "csv") {
        if (mapping.empty()) {
          std::cerr << "csv ingestion needs --mapping\n";
          return 1;
        }
        r = ingest_csv(engine, path, CsvMapping::load(mapping));
      } else {
        r = ingest_triples(engine, path);
      }
      report_errors(r);
      engine.checkpoint();
      std::cout << r.accepted << (format == "triples" ? " triples ingested" : " profiles ingested")
                << '\n';
    } else if (*link) {
      auto s = link_k ? engine.link_all(link_k) : engine.link_all();
      engine.checkpoint();
      std::cout << s.profiles_processed << " profiles processed, " << s.pairs_scored
                << " pairs scored, " << s.edges_upserted << " edges upserted, " << s.edges_pruned
                << " pruned\n";
    } else if (*search) {
      for (const auto& h : engine.search(query, search_k)) {
        std::cout << h.id.str() << '\t' << h.score << '\n';
      }
    } else if (*get) {
      std::cout << profile_to_json(engine.get_profile(ProfileId(get_id))).dump() << '\n';
    } else if (*confirm) {
      auto e = engine.confirm(ProfileId(id1), ProfileId(id2), *parse_verdict(verdict));
      engine.checkpoint();
      std::cout << edge_to_json(e).dump() << '\n';
    } else if (*serve_cmd) {
      return serve(engine, host, port, ui);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
