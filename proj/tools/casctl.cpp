#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "cas/cdl/parser.hpp"
#include "cas/error.hpp"
#include "cas/runtime/engine.hpp"
#include "cas/runtime/http.hpp"
#include "cas/runtime/scenario.hpp"

namespace fs = std::filesystem;
using namespace cas;
using namespace cas::runtime;

namespace {

struct Common {
  std::string fixtures;
  std::vector<std::string> load;
  std::string events;
  std::string sources;
  bool strict_sources = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, fmt::format("cannot read '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InvalidArgument, fmt::format("cannot write '{}'", path));
  out << text;
}

EngineOptions options_for(const Common& c) {
  EngineOptions o;
  std::string sources = c.sources;
  if (sources.empty() && fs::exists(fs::path(c.fixtures) / "sources.json")) {
    sources = (fs::path(c.fixtures) / "sources.json").string();
  }
  if (!sources.empty()) o.ingest = IngestConfig::from_file(sources);
  if (c.strict_sources) o.ingest.strict = true;
  return o;
}

void print_warnings(const std::vector<cdl::Diagnostic>& diags, const std::string& name) {
  for (const auto& d : diags) std::cerr << cdl::format_diagnostic(d, name) << "\n";
}

// Engine with the requested documents (default: the e-health fixture) and
// events applied.
std::unique_ptr<Engine> make_engine(const Common& c) {
  auto engine = std::make_unique<Engine>(options_for(c));
  std::vector<std::string> files = c.load;
  if (files.empty()) files.push_back((fs::path(c.fixtures) / "ehealth.cdl").string());
  for (const auto& f : files) print_warnings(engine->load_file(f), f);
  if (!c.events.empty()) {
    std::size_t n = 0;
    for (const auto& e : parse_events(read_file(c.events))) {
      ++n;
      try {
        engine->ingest(e);
      } catch (const Error& err) {
        throw Error(err.code(), fmt::format("event {}: {}", n, err.detail()));
      }
    }
  }
  return engine;
}

Instant at_or_latest(const Engine& e, const std::optional<Instant>& at) {
  return at ? *at : e.latest_time();
}

std::map<std::string, std::string> parse_binds(const std::vector<std::string>& binds) {
  std::map<std::string, std::string> out;
  for (const auto& b : binds) {
    auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == b.size()) {
      throw Error(Errc::InvalidArgument, fmt::format("expected var=individual, got '{}'", b));
    }
    out[b.substr(0, eq)] = b.substr(eq + 1);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"casctl: context-aware service engine"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  const char* env = std::getenv("CAS_FIXTURES");
  common.fixtures = env ? env : CAS_FIXTURE_DIR;
  app.add_option("--fixtures", common.fixtures, "Fixture directory (env CAS_FIXTURES)");
  app.add_option("--load", common.load, "CDL documents to load (default: ehealth.cdl)");
  app.add_option("--events", common.events, "File of `at=T assert ...` event lines");
  app.add_option("--sources", common.sources, "Ingest config (default: fixtures/sources.json)");
  app.add_flag("--strict-sources", common.strict_sources, "Reject events from unmapped sources");

  std::optional<Instant> at;
  auto add_at = [&](CLI::App* cmd) { cmd->add_option("--at", at, "Logical time (default: latest event)"); };

  auto* load = app.add_subcommand("load", "Parse and validate documents, print warnings");

  auto* assert_cmd = app.add_subcommand("assert", "Ingest one event and print the stored assertion");
  std::string event_line;
  assert_cmd->add_option("event", event_line, "e.g. 'at=100 assert user1 locatedAt (34.0, -6.8) source gps'")
      ->required();

  auto* situations = app.add_subcommand("situations", "Active situations at a time");
  add_at(situations);

  auto* snapshot = app.add_subcommand("snapshot", "Canonical snapshot at a time");
  add_at(snapshot);

  auto* consistency = app.add_subcommand("consistency", "Consistency violations at a time");
  add_at(consistency);

  auto* match = app.add_subcommand("match", "Ranked services for a goal");
  std::string goal;
  match->add_option("goal", goal)->required();

  auto* invoke = app.add_subcommand("invoke", "Run a goal through the adaptation pipeline");
  std::string principal = "user1";
  std::string payload_text;
  bool show_trace = false;
  invoke->add_option("goal", goal)->required();
  invoke->add_option("--principal", principal, "Requesting individual");
  invoke->add_option("--payload", payload_text, "Payload lines, e.g. '{q=\"x\"}'");
  invoke->add_flag("--trace", show_trace, "Also print the pipeline trace");
  add_at(invoke);

  auto* explain = app.add_subcommand("explain", "Derivation of an active situation");
  std::string situation;
  std::vector<std::string> binds;
  explain->add_option("situation", situation)->required();
  explain->add_option("--bind", binds, "var=individual");
  add_at(explain);

  auto* services = app.add_subcommand("services", "Registry as canonical CDL");

  auto* replay_cmd = app.add_subcommand("replay", "Replay a scenario and print its transcript");
  std::string scenario_path, golden_out, expect_path;
  bool via_http = false;
  replay_cmd->add_option("scenario", scenario_path)->required();
  replay_cmd->add_option("--golden", golden_out, "Write the transcript to this file");
  replay_cmd->add_option("--expect", expect_path, "Compare against this transcript");
  replay_cmd->add_flag("--http", via_http, "Drive an in-process HTTP server instead");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host);
  serve->add_option("--port", port, "0 picks a free port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (load->parsed()) {
      auto engine = make_engine(common);
      std::cout << "ok\n";
    } else if (assert_cmd->parsed()) {
      auto engine = make_engine(common);
      auto events = parse_events(event_line);
      if (events.size() != 1) throw Error(Errc::InvalidArgument, "expected exactly one event");
      kb::FactId id = engine->ingest(events.front());
      std::cout << kb::canonical_line(engine->store().facts().at(id)) << "\n";
    } else if (situations->parsed()) {
      auto engine = make_engine(common);
      std::cout << render_situations(engine->situations_at(at_or_latest(*engine, at)));
    } else if (snapshot->parsed()) {
      auto engine = make_engine(common);
      std::cout << engine->snapshot_at(at_or_latest(*engine, at)).serialize();
    } else if (consistency->parsed()) {
      auto engine = make_engine(common);
      std::cout << render_consistency(engine->consistency_at(at_or_latest(*engine, at)));
    } else if (match->parsed()) {
      auto engine = make_engine(common);
      auto ranked = engine->match(goal);
      if (ranked.empty()) std::cout << "(none)\n";
      for (std::size_t i = 0; i < ranked.size(); ++i) {
        std::cout << fmt::format("{}. {}\n", i + 1, registry::format_match(ranked[i]));
      }
    } else if (invoke->parsed()) {
      auto engine = make_engine(common);
      auto outcome = engine->invoke(goal, principal, at_or_latest(*engine, at),
                                    adaptation::parse_payload(payload_text));
      std::cout << adaptation::format_response(outcome.response);
      if (show_trace) std::cout << *engine->trace(outcome.response.trace_id);
    } else if (explain->parsed()) {
      auto engine = make_engine(common);
      std::cout << render_explain(
          engine->explain(situation, parse_binds(binds), at_or_latest(*engine, at)));
    } else if (services->parsed()) {
      auto engine = make_engine(common);
      std::cout << engine->services_cdl();
    } else if (replay_cmd->parsed()) {
      Scenario s = load_scenario(scenario_path);
      EngineOptions base;
      if (common.strict_sources) base.ingest.strict = true;
      std::string transcript;
      if (via_http) {
        EngineOptions opts = scenario_options(s, base);
        if (common.strict_sources) opts.ingest.strict = true;
        Engine engine(opts);
        HttpServer server(engine);
        int bound = server.bind("127.0.0.1", 0);
        server.start();
        transcript = replay_http(s, "127.0.0.1", bound);
      } else {
        EngineOptions opts = scenario_options(s, base);
        if (common.strict_sources) opts.ingest.strict = true;
        transcript = replay(s, opts);
      }
      std::cout << transcript;
      if (!golden_out.empty()) write_file(golden_out, transcript);
      if (!expect_path.empty() && read_file(expect_path) != transcript) {
        std::cerr << "transcript differs from " << expect_path << "\n";
        return 1;
      }
    } else if (serve->parsed()) {
      auto engine = make_engine(common);
      HttpServer server(*engine);
      int bound = server.bind(host, port);
      std::cerr << fmt::format("listening on {}:{}\n", host, bound);
      server.listen();
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
