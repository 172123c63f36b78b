#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cas/adaptation/payload.hpp"
#include "cas/runtime/engine.hpp"
#include "cas/runtime/ingest.hpp"

namespace cas::runtime {

struct SituationsProbe {
  bool operator==(const SituationsProbe&) const = default;
};
struct InvokeProbe {
  std::string goal;
  std::string principal;
  adaptation::Payload payload;
  bool operator==(const InvokeProbe&) const = default;
};
struct ConsistencyProbe {
  bool operator==(const ConsistencyProbe&) const = default;
};
struct ExplainProbe {
  std::string situation;
  std::map<std::string, std::string> bindings;
  bool operator==(const ExplainProbe&) const = default;
};
using ProbeAction = std::variant<SituationsProbe, InvokeProbe, ConsistencyProbe, ExplainProbe>;

struct Probe {
  Instant at = 0;
  ProbeAction action;
  bool operator==(const Probe&) const = default;
};

using ScenarioStep = std::variant<ContextEvent, Probe>;

struct Scenario {
  std::string name;
  std::vector<std::string> preamble;  // .cdl paths as written
  std::string sources;                // ingest config path, empty for none
  std::vector<ScenarioStep> steps;    // file order, non-decreasing `at`
  std::string base_dir;               // resolves relative preamble paths
  bool operator==(const Scenario&) const = default;
};

// Line format:
//   scenario NAME
//   load FILE.cdl
//   sources FILE.json
//   at=T assert SUBJECT PROPERTY LITERAL [ttl N|inf] [source S] [quality Q]
//   at=T situations | consistency
//   at=T invoke GOAL principal IND [payload {f=v, ...}]...
//   at=T explain SITUATION var=ind ...
// `#` starts a comment. Throws ScenarioError naming the line.
Scenario parse_scenario(std::string_view text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

// Event lines only (`at=T assert ...`), as posted to /context/events.
std::vector<ContextEvent> parse_events(std::string_view text);

// Canonical event line, parseable by parse_scenario.
std::string format_event(const ContextEvent& e);
std::string format_probe_header(std::size_t index, const Probe& p);

// Probe bodies, shared with the HTTP endpoints so both transports print the
// same bytes.
std::string render_situations(const situation::Evaluation& e);
std::string render_consistency(const std::vector<kb::Violation>& v);
std::string render_explain(const situation::ActiveSituation& a);

// Engine options for a scenario: `base` with the scenario's ingest config.
EngineOptions scenario_options(const Scenario& s, EngineOptions base = {});

// Fresh engine, preamble, events in order, one block per probe. Errors abort
// with ScenarioError naming the event or probe index.
std::string replay(const Scenario& s, const EngineOptions& options = {});
// Same, against an existing engine that already has the preamble loaded.
std::string replay_on(Engine& engine, const Scenario& s);

// Resolve a preamble entry against the scenario directory.
std::string resolve_path(const Scenario& s, const std::string& file);

}  // namespace cas::runtime
