#include "cas/runtime/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "cas/cdl/parser.hpp"
#include "cas/error.hpp"

namespace cas::runtime {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits off the first whitespace-delimited word.
std::string_view next_word(std::string_view& s) {
  s = trim(s);
  std::size_t end = s.find_first_of(" \t");
  std::string_view w = s.substr(0, end);
  s = end == std::string_view::npos ? std::string_view{} : trim(s.substr(end));
  return w;
}

// A '#' outside a string literal starts a comment.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

// `{...} {...}` into separate record texts.
std::vector<std::string_view> split_records(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == ' ' || s[i] == '\t') {
      ++i;
      continue;
    }
    if (s[i] != '{') throw Error(Errc::ParseError, "payload records must be enclosed in braces");
    std::size_t start = i;
    bool in_string = false;
    for (; i < s.size(); ++i) {
      if (in_string && s[i] == '\\') {
        ++i;
      } else if (s[i] == '"') {
        in_string = !in_string;
      } else if (s[i] == '}' && !in_string) {
        break;
      }
    }
    if (i >= s.size()) throw Error(Errc::ParseError, "unterminated payload record");
    out.push_back(s.substr(start, i - start + 1));
    ++i;
  }
  return out;
}

Instant parse_at(std::string_view word) {
  if (word.rfind("at=", 0) != 0) throw Error(Errc::ParseError, "expected at=T");
  std::string_view num = word.substr(3);
  Instant t = 0;
  auto res = std::from_chars(num.data(), num.data() + num.size(), t);
  if (res.ec != std::errc() || res.ptr != num.data() + num.size() || t < 0) {
    throw Error(Errc::ParseError, fmt::format("invalid instant '{}'", num));
  }
  return t;
}

ContextEvent parse_event(Instant at, std::string_view rest) {
  cdl::AssertDecl d = cdl::parse_fact(rest);
  ContextEvent e;
  e.at = at;
  e.subject = d.subject;
  e.property = d.property;
  e.value = d.value;
  e.ttl = d.ttl;
  e.source = d.source.value_or("scenario");
  e.quality = d.quality;
  return e;
}

ProbeAction parse_probe(std::string_view verb, std::string_view rest) {
  if (verb == "situations" || verb == "consistency") {
    if (!trim(rest).empty()) throw Error(Errc::ParseError, fmt::format("'{}' takes no arguments", verb));
    if (verb == "situations") return SituationsProbe{};
    return ConsistencyProbe{};
  }
  if (verb == "invoke") {
    InvokeProbe p;
    p.goal = std::string(next_word(rest));
    if (p.goal.empty() || next_word(rest) != "principal") {
      throw Error(Errc::ParseError, "expected: invoke GOAL principal IND [payload {...}]");
    }
    p.principal = std::string(next_word(rest));
    if (p.principal.empty()) throw Error(Errc::ParseError, "missing principal");
    if (!rest.empty()) {
      if (next_word(rest) != "payload") throw Error(Errc::ParseError, "expected 'payload'");
      for (auto r : split_records(rest)) p.payload.records.push_back(cdl::parse_record(r));
    }
    return p;
  }
  if (verb == "explain") {
    ExplainProbe p;
    p.situation = std::string(next_word(rest));
    if (p.situation.empty()) throw Error(Errc::ParseError, "missing situation name");
    while (!rest.empty()) {
      std::string_view kv = next_word(rest);
      std::size_t eq = kv.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == kv.size()) {
        throw Error(Errc::ParseError, fmt::format("expected var=individual, got '{}'", kv));
      }
      p.bindings[std::string(kv.substr(0, eq))] = std::string(kv.substr(eq + 1));
    }
    return p;
  }
  throw Error(Errc::ParseError, fmt::format("unknown action '{}'", verb));
}

std::string indent(const std::string& body) {
  std::string out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t nl = body.find('\n', pos);
    if (nl == std::string::npos) nl = body.size();
    out += "  " + body.substr(pos, nl - pos) + "\n";
    pos = nl + 1;
  }
  return out;
}

std::string with_index(const std::string& what, std::size_t index, const Error& e) {
  return fmt::format("{} {}: {}", what, index, e.detail());
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& base_dir) {
  Scenario s;
  s.base_dir = base_dir;
  Instant last = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(strip_comment(text.substr(pos, nl - pos)));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      std::string_view rest = line;
      std::string_view head = next_word(rest);
      if (head == "scenario") {
        if (!s.name.empty()) throw Error(Errc::ParseError, "scenario name given twice");
        s.name = std::string(next_word(rest));
        if (s.name.empty() || !rest.empty()) throw Error(Errc::ParseError, "expected: scenario NAME");
      } else if (head == "load") {
        std::string file(next_word(rest));
        if (file.empty() || !rest.empty()) throw Error(Errc::ParseError, "expected: load FILE");
        if (!s.steps.empty()) throw Error(Errc::ParseError, "load must precede events and probes");
        s.preamble.push_back(std::move(file));
      } else if (head == "sources") {
        std::string file(next_word(rest));
        if (file.empty() || !rest.empty()) throw Error(Errc::ParseError, "expected: sources FILE");
        if (!s.sources.empty()) throw Error(Errc::ParseError, "sources given twice");
        s.sources = std::move(file);
      } else {
        Instant at = parse_at(head);
        if (at < last) {
          throw Error(Errc::ParseError, fmt::format("at={} goes back in time (previous {})", at, last));
        }
        last = at;
        std::string_view verb = next_word(rest);
        if (verb == "assert") {
          s.steps.emplace_back(parse_event(at, rest));
        } else {
          s.steps.emplace_back(Probe{at, parse_probe(verb, rest)});
        }
      }
    } catch (const Error& e) {
      throw Error(Errc::ScenarioError, fmt::format("line {}: {}", line_no, e.detail()));
    }
  }
  if (s.name.empty()) throw Error(Errc::ScenarioError, "missing 'scenario NAME' line");
  return s;
}

std::vector<ContextEvent> parse_events(std::string_view text) {
  std::vector<ContextEvent> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(strip_comment(text.substr(pos, nl - pos)));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      std::string_view rest = line;
      Instant at = parse_at(next_word(rest));
      if (next_word(rest) != "assert") throw Error(Errc::ParseError, "expected 'assert'");
      out.push_back(parse_event(at, rest));
    } catch (const Error& e) {
      throw Error(Errc::ParseError, fmt::format("line {}: {}", line_no, e.detail()));
    }
  }
  return out;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ScenarioError, fmt::format("cannot read '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  std::size_t slash = path.find_last_of('/');
  std::string dir = slash == std::string::npos ? "." : path.substr(0, slash);
  return parse_scenario(ss.str(), dir);
}

std::string resolve_path(const Scenario& s, const std::string& file) {
  if (!file.empty() && file.front() == '/') return file;
  return s.base_dir + "/" + file;
}

std::string format_event(const ContextEvent& e) {
  std::string out = fmt::format("at={} assert {} {} {}", e.at, e.subject, e.property,
                                format_value(e.value));
  if (e.ttl) out += *e.ttl ? fmt::format(" ttl {}", **e.ttl) : std::string(" ttl inf");
  if (!e.source.empty()) out += " source " + e.source;
  if (e.quality) out += " quality " + format_number(*e.quality);
  return out;
}

std::string format_probe_header(std::size_t index, const Probe& p) {
  struct Header {
    std::string operator()(const SituationsProbe&) const { return "situations"; }
    std::string operator()(const ConsistencyProbe&) const { return "consistency"; }
    std::string operator()(const InvokeProbe& i) const {
      return fmt::format("invoke {} principal {} ({} payload records)", i.goal, i.principal,
                         i.payload.records.size());
    }
    std::string operator()(const ExplainProbe& x) const {
      std::string out = "explain " + x.situation;
      for (const auto& [k, v] : x.bindings) out += fmt::format(" {}={}", k, v);
      return out;
    }
  };
  return fmt::format("probe {} at={} {}", index, p.at, std::visit(Header{}, p.action));
}

std::string render_situations(const situation::Evaluation& e) {
  std::string out = situation::format_evaluation(e);
  return out.empty() ? "(none)\n" : out;
}

std::string render_consistency(const std::vector<kb::Violation>& v) {
  if (v.empty()) return "consistent\n";
  std::string out;
  for (const auto& x : v) out += kb::format_violation(x) + "\n";
  return out;
}

std::string render_explain(const situation::ActiveSituation& a) {
  return situation::format_trace(a);
}

std::string replay_on(Engine& engine, const Scenario& s) {
  std::string out = "scenario " + s.name + "\n";
  std::size_t events = 0, probes = 0;
  for (const auto& step : s.steps) {
    if (const auto* e = std::get_if<ContextEvent>(&step)) {
      ++events;
      try {
        engine.ingest(*e);
      } catch (const Error& err) {
        throw Error(err.code(), with_index("event", events, err));
      }
      continue;
    }
    const Probe& p = std::get<Probe>(step);
    ++probes;
    out += format_probe_header(probes, p) + "\n";
    try {
      std::string body = std::visit(
          [&](const auto& a) -> std::string {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, SituationsProbe>) {
              return render_situations(engine.situations_at(p.at));
            } else if constexpr (std::is_same_v<T, ConsistencyProbe>) {
              return render_consistency(engine.consistency_at(p.at));
            } else if constexpr (std::is_same_v<T, ExplainProbe>) {
              return render_explain(engine.explain(a.situation, a.bindings, p.at));
            } else {
              auto outcome = engine.invoke(a.goal, a.principal, p.at, a.payload);
              return adaptation::format_response(outcome.response);
            }
          },
          p.action);
      out += indent(body);
    } catch (const Error& err) {
      throw Error(err.code(), with_index("probe", probes, err));
    }
  }
  out += fmt::format("events {}\n", events);
  return out;
}

EngineOptions scenario_options(const Scenario& s, EngineOptions base) {
  if (!s.sources.empty()) base.ingest = IngestConfig::from_file(resolve_path(s, s.sources));
  return base;
}

std::string replay(const Scenario& s, const EngineOptions& options) {
  Engine engine(scenario_options(s, options));
  for (const auto& f : s.preamble) engine.load_file(resolve_path(s, f));
  return replay_on(engine, s);
}

}  // namespace cas::runtime
