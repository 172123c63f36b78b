#include "cas/runtime/engine.hpp"

#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "cas/cdl/parser.hpp"
#include "cas/error.hpp"

namespace cas::runtime {

namespace {

std::string format_errors(const std::vector<cdl::Diagnostic>& diags, const std::string& source) {
  std::string out;
  for (const auto& d : diags) {
    if (d.severity != cdl::Severity::Error) continue;
    if (!out.empty()) out += "\n";
    out += cdl::format_diagnostic(d, source);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::InvalidArgument, fmt::format("cannot read '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Engine::Engine(EngineOptions options)
    : ingest_(std::move(options.ingest)),
      program_(std::make_shared<situation::Program>()),
      registry_(std::make_shared<registry::Registry>()),
      adaptations_(std::make_shared<std::map<std::string, adaptation::Adaptation>>()),
      handlers_(std::make_shared<adaptation::HandlerTable>()) {
  if (options.fixture_handlers) register_fixture_handlers(*handlers_);
  if (options.load_prelude) load(upper_prelude(), "upper.cdl");
}

void Engine::add_handler(const std::string& id, adaptation::Handler handler) {
  std::lock_guard lock(mu_);
  auto table = std::make_shared<adaptation::HandlerTable>(*handlers_);
  table->add(id, std::move(handler));
  handlers_ = std::move(table);
}

std::vector<cdl::Diagnostic> Engine::load_file(const std::string& path) {
  std::string name = path.substr(path.find_last_of('/') + 1);
  return load(read_file(path), name);
}

std::vector<cdl::Diagnostic> Engine::load(std::string_view text, const std::string& source_name) {
  std::lock_guard lock(mu_);
  cdl::NameScope scope = env_.scope();
  cdl::ParseResult parsed = cdl::parse(text, cdl::ParseOptions{source_name, &scope});
  if (!parsed.ok()) throw Error(Errc::ParseError, format_errors(parsed.diagnostics, source_name));
  const cdl::Document& doc = *parsed.document;

  cdl::Environment env = env_;
  std::vector<cdl::Diagnostic> diags = cdl::validate(doc, env);
  if (cdl::has_errors(diags)) throw Error(Errc::ValidationError, format_errors(diags, source_name));

  // Work on copies and commit only if everything registers.
  kb::KnowledgeBase kb = kb_;
  auto program = std::make_shared<situation::Program>(*program_);
  auto adaptations = std::make_shared<std::map<std::string, adaptation::Adaptation>>(*adaptations_);
  auto reg = std::make_shared<registry::Registry>(*registry_);
  std::vector<std::string> services, goals, mediators;
  std::vector<cdl::RuleDecl> late_rules;

  for (const auto& st : doc.statements) {
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, cdl::ClassDecl>) {
            kb.define_class(cdl::to_class_def(d));
          } else if constexpr (std::is_same_v<T, cdl::PropertyDecl>) {
            kb.define_property(cdl::to_property_def(d));
          } else if constexpr (std::is_same_v<T, cdl::IndividualDecl>) {
            kb.define_individual(cdl::to_individual(d));
          } else if constexpr (std::is_same_v<T, cdl::AssertDecl>) {
            kb.assert_fact(cdl::to_assertion(d, kb.ontology()));
          } else if constexpr (std::is_same_v<T, cdl::SituationDecl> ||
                               std::is_same_v<T, cdl::CompositeDecl>) {
            program->add(d);
          } else if constexpr (std::is_same_v<T, cdl::AdaptationDecl>) {
            adaptations->emplace(d.name, d);
          } else if constexpr (std::is_same_v<T, cdl::ServiceDecl>) {
            services.push_back(d.name);
          } else if constexpr (std::is_same_v<T, cdl::RuleDecl>) {
            if (std::find(services.begin(), services.end(), d.service) == services.end()) {
              late_rules.push_back(d);
            }
          } else if constexpr (std::is_same_v<T, cdl::GoalDecl>) {
            goals.push_back(d.name);
          } else if constexpr (std::is_same_v<T, cdl::MediatorDecl>) {
            mediators.push_back(d.name);
          }
        },
        st.body);
  }
  situation::stratify(*program, &kb.ontology());

  registry::References refs;
  refs.ontology = &kb.ontology();
  refs.situations = program.get();
  for (const auto& [id, _] : *adaptations) refs.adaptations.insert(id);
  refs.handlers = handlers_->ids();
  for (const auto& m : mediators) reg->register_mediator(registry::to_mediator(env.mediators.at(m)), refs);
  for (const auto& s : services) reg->register_service(registry::to_service(env.services.at(s)), refs);
  for (const auto& r : late_rules) {
    reg->add_rule(r.service, registry::AdaptationRule{r.rule.when, r.rule.apply}, refs);
  }
  for (const auto& g : goals) reg->register_goal(registry::to_goal(env.goals.at(g)), refs);

  kb_ = std::move(kb);
  env_ = std::move(env);
  program_ = std::move(program);
  adaptations_ = std::move(adaptations);
  registry_ = std::move(reg);
  return diags;
}

kb::FactId Engine::ingest(const ContextEvent& e) {
  std::lock_guard lock(mu_);
  kb::Assertion a = normalize(e, ingest_, kb_.ontology());
  kb::FactId id = kb_.assert_fact(std::move(a));
  latest_ = std::max(latest_, e.at);
  return id;
}

kb::FactId Engine::assert_fact(kb::Assertion a) {
  std::lock_guard lock(mu_);
  Instant at = a.timestamp;
  kb::FactId id = kb_.assert_fact(std::move(a));
  latest_ = std::max(latest_, at);
  return id;
}

kb::Snapshot Engine::snapshot_at(Instant t) const {
  std::lock_guard lock(mu_);
  return kb_.snapshot_at(t);
}

situation::Evaluation Engine::situations_at(Instant t) const {
  kb::Snapshot snap = snapshot_at(t);
  std::shared_ptr<const situation::Program> program;
  {
    std::lock_guard lock(mu_);
    program = program_;
  }
  return situation::evaluate(snap, *program);
}

situation::ActiveSituation Engine::explain(const std::string& situation,
                                           const std::map<std::string, std::string>& bindings,
                                           Instant t) const {
  {
    std::lock_guard lock(mu_);
    if (!program_->contains(situation)) {
      throw Error(Errc::UnknownSituation, fmt::format("unknown situation '{}'", situation));
    }
  }
  situation::Evaluation e = situations_at(t);
  return situation::explain(e, situation, bindings);
}

std::vector<kb::Violation> Engine::consistency_at(Instant t) const {
  return kb::check_consistency(snapshot_at(t));
}

std::vector<registry::MatchResult> Engine::match(const std::string& goal) const {
  std::lock_guard lock(mu_);
  return registry_->match_goal(registry_->goal(goal), kb_.ontology());
}

adaptation::Context Engine::context() const {
  std::lock_guard lock(mu_);
  return adaptation::Context{program_, registry_, adaptations_, handlers_};
}

adaptation::Ticket Engine::notify(adaptation::RequestEnvelope req, adaptation::Mode mode) {
  kb::Snapshot snap = [&] {
    std::lock_guard lock(mu_);
    if (req.request_id.empty()) req.request_id = fmt::format("req-{}", next_request_++);
    return kb_.snapshot_at(req.at);
  }();
  return adaptation::notify(std::move(req), std::move(snap), context(), mode);
}

adaptation::Outcome Engine::invoke(const std::string& goal, const std::string& principal,
                                   Instant at, adaptation::Payload payload) {
  adaptation::RequestEnvelope req{{}, goal, std::move(payload), at, principal};
  adaptation::Outcome out = notify(std::move(req), adaptation::Mode::Sync).get();
  std::lock_guard lock(mu_);
  traces_[out.trace.trace_id] = adaptation::format_trace(out.trace);
  return out;
}

std::optional<std::string> Engine::trace(const std::string& trace_id) const {
  std::lock_guard lock(mu_);
  auto it = traces_.find(trace_id);
  if (it == traces_.end()) return std::nullopt;
  return it->second;
}

std::string Engine::services_cdl() const {
  std::lock_guard lock(mu_);
  return registry_->to_cdl();
}

Instant Engine::latest_time() const {
  std::lock_guard lock(mu_);
  return latest_;
}

}  // namespace cas::runtime
