#include "cas/registry/registry.hpp"

#include <algorithm>

#include <fmt/core.h>

#include "cas/cdl/unparse.hpp"
#include "cas/error.hpp"

namespace cas::registry {

std::string_view to_string(MatchDegree d) noexcept {
  switch (d) {
    case MatchDegree::Exact: return "Exact";
    case MatchDegree::PlugIn: return "PlugIn";
    case MatchDegree::Subsumes: return "Subsumes";
    case MatchDegree::Fail: return "Fail";
  }
  return "?";
}

MatchDegree param_degree(const kb::Ontology& ontology, const std::string& offered,
                         const std::string& wanted) {
  if (offered == wanted) return MatchDegree::Exact;
  if (is_datatype_tag(offered) || is_datatype_tag(wanted)) return MatchDegree::Fail;
  if (ontology.is_subclass(offered, wanted)) return MatchDegree::PlugIn;
  if (ontology.is_subclass(wanted, offered)) return MatchDegree::Subsumes;
  return MatchDegree::Fail;
}

namespace {

MatchDegree worst(MatchDegree a, MatchDegree b) { return better(a, b) ? b : a; }

// Best service output for one wanted goal output.
ParamMatch best_output(const kb::Ontology& ontology, const std::string& wanted,
                       const std::vector<std::string>& offered) {
  ParamMatch pm{false, wanted, {}, MatchDegree::Fail};
  for (const auto& c : offered) {
    MatchDegree d = param_degree(ontology, c, wanted);
    if (better(d, pm.degree)) {
      pm.degree = d;
      pm.service_concept = c;
    }
  }
  return pm;
}

bool concept_known(const kb::Ontology& ontology, const std::string& c) {
  return is_datatype_tag(c) || ontology.has_class(c);
}

std::string rename(const std::map<std::string, std::string>& map, const std::string& c) {
  auto it = map.find(c);
  return it == map.end() ? c : it->second;
}

bool rank_less(const MatchResult& a, const MatchResult& b) {
  if (a.degree != b.degree) return better(a.degree, b.degree);
  if (a.hops != b.hops) return a.hops < b.hops;
  if (a.service != b.service) return a.service < b.service;
  return a.mediator.value_or("") < b.mediator.value_or("");
}

}  // namespace

MatchResult score(const kb::Ontology& ontology, const CAWebService& service, const CAGoal& goal) {
  MatchResult r;
  r.service = service.id;
  r.degree = MatchDegree::Exact;
  for (const auto& want : goal.outputs) {
    ParamMatch pm = best_output(ontology, want, service.capability.outputs);
    r.degree = worst(r.degree, pm.degree);
    r.detail.push_back(std::move(pm));
  }
  if (goal.inputs) {
    // Every input the service needs must be fed by something the goal
    // provides.
    for (const auto& need : service.capability.inputs) {
      ParamMatch pm{true, {}, need, MatchDegree::Fail};
      for (const auto& have : *goal.inputs) {
        MatchDegree d = param_degree(ontology, have, need);
        if (better(d, pm.degree)) {
          pm.degree = d;
          pm.goal_concept = have;
        }
      }
      r.degree = worst(r.degree, pm.degree);
      r.detail.push_back(std::move(pm));
    }
  }
  return r;
}

void Registry::register_service(CAWebService s, const References& refs) {
  if (services_.count(s.id)) {
    throw Error(Errc::DuplicateId, fmt::format("service '{}' is already registered", s.id));
  }
  for (const auto* list : {&s.capability.inputs, &s.capability.outputs}) {
    for (const auto& c : *list) {
      if (refs.ontology && !concept_known(*refs.ontology, c)) {
        throw Error(Errc::UnresolvedReference,
                    fmt::format("service '{}': unknown class '{}'", s.id, c));
      }
    }
  }
  for (const auto& rule : s.rules) {
    if (refs.situations && !refs.situations->contains(rule.when)) {
      throw Error(Errc::UnresolvedReference,
                  fmt::format("service '{}': unknown situation '{}'", s.id, rule.when));
    }
    for (const auto& a : rule.apply) {
      if (!refs.adaptations.count(a)) {
        throw Error(Errc::UnresolvedReference,
                    fmt::format("service '{}': unknown adaptation '{}'", s.id, a));
      }
    }
  }
  if (s.handler != kEchoHandler && !refs.handlers.count(s.handler)) {
    throw Error(Errc::UnknownHandler,
                fmt::format("service '{}': no handler '{}' is registered", s.id, s.handler));
  }
  if (s.rules.empty() && !s.is_static) {
    throw Error(Errc::MissingAdaptation,
                fmt::format("service '{}' has no adaptation rule and is not static", s.id));
  }
  std::string id = s.id;
  services_.emplace(std::move(id), std::move(s));
}

void Registry::add_rule(const std::string& service_id, AdaptationRule rule,
                        const References& refs) {
  auto it = services_.find(service_id);
  if (it == services_.end()) {
    throw Error(Errc::UnknownService, fmt::format("unknown service '{}'", service_id));
  }
  if (refs.situations && !refs.situations->contains(rule.when)) {
    throw Error(Errc::UnresolvedReference,
                fmt::format("service '{}': unknown situation '{}'", service_id, rule.when));
  }
  for (const auto& a : rule.apply) {
    if (!refs.adaptations.count(a)) {
      throw Error(Errc::UnresolvedReference,
                  fmt::format("service '{}': unknown adaptation '{}'", service_id, a));
    }
  }
  it->second.rules.push_back(std::move(rule));
}

void Registry::register_goal(CAGoal g, const References& refs) {
  if (goals_.count(g.id)) {
    throw Error(Errc::DuplicateId, fmt::format("goal '{}' is already registered", g.id));
  }
  if (refs.situations && !refs.situations->contains(g.related_situation)) {
    throw Error(Errc::UnresolvedReference,
                fmt::format("goal '{}': unknown situation '{}'", g.id, g.related_situation));
  }
  std::string id = g.id;
  goals_.emplace(std::move(id), std::move(g));
}

void Registry::register_mediator(CAMediator m, const References& refs) {
  if (mediators_.count(m.id)) {
    throw Error(Errc::DuplicateId, fmt::format("mediator '{}' is already registered", m.id));
  }
  std::set<std::string> targets;
  for (const auto& [from, to] : m.concept_map) {
    if (refs.ontology && !refs.ontology->has_class(to)) {
      throw Error(Errc::UnresolvedReference,
                  fmt::format("mediator '{}': unknown class '{}'", m.id, to));
    }
    if (!targets.insert(to).second) {
      throw Error(Errc::InvalidMediator,
                  fmt::format("mediator '{}' maps two concepts onto '{}'", m.id, to));
    }
  }
  std::string id = m.id;
  mediators_.emplace(std::move(id), std::move(m));
}

const CAWebService& Registry::service(const std::string& id) const {
  auto it = services_.find(id);
  if (it == services_.end()) throw Error(Errc::UnknownService, fmt::format("unknown service '{}'", id));
  return it->second;
}

const CAGoal& Registry::goal(const std::string& id) const {
  auto it = goals_.find(id);
  if (it == goals_.end()) throw Error(Errc::UnknownGoal, fmt::format("unknown goal '{}'", id));
  return it->second;
}

std::vector<MatchResult> Registry::match_goal(const CAGoal& g,
                                              const std::vector<CAMediator>& mediators,
                                              const kb::Ontology& ontology) const {
  struct Route {
    CAGoal goal;
    std::optional<std::string> mediator;
    int hops;
  };
  auto resolves = [&](const CAGoal& goal) {
    auto ok = [&](const std::string& c) { return concept_known(ontology, c); };
    bool outs = std::all_of(goal.outputs.begin(), goal.outputs.end(), ok);
    bool ins = !goal.inputs || std::all_of(goal.inputs->begin(), goal.inputs->end(), ok);
    return outs && ins;
  };

  std::vector<Route> routes;
  if (resolves(g)) routes.push_back(Route{g, std::nullopt, 0});
  for (const auto& m : mediators) {
    CAGoal mapped = g;
    for (auto& c : mapped.outputs) c = rename(m.concept_map, c);
    if (mapped.inputs) {
      for (auto& c : *mapped.inputs) c = rename(m.concept_map, c);
    }
    if (mapped == g) continue;  // the mediator touches nothing here
    if (resolves(mapped)) routes.push_back(Route{std::move(mapped), m.id, 1});
  }
  if (routes.empty()) {
    throw Error(Errc::UnresolvedGoal,
                fmt::format("goal '{}' names concepts unknown to the schema and every mediator",
                            g.id));
  }

  std::vector<MatchResult> out;
  for (const auto& [id, service] : services_) {
    std::optional<MatchResult> best;
    for (const auto& route : routes) {
      MatchResult r = score(ontology, service, route.goal);
      r.mediator = route.mediator;
      r.hops = route.hops;
      if (r.degree == MatchDegree::Fail) continue;
      if (!best || rank_less(r, *best)) best = std::move(r);
    }
    if (best) out.push_back(std::move(*best));
  }
  std::sort(out.begin(), out.end(), rank_less);
  return out;
}

std::vector<MatchResult> Registry::match_goal(const CAGoal& g, const kb::Ontology& ontology) const {
  std::vector<CAMediator> ms;
  for (const auto& [_, m] : mediators_) ms.push_back(m);
  return match_goal(g, ms, ontology);
}

std::vector<AdaptationRule> Registry::applicable_rules(const std::string& service_id,
                                                       const std::set<std::string>& active) const {
  std::vector<AdaptationRule> out;
  for (const auto& r : service(service_id).rules) {
    if (active.count(r.when)) out.push_back(r);
  }
  return out;
}

CAWebService to_service(const cdl::ServiceDecl& d) {
  CAWebService s;
  s.id = d.name;
  s.capability = Capability{d.inputs, d.outputs, d.precondition, d.effect};
  for (const auto& r : d.rules) s.rules.push_back(AdaptationRule{r.when, r.apply});
  if (d.handler) s.handler = *d.handler;
  s.is_static = d.is_static;
  return s;
}

CAGoal to_goal(const cdl::GoalDecl& d) {
  return CAGoal{d.name, d.inputs, d.outputs, d.related_situation};
}

CAMediator to_mediator(const cdl::MediatorDecl& d) {
  CAMediator m;
  m.id = d.name;
  for (const auto& [from, to] : d.maps) m.concept_map.emplace(from, to);
  return m;
}

cdl::ServiceDecl to_decl(const CAWebService& s) {
  cdl::ServiceDecl d;
  d.name = s.id;
  d.inputs = s.capability.inputs;
  d.outputs = s.capability.outputs;
  if (s.handler != kEchoHandler) d.handler = s.handler;
  d.is_static = s.is_static;
  d.precondition = s.capability.precondition;
  d.effect = s.capability.effect;
  for (const auto& r : s.rules) d.rules.push_back(cdl::RuleClause{r.when, r.apply});
  return d;
}

cdl::GoalDecl to_decl(const CAGoal& g) {
  return cdl::GoalDecl{g.id, g.inputs, g.outputs, g.related_situation};
}

cdl::MediatorDecl to_decl(const CAMediator& m) {
  cdl::MediatorDecl d;
  d.name = m.id;
  for (const auto& [from, to] : m.concept_map) d.maps.emplace_back(from, to);
  return d;
}

std::string Registry::to_cdl() const {
  std::string out;
  auto emit = [&](cdl::StatementBody body) {
    out += cdl::unparse(cdl::Statement{std::move(body), {}}) + "\n";
  };
  for (const auto& [_, m] : mediators_) emit(to_decl(m));
  for (const auto& [_, s] : services_) emit(to_decl(s));
  for (const auto& [_, g] : goals_) emit(to_decl(g));
  return out;
}

std::string format_match(const MatchResult& m) {
  std::string detail;
  for (const auto& p : m.detail) {
    detail += fmt::format("{}{} {}~{}={}", detail.empty() ? "" : ", ", p.input ? "in" : "out",
                          p.goal_concept, p.service_concept.empty() ? "-" : p.service_concept,
                          to_string(p.degree));
  }
  return fmt::format("{} {} hops={}{} [{}]", m.service, to_string(m.degree), m.hops,
                     m.mediator ? " via " + *m.mediator : "", detail);
}

}  // namespace cas::registry
