#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cas/cdl/ast.hpp"
#include "cas/kb/ontology.hpp"
#include "cas/situation/engine.hpp"

namespace cas::registry {

struct Capability {
  std::vector<std::string> inputs;   // class names or datatype tags
  std::vector<std::string> outputs;
  std::optional<cdl::Condition> precondition;  // over ?principal
  std::optional<cdl::Condition> effect;        // descriptive only
  bool operator==(const Capability&) const = default;
};

struct AdaptationRule {
  std::string when;                // situation name
  std::vector<std::string> apply;  // adaptation ids, in order
  bool operator==(const AdaptationRule&) const = default;
};

// Handler used when a service names none: returns the request payload.
inline constexpr std::string_view kEchoHandler = "echo";

struct CAWebService {
  std::string id;
  Capability capability;
  std::vector<AdaptationRule> rules;
  std::string handler = std::string(kEchoHandler);
  bool is_static = false;
  bool operator==(const CAWebService&) const = default;
};

struct CAGoal {
  std::string id;
  // nullopt: the goal provides nothing in particular and input matching is
  // skipped.
  std::optional<std::vector<std::string>> inputs;
  std::vector<std::string> outputs;
  std::string related_situation;
  bool operator==(const CAGoal&) const = default;
};

struct CAMediator {
  std::string id;
  std::map<std::string, std::string> concept_map;  // injective
  bool operator==(const CAMediator&) const = default;
};

// Declaration order is best first.
enum class MatchDegree { Exact, PlugIn, Subsumes, Fail };
std::string_view to_string(MatchDegree d) noexcept;
// True if a is strictly better than b.
inline bool better(MatchDegree a, MatchDegree b) {
  return static_cast<int>(a) < static_cast<int>(b);
}

struct ParamMatch {
  bool input = false;          // false: output parameter
  std::string goal_concept;    // after mediation
  std::string service_concept; // best partner, empty if none
  MatchDegree degree = MatchDegree::Fail;
  bool operator==(const ParamMatch&) const = default;
};

struct MatchResult {
  std::string service;
  MatchDegree degree = MatchDegree::Fail;
  std::vector<ParamMatch> detail;
  std::optional<std::string> mediator;
  int hops = 0;
  bool operator==(const MatchResult&) const = default;
};

// Degree of one parameter pair under the subsumption closure. For outputs
// `offered` is the service concept and `wanted` the goal concept; inputs are
// scored dually by the caller.
MatchDegree param_degree(const kb::Ontology& ontology, const std::string& offered,
                         const std::string& wanted);

// Score one service against one (already mediated) goal signature.
MatchResult score(const kb::Ontology& ontology, const CAWebService& service, const CAGoal& goal);

// Everything registration checks against.
struct References {
  const kb::Ontology* ontology = nullptr;
  const situation::Program* situations = nullptr;
  std::set<std::string> adaptations;
  std::set<std::string> handlers;
};

class Registry {
 public:
  // DuplicateId, UnresolvedReference, UnknownHandler, MissingAdaptation.
  void register_service(CAWebService s, const References& refs);
  // DuplicateId, UnresolvedReference (related situation).
  void register_goal(CAGoal g, const References& refs);
  // DuplicateId, UnresolvedReference (target class), InvalidMediator.
  void register_mediator(CAMediator m, const References& refs);

  // Appends a rule to a registered service. UnknownService,
  // UnresolvedReference.
  void add_rule(const std::string& service_id, AdaptationRule rule, const References& refs);

  const std::map<std::string, CAWebService>& services() const noexcept { return services_; }
  const std::map<std::string, CAGoal>& goals() const noexcept { return goals_; }
  const std::map<std::string, CAMediator>& mediators() const noexcept { return mediators_; }

  const CAWebService& service(const std::string& id) const;  // UnknownService
  const CAGoal& goal(const std::string& id) const;           // UnknownGoal

  // Ranked best first: degree, then mediator hops, then service id. Fail
  // results are dropped. UnresolvedGoal when no route (direct or through one
  // mediator) maps every goal concept onto the schema.
  std::vector<MatchResult> match_goal(const CAGoal& g, const std::vector<CAMediator>& mediators,
                                      const kb::Ontology& ontology) const;
  // Through every registered mediator.
  std::vector<MatchResult> match_goal(const CAGoal& g, const kb::Ontology& ontology) const;

  // Rules whose situation is in `active`, in declaration order.
  std::vector<AdaptationRule> applicable_rules(const std::string& service_id,
                                               const std::set<std::string>& active) const;

  // Services, goals and mediators as canonical CDL statements.
  std::string to_cdl() const;

 private:
  std::map<std::string, CAWebService> services_;
  std::map<std::string, CAGoal> goals_;
  std::map<std::string, CAMediator> mediators_;
};

// Conversions from parsed declarations.
CAWebService to_service(const cdl::ServiceDecl& d);
CAGoal to_goal(const cdl::GoalDecl& d);
CAMediator to_mediator(const cdl::MediatorDecl& d);
cdl::ServiceDecl to_decl(const CAWebService& s);
cdl::GoalDecl to_decl(const CAGoal& g);
cdl::MediatorDecl to_decl(const CAMediator& m);

std::string format_match(const MatchResult& m);

}  // namespace cas::registry
