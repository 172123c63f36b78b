#pragma once

// Reference implementations used as test oracles. Each one is written
// directly from the contract, shares no code with the engine beyond the
// plain data types, and favors obviousness over speed.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cas/adaptation/payload.hpp"
#include "cas/cdl/ast.hpp"
#include "cas/kb/assertion.hpp"
#include "cas/registry/registry.hpp"

namespace oracle {

using Parents = std::map<std::string, std::set<std::string>>;

// Reflexive-transitive closure by breadth-first search from every class.
std::set<std::pair<std::string, std::string>> closure_bfs(const Parents& parents);

// Visible facts at t by linear scan, duplicates dropped, one winner per
// (subject, functional property), sorted by canonical line.
std::vector<cas::kb::Assertion> visible_scan(const std::vector<cas::kb::Assertion>& facts,
                                             const std::set<std::string>& functional,
                                             cas::Instant t);

// Minimal world for situation evaluation: individuals with declared
// classes, plain datatype/object facts (no inverse/transitive expansion).
struct World {
  Parents parents;
  std::map<std::string, std::set<std::string>> individual_classes;
  std::vector<cas::kb::Assertion> facts;  // already visible
  cas::Instant now = 0;
};

// Every binding tuple of `def` whose condition holds, each rendered as
// "Name(v=ind, ...)" with variables sorted by name. Sorted.
std::vector<std::string> exhaustive_bindings(const World& w, const cas::cdl::SituationDecl& def);

// Active composites by direct recursive evaluation over a set of active
// names (simple ones given, composites computed on demand).
std::set<std::string> truth_table(const std::map<std::string, cas::cdl::BoolExpr>& composites,
                                  const std::set<std::string>& active_simple);

// Reference transform pipeline.
cas::adaptation::Payload transform(const std::vector<cas::cdl::Step>& steps,
                                   cas::adaptation::Payload payload);

// Ranking by closure lookups. Services with Fail are dropped.
struct RankEntry {
  std::string service;
  cas::registry::MatchDegree degree;
  int hops;
  std::optional<std::string> mediator;
  bool operator==(const RankEntry&) const = default;
};
std::vector<RankEntry> rank(const Parents& parents,
                            const std::vector<cas::registry::CAWebService>& services,
                            const cas::registry::CAGoal& goal,
                            const std::vector<cas::registry::CAMediator>& mediators,
                            bool* unresolved);

// Great-circle distance on a sphere of radius 6371000 m.
double haversine(double lat1, double lon1, double lat2, double lon2);

}  // namespace oracle
