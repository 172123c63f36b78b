#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cas/cdl/ast.hpp"
#include "cas/kb/assertion.hpp"
#include "cas/kb/ontology.hpp"
#include "cas/kb/snapshot.hpp"

namespace cas::situation {

using SituationDef = cdl::SituationDecl;
using CompositeDef = cdl::CompositeDecl;

// The set of situation definitions evaluated together. Iteration order is by
// name, so declaration order never leaks into results.
class Program {
 public:
  // Both throw DuplicateName when the name is taken by either kind.
  void add(SituationDef def);
  void add(CompositeDef def);

  const std::map<std::string, SituationDef>& simple() const noexcept { return simple_; }
  const std::map<std::string, CompositeDef>& composites() const noexcept { return composites_; }
  bool contains(const std::string& name) const;
  bool empty() const noexcept { return simple_.empty() && composites_.empty(); }

 private:
  std::map<std::string, SituationDef> simple_;
  std::map<std::string, CompositeDef> composites_;
};

// Layers in evaluation order, names sorted within a layer. A simple
// situation reading a property another one derives sits in a later layer
// unless both are in the same dependency cycle. A composite sits strictly
// above everything it references.
struct Strata {
  std::vector<std::vector<std::string>> layers;
  std::map<std::string, std::size_t> layer_of;
};

// Throws CyclicComposite, NegationCycle (a cycle through `not`) or
// UnknownSituation. With an ontology, writing a property also counts as
// writing its inverse.
Strata stratify(const Program& program, const kb::Ontology* ontology = nullptr);

// One satisfied atom: the operand values that satisfied it and the facts
// that produced those values.
struct Witness {
  std::size_t atom_index = 0;
  cdl::Atom atom;
  std::vector<Value> operands;         // one per term, in atom order
  std::vector<kb::Assertion> facts;    // path facts, in operand order
  bool operator==(const Witness&) const = default;
};

struct ActiveSituation {
  std::string situation;
  // Head order.
  std::vector<std::pair<std::string, std::string>> bindings;
  std::vector<Witness> derivation;

  std::map<std::string, std::string> binding_map() const;
  bool operator==(const ActiveSituation&) const = default;
};

struct Evaluation {
  Instant at = 0;
  // Sorted by (situation, bindings).
  std::vector<ActiveSituation> simple;
  std::set<std::string> composites;
  // Overlay facts written by derive templates. Sorted canonically.
  std::vector<kb::Assertion> derived;

  // Simple with at least one binding, or composite.
  bool is_active(const std::string& name) const;
  std::set<std::string> active_names() const;
  bool operator==(const Evaluation&) const = default;
};

// Closed-world evaluation to a fixpoint per layer. Never throws for a
// program that stratifies.
Evaluation evaluate(const kb::Snapshot& snapshot, const Program& program);

// Composite truth given the names of simple situations that hold.
std::set<std::string> evaluate_composites(const std::set<std::string>& active_simple,
                                          const Program& program);
std::set<std::string> evaluate_composites(const std::vector<ActiveSituation>& active_simple,
                                          const Program& program);

// Witnesses for `condition` under a fixed binding, or nullopt if some atom
// fails. Used for service preconditions.
std::optional<std::vector<Witness>> satisfy_condition(
    const cdl::Condition& condition, const std::map<std::string, std::string>& binding,
    const kb::Snapshot& snapshot);

// Truth of one atom on concrete operand values.
bool atom_holds(const cdl::Atom& atom, const std::vector<Value>& operands);

// The derivation of a situation active in `evaluation`. Throws NotActive.
const ActiveSituation& explain(const Evaluation& evaluation, const std::string& situation,
                               const std::map<std::string, std::string>& bindings);

// "Name(var=ind, ...)"
std::string format_active(const ActiveSituation& a);
// Header line plus one line per atom witness.
std::string format_trace(const ActiveSituation& a);
// One active simple situation per line, then "composite Name" lines.
std::string format_evaluation(const Evaluation& e);

}  // namespace cas::situation
