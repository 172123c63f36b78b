#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cas/kb/assertion.hpp"
#include "cas/kb/ontology.hpp"

namespace cas::kb {

// Immutable view of the facts valid at one instant. Built from candidate
// assertions: duplicates are dropped and each (subject, functional property)
// keeps its preferred assertion only.
class Snapshot {
 public:
  Snapshot(Instant at, std::vector<Assertion> candidates, std::shared_ptr<const Ontology> ontology);

  Instant at() const noexcept { return at_; }
  // Sorted by canonical line.
  const std::vector<Assertion>& assertions() const noexcept { return assertions_; }
  const Ontology& ontology() const noexcept { return *ontology_; }
  const std::shared_ptr<const Ontology>& ontology_ptr() const noexcept { return ontology_; }

  // One canonical line per assertion, '\n' terminated.
  std::string serialize() const;
  std::string digest() const;

  // Same instant, same assertions. The ontology is not compared.
  bool operator==(const Snapshot& other) const;

 private:
  Instant at_;
  std::vector<Assertion> assertions_;
  std::shared_ptr<const Ontology> ontology_;
};

// Per (subject, property) lookup over a snapshot. Object properties are
// expanded through inverse, symmetric and transitive characteristics; facts
// that exist only through expansion carry derived=true and source "reasoner".
class FactIndex {
 public:
  explicit FactIndex(const Snapshot& snapshot);

  // Sorted by canonical line; empty if nothing is known.
  std::span<const Assertion> lookup(const std::string& subject, const std::string& property) const;
  const std::vector<Assertion>& all() const noexcept { return all_; }

 private:
  std::vector<Assertion> all_;
  std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> ranges_;
};

struct Pattern {
  std::optional<std::string> subject;
  std::optional<std::string> property;
  std::optional<Value> value;
};

// Exact match on bound fields, over the expanded fact set. Throws
// UnknownProperty when the bound property is not declared.
std::vector<Assertion> query(const Snapshot& snapshot, const Pattern& pattern);

enum class ViolationKind { Cardinality, Disjointness, DanglingReference };

struct Violation {
  ViolationKind kind;
  std::string subject;
  std::string detail;
  bool operator==(const Violation&) const = default;
};

std::string_view to_string(ViolationKind kind) noexcept;
std::string format_violation(const Violation& v);

// Sorted by (kind, subject, detail). Empty means consistent.
std::vector<Violation> check_consistency(const Snapshot& snapshot);

}  // namespace cas::kb
