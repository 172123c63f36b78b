#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cas/kb/assertion.hpp"
#include "cas/kb/ontology.hpp"
#include "cas/kb/snapshot.hpp"

namespace cas::kb {

using FactId = std::uint64_t;

// The live store: schema plus every accepted observation. Mutations are not
// synchronized; callers serialize writes. Snapshots share the schema revision
// they were taken at, so later schema changes never reach an existing one.
class KnowledgeBase {
 public:
  KnowledgeBase();
  explicit KnowledgeBase(Ontology ontology);

  std::uint64_t define_class(ClassDef def);
  std::uint64_t add_subclass_edge(const std::string& sub, const std::string& super);
  std::uint64_t define_property(PropertyDef def);
  std::uint64_t define_individual(Individual ind);

  FactId assert_fact(Assertion a);

  Snapshot snapshot_at(Instant t) const;

  const Ontology& ontology() const noexcept { return *ontology_; }
  const std::shared_ptr<const Ontology>& ontology_ptr() const noexcept { return ontology_; }
  // Index == FactId.
  const std::vector<Assertion>& facts() const noexcept { return facts_; }

 private:
  template <typename F>
  std::uint64_t mutate_schema(F&& f);

  std::shared_ptr<const Ontology> ontology_;
  std::vector<Assertion> facts_;
};

}  // namespace cas::kb
