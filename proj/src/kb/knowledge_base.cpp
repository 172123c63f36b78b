#include "cas/kb/knowledge_base.hpp"

#include <fmt/core.h>

#include "cas/error.hpp"

namespace cas::kb {

std::string canonical_line(const Assertion& a) {
  auto until = a.valid_until();
  return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}", a.subject, a.property, format_value(a.value),
                     a.timestamp, until ? std::to_string(*until) : "inf", a.source,
                     format_number(a.quality), a.derived ? "true" : "false");
}

bool canonical_less(const Assertion& a, const Assertion& b) {
  return canonical_line(a) < canonical_line(b);
}

bool preferred_over(const Assertion& a, const Assertion& b) {
  if (a.timestamp != b.timestamp) return a.timestamp > b.timestamp;
  if (a.quality != b.quality) return a.quality > b.quality;
  if (a.source != b.source) return a.source < b.source;
  return canonical_line(a) < canonical_line(b);
}

KnowledgeBase::KnowledgeBase() : ontology_(std::make_shared<const Ontology>()) {}

KnowledgeBase::KnowledgeBase(Ontology ontology)
    : ontology_(std::make_shared<const Ontology>(std::move(ontology))) {}

template <typename F>
std::uint64_t KnowledgeBase::mutate_schema(F&& f) {
  // Copy-on-write: snapshots keep the revision they were built from.
  auto next = std::make_shared<Ontology>(*ontology_);
  std::uint64_t rev = f(*next);
  ontology_ = std::move(next);
  return rev;
}

std::uint64_t KnowledgeBase::define_class(ClassDef def) {
  return mutate_schema([&](Ontology& o) { return o.define_class(std::move(def)); });
}

std::uint64_t KnowledgeBase::add_subclass_edge(const std::string& sub, const std::string& super) {
  return mutate_schema([&](Ontology& o) { return o.add_subclass_edge(sub, super); });
}

std::uint64_t KnowledgeBase::define_property(PropertyDef def) {
  return mutate_schema([&](Ontology& o) { return o.define_property(std::move(def)); });
}

std::uint64_t KnowledgeBase::define_individual(Individual ind) {
  return mutate_schema([&](Ontology& o) { return o.define_individual(std::move(ind)); });
}

FactId KnowledgeBase::assert_fact(Assertion a) {
  ontology_->check_assertion(a);
  facts_.push_back(std::move(a));
  return facts_.size() - 1;
}

Snapshot KnowledgeBase::snapshot_at(Instant t) const {
  if (t < 0) throw Error(Errc::InvalidArgument, fmt::format("snapshot instant {} < 0", t));
  std::vector<Assertion> visible;
  for (const auto& a : facts_) {
    if (a.visible_at(t)) visible.push_back(a);
  }
  return Snapshot(t, std::move(visible), ontology_);
}

}  // namespace cas::kb
