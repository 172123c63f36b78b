#include "cas/kb/ontology.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "cas/error.hpp"

namespace cas::kb {

namespace {

constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

}  // namespace

Ontology Ontology::standard_prelude() {
  Ontology o;
  for (auto name : kUpperClasses) {
    o.define_class(ClassDef{std::string(name), {}, {}, ClassLevel::Upper});
  }
  return o;
}

std::size_t Ontology::index_of(std::string_view name) const {
  auto it = class_index_.find(std::string(name));
  return it == class_index_.end() ? kNpos : it->second;
}

bool Ontology::has_class(std::string_view name) const { return index_of(name) != kNpos; }

const ClassDef* Ontology::find_class(std::string_view name) const {
  auto i = index_of(name);
  return i == kNpos ? nullptr : &classes_[i];
}

const PropertyDef* Ontology::find_property(std::string_view name) const {
  auto it = properties_.find(name);
  return it == properties_.end() ? nullptr : &it->second;
}

const Individual* Ontology::find_individual(std::string_view name) const {
  auto it = individuals_.find(name);
  return it == individuals_.end() ? nullptr : &it->second;
}

std::uint64_t Ontology::define_class(ClassDef def) {
  if (has_class(def.name)) {
    throw Error(Errc::DuplicateName, fmt::format("class '{}' is already defined", def.name));
  }
  for (const auto& p : def.parents) {
    if (!has_class(p)) {
      throw Error(Errc::UnknownParent, fmt::format("class '{}': unknown parent '{}'", def.name, p));
    }
  }
  for (const auto& d : def.disjoint_with) {
    if (!has_class(d)) {
      throw Error(Errc::UnknownClass,
                  fmt::format("class '{}': unknown disjoint class '{}'", def.name, d));
    }
  }

  // A fresh class has no descendants, so its row is the union of its
  // parents' rows and nothing else changes.
  std::size_t idx = classes_.size();
  for (auto& row : ancestors_) row.push_back(false);
  std::vector<bool> row(idx + 1, false);
  row[idx] = true;
  for (const auto& p : def.parents) {
    const auto& prow = ancestors_[index_of(p)];
    for (std::size_t j = 0; j < prow.size(); ++j) {
      if (prow[j]) row[j] = true;
    }
  }
  ancestors_.push_back(std::move(row));

  // ComplementOf is symmetric.
  for (const auto& d : def.disjoint_with) {
    classes_[index_of(d)].disjoint_with.insert(def.name);
  }
  class_index_.emplace(def.name, idx);
  classes_.push_back(std::move(def));
  return ++revision_;
}

std::uint64_t Ontology::add_subclass_edge(const std::string& sub, const std::string& super) {
  std::size_t s = index_of(sub);
  std::size_t p = index_of(super);
  if (s == kNpos) throw Error(Errc::UnknownClass, fmt::format("unknown class '{}'", sub));
  if (p == kNpos) throw Error(Errc::UnknownParent, fmt::format("unknown parent '{}'", super));
  if (ancestors_[p][s]) {
    throw Error(Errc::CycleIntroduced,
                fmt::format("'{}' < '{}' would close a subclass cycle", sub, super));
  }
  classes_[s].parents.insert(super);
  const std::vector<bool> add = ancestors_[p];
  for (std::size_t d = 0; d < classes_.size(); ++d) {
    if (!ancestors_[d][s]) continue;
    for (std::size_t j = 0; j < add.size(); ++j) {
      if (add[j]) ancestors_[d][j] = true;
    }
  }
  return ++revision_;
}

std::uint64_t Ontology::define_property(PropertyDef def) {
  if (properties_.count(def.name)) {
    throw Error(Errc::DuplicateName, fmt::format("property '{}' is already defined", def.name));
  }
  if (def.domain.empty()) {
    throw Error(Errc::InvalidProperty, fmt::format("property '{}' has an empty domain", def.name));
  }
  for (const auto& d : def.domain) {
    if (!has_class(d)) {
      throw Error(Errc::UnknownClass,
                  fmt::format("property '{}': unknown domain class '{}'", def.name, d));
    }
  }
  if (def.is_object()) {
    if (!has_class(def.range_class)) {
      throw Error(Errc::UnknownClass,
                  fmt::format("property '{}': unknown range class '{}'", def.name, def.range_class));
    }
    def.range_type = ValueType::Individual;
  } else {
    if (def.range_type == ValueType::Individual) {
      throw Error(Errc::InvalidProperty,
                  fmt::format("datatype property '{}' needs a datatype range", def.name));
    }
    if (def.symmetric || def.transitive || def.part_of || def.inverse_of) {
      throw Error(Errc::InvalidProperty,
                  fmt::format("'{}': symmetric, transitive, partof and inverseof apply only to "
                              "object properties",
                              def.name));
    }
  }
  if (def.cardinality && def.cardinality->max && def.cardinality->min > *def.cardinality->max) {
    throw Error(Errc::InvalidProperty, fmt::format("'{}': cardinality min exceeds max", def.name));
  }
  if (def.functional) {
    if (def.cardinality && def.cardinality->max != 1u) {
      throw Error(Errc::InvalidProperty,
                  fmt::format("'{}': functional property must have max cardinality 1", def.name));
    }
    if (!def.cardinality) def.cardinality = Cardinality{0, 1u};
  }
  if (def.inverse_of) {
    auto it = properties_.find(*def.inverse_of);
    if (it == properties_.end()) {
      throw Error(Errc::UnknownProperty,
                  fmt::format("'{}': inverse '{}' is not defined", def.name, *def.inverse_of));
    }
    PropertyDef& other = it->second;
    if (!other.is_object()) {
      throw Error(Errc::InvalidProperty,
                  fmt::format("'{}': inverse '{}' is not an object property", def.name, other.name));
    }
    if (other.inverse_of && *other.inverse_of != def.name) {
      throw Error(Errc::InvalidProperty, fmt::format("'{}' already has inverse '{}'", other.name,
                                                     *other.inverse_of));
    }
    if (!def.domain.count(other.range_class) || !other.domain.count(def.range_class)) {
      throw Error(Errc::InvalidProperty,
                  fmt::format("'{}' and '{}' do not swap domain and range", def.name, other.name));
    }
    other.inverse_of = def.name;
  }
  properties_.emplace(def.name, std::move(def));
  return ++revision_;
}

std::uint64_t Ontology::define_individual(Individual ind) {
  if (individuals_.count(ind.name)) {
    throw Error(Errc::DuplicateName, fmt::format("individual '{}' is already defined", ind.name));
  }
  if (ind.classes.empty()) {
    throw Error(Errc::UnknownClass, fmt::format("individual '{}' has no class", ind.name));
  }
  for (const auto& c : ind.classes) {
    if (!has_class(c)) {
      throw Error(Errc::UnknownClass, fmt::format("individual '{}': unknown class '{}'", ind.name, c));
    }
  }
  individuals_.emplace(ind.name, std::move(ind));
  return ++revision_;
}

bool Ontology::is_subclass(std::string_view sub, std::string_view super) const {
  std::size_t s = index_of(sub);
  std::size_t p = index_of(super);
  if (s == kNpos || p == kNpos) return false;
  return ancestors_[s][p];
}

std::set<std::pair<std::string, std::string>> Ontology::subclass_closure() const {
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    for (std::size_t j = 0; j < classes_.size(); ++j) {
      if (ancestors_[i][j]) out.emplace(classes_[i].name, classes_[j].name);
    }
  }
  return out;
}

std::vector<std::string> Ontology::ancestors(std::string_view name) const {
  std::vector<std::string> out;
  std::size_t i = index_of(name);
  if (i == kNpos) return out;
  for (std::size_t j = 0; j < classes_.size(); ++j) {
    if (ancestors_[i][j]) out.push_back(classes_[j].name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::set<std::string> Ontology::classes_of(std::string_view individual) const {
  std::set<std::string> out;
  const Individual* ind = find_individual(individual);
  if (!ind) return out;
  for (const auto& c : ind->classes) {
    for (auto& a : ancestors(c)) out.insert(std::move(a));
  }
  return out;
}

bool Ontology::is_instance(std::string_view individual, std::string_view class_name) const {
  const Individual* ind = find_individual(individual);
  if (!ind) return false;
  return std::any_of(ind->classes.begin(), ind->classes.end(),
                     [&](const std::string& c) { return is_subclass(c, class_name); });
}

std::vector<std::string> Ontology::instances_of(std::string_view class_name) const {
  std::vector<std::string> out;
  for (const auto& [name, ind] : individuals_) {
    if (is_instance(name, class_name)) out.push_back(name);
  }
  return out;
}

bool Ontology::disjoint(std::string_view a, std::string_view b) const {
  std::size_t ia = index_of(a);
  std::size_t ib = index_of(b);
  if (ia == kNpos || ib == kNpos) return false;
  for (std::size_t x = 0; x < classes_.size(); ++x) {
    if (!ancestors_[ia][x]) continue;
    for (const auto& d : classes_[x].disjoint_with) {
      if (ancestors_[ib][index_of(d)]) return true;
    }
  }
  return false;
}

std::vector<std::string> Ontology::unrooted_domain_classes() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].level != ClassLevel::Domain) continue;
    bool rooted = false;
    for (std::size_t j = 0; j < classes_.size() && !rooted; ++j) {
      rooted = ancestors_[i][j] && classes_[j].level == ClassLevel::Upper;
    }
    if (!rooted) out.push_back(classes_[i].name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Ontology::check_assertion(const Assertion& a) const {
  const PropertyDef* prop = find_property(a.property);
  if (!prop) throw Error(Errc::UnknownProperty, fmt::format("unknown property '{}'", a.property));
  if (!find_individual(a.subject)) {
    throw Error(Errc::UnknownSubject, fmt::format("unknown subject '{}'", a.subject));
  }
  bool in_domain = std::any_of(prop->domain.begin(), prop->domain.end(),
                               [&](const std::string& c) { return is_instance(a.subject, c); });
  if (!in_domain) {
    throw Error(Errc::DomainViolation,
                fmt::format("'{}' is not in the domain of '{}'", a.subject, a.property));
  }
  if (prop->is_object()) {
    const auto* ref = std::get_if<IndividualRef>(&a.value);
    if (!ref) {
      throw Error(Errc::RangeViolation,
                  fmt::format("'{}' expects an individual, got {}", a.property, format_value(a.value)));
    }
    if (find_individual(ref->name) && !is_instance(ref->name, prop->range_class)) {
      throw Error(Errc::RangeViolation, fmt::format("'{}' is not a {} (range of '{}')", ref->name,
                                                    prop->range_class, a.property));
    }
  } else if (type_of(a.value) != prop->range_type) {
    throw Error(Errc::RangeViolation,
                fmt::format("'{}' expects {}, got {}", a.property, to_string(prop->range_type),
                            format_value(a.value)));
  }
  if (a.ttl && *a.ttl < 0) {
    throw Error(Errc::NegativeTtl, fmt::format("negative ttl {}", *a.ttl));
  }
  if (!(a.quality >= 0.0 && a.quality <= 1.0)) {
    throw Error(Errc::InvalidQuality, fmt::format("quality {} outside [0,1]", a.quality));
  }
}

Value Ontology::normalize_value(std::string_view property, Value v) const {
  const PropertyDef* prop = find_property(property);
  if (!prop || prop->is_object()) return v;
  if (auto c = coerce(v, prop->range_type)) return *c;
  return v;
}

}  // namespace cas::kb
