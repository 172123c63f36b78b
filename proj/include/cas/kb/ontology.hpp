#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cas/kb/assertion.hpp"
#include "cas/value.hpp"

namespace cas::kb {

enum class ClassLevel { Upper, Domain };

struct ClassDef {
  std::string name;
  std::set<std::string> parents;
  std::set<std::string> disjoint_with;
  ClassLevel level = ClassLevel::Domain;

  bool operator==(const ClassDef&) const = default;
};

enum class PropertyKind { Object, Datatype };

struct Cardinality {
  std::uint32_t min = 0;
  std::optional<std::uint32_t> max;  // nullopt: unbounded
  bool operator==(const Cardinality&) const = default;
};

struct PropertyDef {
  std::string name;
  PropertyKind kind = PropertyKind::Datatype;
  // A subject must be an instance of at least one of these classes.
  std::set<std::string> domain;
  std::string range_class;                     // Object properties
  ValueType range_type = ValueType::String;    // Datatype properties
  bool functional = false;
  bool symmetric = false;
  bool transitive = false;
  bool part_of = false;  // implies transitive
  std::optional<std::string> inverse_of;
  std::optional<Cardinality> cardinality;

  bool is_object() const { return kind == PropertyKind::Object; }
  bool closes_transitively() const { return transitive || part_of; }
  bool operator==(const PropertyDef&) const = default;
};

struct Individual {
  std::string name;
  std::set<std::string> classes;
  bool operator==(const Individual&) const = default;
};

inline constexpr std::string_view kUpperClasses[] = {"User", "Service", "Activity", "Device",
                                                     "Environment"};

// Class hierarchy, property declarations and individuals. Subclass closure is
// maintained eagerly, so every query is a table lookup.
class Ontology {
 public:
  // The five upper classes, nothing else.
  static Ontology standard_prelude();

  std::uint64_t define_class(ClassDef def);
  std::uint64_t add_subclass_edge(const std::string& sub, const std::string& super);
  std::uint64_t define_property(PropertyDef def);
  std::uint64_t define_individual(Individual ind);

  std::uint64_t revision() const noexcept { return revision_; }

  bool has_class(std::string_view name) const;
  const ClassDef* find_class(std::string_view name) const;
  const PropertyDef* find_property(std::string_view name) const;
  const Individual* find_individual(std::string_view name) const;

  const std::vector<ClassDef>& classes() const noexcept { return classes_; }
  const std::map<std::string, PropertyDef, std::less<>>& properties() const noexcept {
    return properties_;
  }
  const std::map<std::string, Individual, std::less<>>& individuals() const noexcept {
    return individuals_;
  }

  // Reflexive. False if either class is unknown.
  bool is_subclass(std::string_view sub, std::string_view super) const;
  // Reflexive-transitive closure of the declared parent relation.
  std::set<std::pair<std::string, std::string>> subclass_closure() const;
  std::vector<std::string> ancestors(std::string_view name) const;

  // Declared classes of an individual plus all their ancestors.
  std::set<std::string> classes_of(std::string_view individual) const;
  bool is_instance(std::string_view individual, std::string_view class_name) const;
  // Sorted by name.
  std::vector<std::string> instances_of(std::string_view class_name) const;

  // Two classes clash if some ancestor of one is declared disjoint with some
  // ancestor of the other.
  bool disjoint(std::string_view a, std::string_view b) const;

  // Domain-level classes that reach no Upper-level class.
  std::vector<std::string> unrooted_domain_classes() const;

  // Schema conformance of a fact (subject, property, range, ttl, quality).
  // Object values naming an individual that does not exist are accepted here
  // and reported later as dangling references.
  void check_assertion(const Assertion& a) const;

  // Coerces a literal to the declared range type of a datatype property
  // (int to float and back when lossless, "true"/"false" to bool). Values
  // that cannot be coerced, and values of unknown or object properties, are
  // returned unchanged for check_assertion to reject.
  Value normalize_value(std::string_view property, Value v) const;

 private:
  std::size_t index_of(std::string_view name) const;

  std::vector<ClassDef> classes_;
  std::unordered_map<std::string, std::size_t> class_index_;
  // ancestors_[i][j] == true iff classes_[i] is a subclass of classes_[j].
  std::vector<std::vector<bool>> ancestors_;
  std::map<std::string, PropertyDef, std::less<>> properties_;
  std::map<std::string, Individual, std::less<>> individuals_;
  std::uint64_t revision_ = 0;
};

}  // namespace cas::kb
