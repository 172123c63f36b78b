#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cas/cdl/ast.hpp"
#include "cas/cdl/diagnostic.hpp"
#include "cas/cdl/parser.hpp"
#include "cas/kb/assertion.hpp"
#include "cas/kb/ontology.hpp"

namespace cas::cdl {

// Everything a document may refer to: the schema plus the non-schema
// declarations accepted so far.
struct Environment {
  kb::Ontology ontology;
  std::map<std::string, SituationDecl> situations;
  std::map<std::string, CompositeDecl> composites;
  std::map<std::string, AdaptationDecl> adaptations;
  // Standalone `rule` statements are folded into their service.
  std::map<std::string, ServiceDecl> services;
  std::map<std::string, GoalDecl> goals;
  std::map<std::string, MediatorDecl> mediators;

  bool has_situation(std::string_view name) const;
  NameScope scope() const;
};

// Declaration to schema conversions. Unknown names are the caller's problem
// (the ontology rejects them when the result is defined).
kb::ClassDef to_class_def(const ClassDecl& d);
kb::PropertyDef to_property_def(const PropertyDecl& d);
kb::Individual to_individual(const IndividualDecl& d);
// Defaults: at 0, unbounded ttl, source "cdl", quality 1. The value is
// normalized against the property range.
kb::Assertion to_assertion(const AssertDecl& d, const kb::Ontology& ontology);

// Semantic checks of a parsed document against `env`: name resolution, atom
// typing, schema sanity, service/goal/mediator well-formedness. Statements
// that pass are added to `env`, so later statements see them.
std::vector<Diagnostic> validate(const Document& doc, Environment& env);

}  // namespace cas::cdl
