#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cas/cdl/ast.hpp"
#include "cas/cdl/diagnostic.hpp"

namespace cas::cdl {

// Names visible to a document, per namespace. Parsing enforces
// declare-before-use against this scope.
struct NameScope {
  std::set<std::string, std::less<>> classes;
  std::set<std::string, std::less<>> properties;
  std::set<std::string, std::less<>> individuals;
  std::set<std::string, std::less<>> situations;  // simple and composite
  std::set<std::string, std::less<>> adaptations;
  std::set<std::string, std::less<>> services;
  std::set<std::string, std::less<>> goals;
  std::set<std::string, std::less<>> mediators;

  // The five upper classes.
  static NameScope standard_prelude();

  void declare(const Statement& statement);
  void declare(const Document& document);
};

struct ParseOptions {
  std::string source_name = "<input>";
  // Names declared by previously loaded documents. nullptr: empty scope.
  const NameScope* scope = nullptr;
};

struct ParseResult {
  std::optional<Document> document;  // absent whenever an Error was reported
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return document.has_value(); }
};

// Pure function of (text, options). Recovers at each statement terminator so
// several errors can be reported in one pass.
ParseResult parse(std::string_view text, const ParseOptions& options = {});

// Standalone fragments used by the scenario and payload formats. Identifiers
// are not resolved. All throw cas::Error(ParseError) on malformed input.

// A single literal: `true`, `42`, `1.5`, `"s"`, `(lat, lon)`,
// `interval(08:00, 20:00)` or a bare identifier (individual reference).
Value parse_literal(std::string_view text);

// `subject property literal [ttl N|inf] [source S] [quality Q]` with no
// terminator; `at` is not accepted here.
AssertDecl parse_fact(std::string_view text);

// `{field=literal, ...}`
std::map<std::string, Value> parse_record(std::string_view text);

}  // namespace cas::cdl
