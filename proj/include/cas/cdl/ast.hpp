#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cas/value.hpp"

namespace cas::cdl {

// Byte offset plus 1-based line/column of the first character.
struct Span {
  std::size_t offset = 0;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t length = 0;
};

// ---- conditions -----------------------------------------------------------

struct VarPath {
  std::string var;                // without the leading '?'
  std::vector<std::string> path;  // property hops, may be empty
  bool operator==(const VarPath&) const = default;
};

struct Now {
  bool operator==(const Now&) const = default;
};

// A literal, a variable (optionally followed by property hops) or `now`.
struct Term {
  std::variant<Value, VarPath, Now> node;
  bool operator==(const Term&) const = default;
};

struct CompareAtom {
  Term lhs;
  CompareOp op = CompareOp::Eq;
  Term rhs;
  bool operator==(const CompareAtom&) const = default;
};

struct NearAtom {
  Term a;
  Term b;
  double radius_meters = 0.0;
  bool operator==(const NearAtom&) const = default;
};

struct WithinAtom {
  Term interval;
  Term time;
  bool operator==(const WithinAtom&) const = default;
};

using Atom = std::variant<CompareAtom, NearAtom, WithinAtom>;

// Conjunction; empty means `true`.
struct Condition {
  std::vector<Atom> atoms;
  bool operator==(const Condition&) const = default;
};

// ---- composites -----------------------------------------------------------

struct BoolExpr {
  enum class Kind { Ref, And, Or, Not };
  Kind kind = Kind::Ref;
  std::string name;                // Ref
  std::vector<BoolExpr> children;  // And/Or: >= 2, Not: exactly 1
  bool operator==(const BoolExpr&) const = default;

  static BoolExpr ref(std::string n) { return {Kind::Ref, std::move(n), {}}; }
  static BoolExpr negate(BoolExpr e) { return {Kind::Not, {}, {std::move(e)}}; }
  static BoolExpr all(std::vector<BoolExpr> c) { return {Kind::And, {}, std::move(c)}; }
  static BoolExpr any(std::vector<BoolExpr> c) { return {Kind::Or, {}, std::move(c)}; }
};

// ---- adaptations ----------------------------------------------------------

enum class JoinPoint { Selection, PreInvoke, PostInvoke };

struct FilterStep {
  std::string field;
  CompareOp op = CompareOp::Eq;
  Value literal;
  bool operator==(const FilterStep&) const = default;
};
struct SortStep {
  std::string field;
  bool descending = false;
  bool operator==(const SortStep&) const = default;
};
struct LimitStep {
  std::int64_t n = 0;
  bool operator==(const LimitStep&) const = default;
};
struct ProjectStep {
  std::vector<std::string> fields;
  bool operator==(const ProjectStep&) const = default;
};
struct SetStep {
  std::string field;
  Value value;
  bool operator==(const SetStep&) const = default;
};
struct ReduceViewStep {
  std::vector<std::string> fields;
  bool operator==(const ReduceViewStep&) const = default;
};
struct LanguageStep {
  std::string tag;
  bool operator==(const LanguageStep&) const = default;
};

using Step = std::variant<FilterStep, SortStep, LimitStep, ProjectStep, SetStep, ReduceViewStep,
                          LanguageStep>;

// ---- statements -----------------------------------------------------------

struct CardinalitySpec {
  std::uint32_t min = 0;
  std::optional<std::uint32_t> max;
  bool operator==(const CardinalitySpec&) const = default;
};

struct ClassDecl {
  std::string name;
  bool upper = false;
  std::vector<std::string> parents;
  std::vector<std::string> disjoint;
  bool operator==(const ClassDecl&) const = default;
};

struct PropertyDecl {
  std::string name;
  bool object = false;
  std::vector<std::string> domain;
  std::string range;  // class name (object) or datatype tag
  bool functional = false;
  bool symmetric = false;
  bool transitive = false;
  bool part_of = false;
  std::optional<std::string> inverse_of;
  std::optional<CardinalitySpec> cardinality;
  bool operator==(const PropertyDecl&) const = default;
};

struct IndividualDecl {
  std::string name;
  std::vector<std::string> classes;
  bool operator==(const IndividualDecl&) const = default;
};

// ttl: nullopt = not written; inner nullopt = `ttl inf`.
struct AssertDecl {
  std::string subject;
  std::string property;
  Value value;
  std::optional<Instant> at;
  std::optional<std::optional<Duration>> ttl;
  std::optional<std::string> source;
  std::optional<double> quality;
  bool operator==(const AssertDecl&) const = default;
};

struct HeadVar {
  std::string var;
  std::string class_name;
  bool operator==(const HeadVar&) const = default;
};

// `derive ?v.prop = term`: a fact written for every satisfying binding.
struct DeriveTemplate {
  std::string var;
  std::string property;
  Term value;
  bool operator==(const DeriveTemplate&) const = default;
};

struct SituationDecl {
  std::string name;
  std::vector<HeadVar> head;
  Condition condition;
  std::optional<DeriveTemplate> derive;
  bool operator==(const SituationDecl&) const = default;
};

struct CompositeDecl {
  std::string name;
  BoolExpr expr;
  bool operator==(const CompositeDecl&) const = default;
};

struct AdaptationDecl {
  std::string name;
  JoinPoint join_point = JoinPoint::PostInvoke;
  std::vector<Step> steps;
  bool operator==(const AdaptationDecl&) const = default;
};

struct RuleClause {
  std::string when;
  std::vector<std::string> apply;
  bool operator==(const RuleClause&) const = default;
};

struct ServiceDecl {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<std::string> handler;
  bool is_static = false;
  std::optional<Condition> precondition;
  std::optional<Condition> effect;
  std::vector<RuleClause> rules;
  bool operator==(const ServiceDecl&) const = default;
};

struct GoalDecl {
  std::string name;
  std::optional<std::vector<std::string>> inputs;
  std::vector<std::string> outputs;
  std::string related_situation;
  bool operator==(const GoalDecl&) const = default;
};

struct MediatorDecl {
  std::string name;
  std::vector<std::pair<std::string, std::string>> maps;
  bool operator==(const MediatorDecl&) const = default;
};

// Adds a rule to an already declared service.
struct RuleDecl {
  std::string service;
  RuleClause rule;
  bool operator==(const RuleDecl&) const = default;
};

enum class StatementKind {
  Class,
  Property,
  Individual,
  Assert,
  Situation,
  Composite,
  Service,
  Goal,
  Mediator,
  Adaptation,
  Rule
};

using StatementBody = std::variant<ClassDecl, PropertyDecl, IndividualDecl, AssertDecl, SituationDecl,
                             CompositeDecl, ServiceDecl, GoalDecl, MediatorDecl, AdaptationDecl,
                             RuleDecl>;

struct Statement {
  StatementBody body;
  Span span;

  StatementKind kind() const noexcept;
  // Structural: spans are ignored.
  bool operator==(const Statement& other) const { return body == other.body; }
};

struct Document {
  std::vector<Statement> statements;
  std::string source_name;

  bool operator==(const Document& other) const { return statements == other.statements; }
};

std::string_view to_string(StatementKind kind) noexcept;
std::string_view to_string(JoinPoint jp) noexcept;
std::optional<JoinPoint> join_point_from(std::string_view s) noexcept;

// Name of the variable the `?principal` placeholder binds in service
// preconditions and effects.
inline constexpr std::string_view kPrincipalVar = "principal";

}  // namespace cas::cdl
