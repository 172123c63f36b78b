#include "cas/cdl/ast.hpp"

#include <fmt/core.h>

#include "cas/cdl/diagnostic.hpp"

namespace cas::cdl {

StatementKind Statement::kind() const noexcept {
  struct Visitor {
    StatementKind operator()(const ClassDecl&) const { return StatementKind::Class; }
    StatementKind operator()(const PropertyDecl&) const { return StatementKind::Property; }
    StatementKind operator()(const IndividualDecl&) const { return StatementKind::Individual; }
    StatementKind operator()(const AssertDecl&) const { return StatementKind::Assert; }
    StatementKind operator()(const SituationDecl&) const { return StatementKind::Situation; }
    StatementKind operator()(const CompositeDecl&) const { return StatementKind::Composite; }
    StatementKind operator()(const ServiceDecl&) const { return StatementKind::Service; }
    StatementKind operator()(const GoalDecl&) const { return StatementKind::Goal; }
    StatementKind operator()(const MediatorDecl&) const { return StatementKind::Mediator; }
    StatementKind operator()(const AdaptationDecl&) const { return StatementKind::Adaptation; }
    StatementKind operator()(const RuleDecl&) const { return StatementKind::Rule; }
  };
  return std::visit(Visitor{}, body);
}

std::string_view to_string(StatementKind kind) noexcept {
  switch (kind) {
    case StatementKind::Class: return "Class";
    case StatementKind::Property: return "Property";
    case StatementKind::Individual: return "Individual";
    case StatementKind::Assert: return "Assert";
    case StatementKind::Situation: return "Situation";
    case StatementKind::Composite: return "Composite";
    case StatementKind::Service: return "Service";
    case StatementKind::Goal: return "Goal";
    case StatementKind::Mediator: return "Mediator";
    case StatementKind::Adaptation: return "Adaptation";
    case StatementKind::Rule: return "Rule";
  }
  return "?";
}

std::string_view to_string(JoinPoint jp) noexcept {
  switch (jp) {
    case JoinPoint::Selection: return "Selection";
    case JoinPoint::PreInvoke: return "PreInvoke";
    case JoinPoint::PostInvoke: return "PostInvoke";
  }
  return "?";
}

std::optional<JoinPoint> join_point_from(std::string_view s) noexcept {
  if (s == "Selection") return JoinPoint::Selection;
  if (s == "PreInvoke") return JoinPoint::PreInvoke;
  if (s == "PostInvoke") return JoinPoint::PostInvoke;
  return std::nullopt;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) return true;
  }
  return false;
}

std::string format_diagnostic(const Diagnostic& d, std::string_view source_name) {
  return fmt::format("{}:{}:{}: {}[{}]: {}", source_name, d.span.line, d.span.col,
                     d.severity == Severity::Error ? "error" : "warning", d.code, d.message);
}

}  // namespace cas::cdl
