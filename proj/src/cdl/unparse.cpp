#include "cas/cdl/unparse.hpp"

#include <fmt/format.h>

namespace cas::cdl {

namespace {

constexpr std::string_view kIndent = "    ";

std::string join(const std::vector<std::string>& items, std::string_view sep = ", ") {
  return fmt::format("{}", fmt::join(items, sep));
}

std::string params(const std::vector<std::string>& items) {
  return "(" + join(items) + ")";
}

std::string rule_clause(const RuleClause& r) {
  return fmt::format("when {} apply [{}]", r.when, join(r.apply));
}

// Same-kind nesting and lower-precedence children get parentheses so the
// tree shape survives a round trip.
std::string bool_child(const BoolExpr& child, BoolExpr::Kind parent) {
  using K = BoolExpr::Kind;
  bool bare = child.kind == K::Ref || child.kind == K::Not ||
              (parent == K::Or && child.kind == K::And);
  std::string s = format_bool_expr(child);
  return bare ? s : "(" + s + ")";
}

struct StatementPrinter {
  std::string operator()(const ClassDecl& d) const {
    std::string s = d.upper ? "upper class " + d.name : "class " + d.name;
    if (!d.parents.empty()) s += " < " + join(d.parents);
    if (!d.disjoint.empty()) s += " disjoint " + join(d.disjoint);
    return s;
  }

  std::string operator()(const PropertyDecl& d) const {
    std::string s = fmt::format("{} {} : {} -> {}", d.object ? "objprop" : "dataprop", d.name,
                                join(d.domain, " | "), d.range);
    if (d.functional) s += " functional";
    if (d.symmetric) s += " symmetric";
    if (d.transitive) s += " transitive";
    if (d.part_of) s += " partof";
    if (d.inverse_of) s += " inverseof " + *d.inverse_of;
    if (d.cardinality) {
      s += fmt::format(" card {}..", d.cardinality->min);
      s += d.cardinality->max ? std::to_string(*d.cardinality->max) : "*";
    }
    return s;
  }

  std::string operator()(const IndividualDecl& d) const {
    return fmt::format("individual {} : {}", d.name, join(d.classes));
  }

  std::string operator()(const AssertDecl& d) const {
    std::string s = fmt::format("assert {} {} {}", d.subject, d.property, format_value(d.value));
    if (d.at) s += fmt::format(" at {}", *d.at);
    if (d.ttl) s += *d.ttl ? fmt::format(" ttl {}", **d.ttl) : std::string(" ttl inf");
    if (d.source) s += " source " + *d.source;
    if (d.quality) s += " quality " + format_number(*d.quality);
    return s;
  }

  std::string operator()(const SituationDecl& d) const {
    std::vector<std::string> head;
    for (const auto& h : d.head) head.push_back(fmt::format("?{}: {}", h.var, h.class_name));
    std::string s = fmt::format("situation {}({}) :=", d.name, join(head));
    if (d.condition.atoms.size() <= 1) {
      s += " " + format_condition(d.condition);
    } else {
      for (std::size_t i = 0; i < d.condition.atoms.size(); ++i) {
        s += fmt::format("\n{}{}{}", kIndent, i == 0 ? "" : "and ",
                         format_atom(d.condition.atoms[i]));
      }
    }
    if (d.derive) {
      s += fmt::format("\n{}derive ?{}.{} = {}", kIndent, d.derive->var, d.derive->property,
                       format_term(d.derive->value));
    }
    return s;
  }

  std::string operator()(const CompositeDecl& d) const {
    return fmt::format("composite {} := {}", d.name, format_bool_expr(d.expr));
  }

  std::string operator()(const AdaptationDecl& d) const {
    std::vector<std::string> steps;
    for (const auto& st : d.steps) steps.push_back(format_step(st));
    return fmt::format("adaptation {} at {} := {}", d.name, to_string(d.join_point),
                       join(steps, " | "));
  }

  std::string operator()(const ServiceDecl& d) const {
    std::vector<std::string> clauses;
    std::string io;
    if (!d.inputs.empty()) io = "inputs " + params(d.inputs);
    if (!d.outputs.empty()) io += (io.empty() ? "" : " ") + ("outputs " + params(d.outputs));
    if (!io.empty()) clauses.push_back(io);
    if (d.handler) clauses.push_back("handler " + *d.handler);
    if (d.is_static) clauses.push_back("static");
    if (d.precondition) clauses.push_back("pre " + format_condition(*d.precondition));
    if (d.effect) clauses.push_back("effect " + format_condition(*d.effect));
    for (const auto& r : d.rules) clauses.push_back("rule " + rule_clause(r));
    std::string s = "service " + d.name;
    for (const auto& c : clauses) s += fmt::format("\n{}{}", kIndent, c);
    return s;
  }

  std::string operator()(const GoalDecl& d) const {
    std::string s = "goal " + d.name + " requests";
    if (d.inputs) s += " inputs " + params(*d.inputs);
    return s + fmt::format(" outputs {} relatedTo {}", params(d.outputs), d.related_situation);
  }

  std::string operator()(const MediatorDecl& d) const {
    std::vector<std::string> maps;
    for (const auto& [from, to] : d.maps) maps.push_back(from + " -> " + to);
    return fmt::format("mediator {} maps ({})", d.name, join(maps));
  }

  std::string operator()(const RuleDecl& d) const {
    return fmt::format("rule {} {}", d.service, rule_clause(d.rule));
  }
};

}  // namespace

std::string format_term(const Term& term) {
  if (const auto* vp = std::get_if<VarPath>(&term.node)) {
    std::string s = "?" + vp->var;
    for (const auto& p : vp->path) s += "." + p;
    return s;
  }
  if (std::holds_alternative<Now>(term.node)) return "now";
  return format_value(std::get<Value>(term.node));
}

std::string format_atom(const Atom& atom) {
  if (const auto* c = std::get_if<CompareAtom>(&atom)) {
    return fmt::format("{} {} {}", format_term(c->lhs), to_string(c->op), format_term(c->rhs));
  }
  if (const auto* n = std::get_if<NearAtom>(&atom)) {
    return fmt::format("near({}, {}, {})", format_term(n->a), format_term(n->b),
                       format_number(n->radius_meters));
  }
  const auto& w = std::get<WithinAtom>(atom);
  return fmt::format("within({}, {})", format_term(w.interval), format_term(w.time));
}

std::string format_condition(const Condition& condition) {
  if (condition.atoms.empty()) return "true";
  std::vector<std::string> atoms;
  for (const auto& a : condition.atoms) atoms.push_back(format_atom(a));
  return join(atoms, " and ");
}

std::string format_bool_expr(const BoolExpr& expr) {
  using K = BoolExpr::Kind;
  switch (expr.kind) {
    case K::Ref: return expr.name;
    case K::Not: return "not " + bool_child(expr.children.front(), K::Not);
    case K::And:
    case K::Or: {
      std::vector<std::string> parts;
      for (const auto& c : expr.children) parts.push_back(bool_child(c, expr.kind));
      return join(parts, expr.kind == K::And ? " and " : " or ");
    }
  }
  return {};
}

std::string format_step(const Step& step) {
  struct Printer {
    std::string operator()(const FilterStep& s) const {
      return fmt::format("filter {} {} {}", s.field, to_string(s.op), format_value(s.literal));
    }
    std::string operator()(const SortStep& s) const {
      return fmt::format("sortby {} {}", s.field, s.descending ? "desc" : "asc");
    }
    std::string operator()(const LimitStep& s) const { return fmt::format("limit {}", s.n); }
    std::string operator()(const ProjectStep& s) const { return "project " + join(s.fields); }
    std::string operator()(const SetStep& s) const {
      return fmt::format("set {} = {}", s.field, format_value(s.value));
    }
    std::string operator()(const ReduceViewStep& s) const {
      return "reduce_view " + join(s.fields);
    }
    std::string operator()(const LanguageStep& s) const {
      return "language " + format_value(Value{s.tag});
    }
  };
  return std::visit(Printer{}, step);
}

std::string unparse(const Statement& statement) {
  return std::visit(StatementPrinter{}, statement.body) + " .";
}

std::string unparse(const Document& doc) {
  std::string out;
  for (const auto& s : doc.statements) {
    out += unparse(s);
    out += '\n';
  }
  return out;
}

}  // namespace cas::cdl
