#include <algorithm>

#include <fmt/core.h>

#include "cas/cdl/environment.hpp"
#include "cas/error.hpp"

namespace cas::cdl {

bool Environment::has_situation(std::string_view name) const {
  std::string n(name);
  return situations.count(n) || composites.count(n);
}

NameScope Environment::scope() const {
  NameScope s;
  for (const auto& c : ontology.classes()) s.classes.insert(c.name);
  for (const auto& [name, _] : ontology.properties()) s.properties.insert(name);
  for (const auto& [name, _] : ontology.individuals()) s.individuals.insert(name);
  for (const auto& [name, _] : situations) s.situations.insert(name);
  for (const auto& [name, _] : composites) s.situations.insert(name);
  for (const auto& [name, _] : adaptations) s.adaptations.insert(name);
  for (const auto& [name, _] : services) s.services.insert(name);
  for (const auto& [name, _] : goals) s.goals.insert(name);
  for (const auto& [name, _] : mediators) s.mediators.insert(name);
  return s;
}

kb::ClassDef to_class_def(const ClassDecl& d) {
  kb::ClassDef c;
  c.name = d.name;
  c.parents = {d.parents.begin(), d.parents.end()};
  c.disjoint_with = {d.disjoint.begin(), d.disjoint.end()};
  c.level = d.upper ? kb::ClassLevel::Upper : kb::ClassLevel::Domain;
  return c;
}

kb::PropertyDef to_property_def(const PropertyDecl& d) {
  kb::PropertyDef p;
  p.name = d.name;
  p.kind = d.object ? kb::PropertyKind::Object : kb::PropertyKind::Datatype;
  p.domain = {d.domain.begin(), d.domain.end()};
  if (d.object) {
    p.range_class = d.range;
  } else if (auto t = datatype_from_tag(d.range)) {
    p.range_type = *t;
  }
  p.functional = d.functional;
  p.symmetric = d.symmetric;
  p.transitive = d.transitive;
  p.part_of = d.part_of;
  p.inverse_of = d.inverse_of;
  if (d.cardinality) p.cardinality = kb::Cardinality{d.cardinality->min, d.cardinality->max};
  return p;
}

kb::Individual to_individual(const IndividualDecl& d) {
  return kb::Individual{d.name, {d.classes.begin(), d.classes.end()}};
}

kb::Assertion to_assertion(const AssertDecl& d, const kb::Ontology& ontology) {
  kb::Assertion a;
  a.subject = d.subject;
  a.property = d.property;
  a.value = ontology.normalize_value(d.property, d.value);
  a.timestamp = d.at.value_or(0);
  a.ttl = d.ttl.value_or(std::nullopt);
  a.source = d.source.value_or("cdl");
  a.quality = d.quality.value_or(1.0);
  return a;
}

namespace {

// Static type of a term. class_name is set for individuals whose class is
// known from the head or a property range.
struct TermType {
  ValueType type;
  std::string class_name;
};

bool numeric(ValueType t) { return t == ValueType::Int || t == ValueType::Float; }

class Validator {
 public:
  Validator(Environment& env, std::vector<Diagnostic>& diags) : env_(env), diags_(diags) {}

  void run(const Document& doc) {
    for (const auto& st : doc.statements) {
      span_ = st.span;
      std::visit([this](const auto& d) { check(d); }, st.body);
    }
    finish();
  }

 private:
  std::size_t error_count() const {
    return static_cast<std::size_t>(std::count_if(diags_.begin(), diags_.end(), [](const auto& d) {
      return d.severity == Severity::Error;
    }));
  }

  void error(std::string code, std::string message) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(code), std::move(message), span_});
  }
  void warning(std::string code, std::string message) {
    diags_.push_back(Diagnostic{Severity::Warning, std::move(code), std::move(message), span_});
  }
  void error(const Error& e) { error(std::string(to_string(e.code())), e.detail()); }

  template <typename F>
  bool guarded(F&& f) {
    try {
      f();
      return true;
    } catch (const Error& e) {
      error(e);
      return false;
    }
  }

  // ---- schema -------------------------------------------------------------

  void check(const ClassDecl& d) {
    if (!guarded([&] { env_.ontology.define_class(to_class_def(d)); })) return;
    declared_classes_.emplace_back(d.name, span_);
  }

  void check(const PropertyDecl& d) {
    if (!d.object && !is_datatype_tag(d.range)) {
      error("UnknownDatatype", fmt::format("unknown datatype '{}'", d.range));
      return;
    }
    if (d.object && is_datatype_tag(d.range)) {
      error("InvalidProperty", fmt::format("object property '{}' needs a class range", d.name));
      return;
    }
    if (!d.object && (d.symmetric || d.transitive || d.part_of || d.inverse_of)) {
      error("InvalidProperty",
            fmt::format("'{}': symmetric, transitive, partof and inverseof need an object property",
                        d.name));
      return;
    }
    guarded([&] { env_.ontology.define_property(to_property_def(d)); });
  }

  void check(const IndividualDecl& d) {
    guarded([&] { env_.ontology.define_individual(to_individual(d)); });
    for (std::size_t i = 0; i < d.classes.size(); ++i) {
      for (std::size_t j = i + 1; j < d.classes.size(); ++j) {
        if (env_.ontology.disjoint(d.classes[i], d.classes[j])) {
          error("Disjointness", fmt::format("'{}' is declared in disjoint classes {} and {}",
                                            d.name, d.classes[i], d.classes[j]));
        }
      }
    }
  }

  void check(const AssertDecl& d) {
    if (d.at && *d.at < 0) {
      error("InvalidArgument", "assertion time must be non-negative");
      return;
    }
    guarded([&] { env_.ontology.check_assertion(to_assertion(d, env_.ontology)); });
  }

  // ---- situations ---------------------------------------------------------

  bool compatible(const std::string& cls, const kb::PropertyDef& p) const {
    return std::any_of(p.domain.begin(), p.domain.end(), [&](const std::string& dom) {
      return env_.ontology.is_subclass(cls, dom) || env_.ontology.is_subclass(dom, cls);
    });
  }

  std::optional<TermType> type_of_term(const Term& t) {
    if (std::holds_alternative<Now>(t.node)) return TermType{ValueType::Int, {}};
    if (const auto* v = std::get_if<Value>(&t.node)) {
      if (const auto* ref = std::get_if<IndividualRef>(v)) {
        const kb::Individual* ind = env_.ontology.find_individual(ref->name);
        if (!ind) {
          error("UnknownIndividual", fmt::format("unknown individual '{}'", ref->name));
          return std::nullopt;
        }
        return TermType{ValueType::Individual, {}};
      }
      return TermType{cas::type_of(*v), {}};
    }
    const auto& vp = std::get<VarPath>(t.node);
    auto it = vars_.find(vp.var);
    if (it == vars_.end()) {
      error("UnknownVariable", fmt::format("variable '?{}' is not declared", vp.var));
      return std::nullopt;
    }
    TermType cur{ValueType::Individual, it->second};
    std::string where = "?" + vp.var;
    for (const auto& hop : vp.path) {
      if (cur.type != ValueType::Individual) {
        error("InvalidPath", fmt::format("'{}' is a {} and has no property '{}'", where,
                                         to_string(cur.type), hop));
        return std::nullopt;
      }
      const kb::PropertyDef* p = env_.ontology.find_property(hop);
      if (!p) {
        error("UnknownProperty", fmt::format("unknown property '{}'", hop));
        return std::nullopt;
      }
      if (!cur.class_name.empty() && !compatible(cur.class_name, *p)) {
        error("DomainViolation",
              fmt::format("'{}' ({}) is outside the domain of '{}'", where, cur.class_name, hop));
        return std::nullopt;
      }
      cur = p->is_object() ? TermType{ValueType::Individual, p->range_class}
                           : TermType{p->range_type, {}};
      where += "." + hop;
    }
    return cur;
  }

  void check_atom(const Atom& atom) {
    if (const auto* c = std::get_if<CompareAtom>(&atom)) {
      auto l = type_of_term(c->lhs);
      auto r = type_of_term(c->rhs);
      if (!l || !r) return;
      bool same = l->type == r->type || (numeric(l->type) && numeric(r->type));
      if (!same) {
        error("TypeMismatch", fmt::format("cannot compare {} with {}", to_string(l->type),
                                          to_string(r->type)));
        return;
      }
      bool ordering = c->op != CompareOp::Eq && c->op != CompareOp::Ne;
      if (ordering && !numeric(l->type) && l->type != ValueType::String) {
        error("TypeMismatch",
              fmt::format("'{}' is not defined on {}", to_string(c->op), to_string(l->type)));
      }
      return;
    }
    if (const auto* n = std::get_if<NearAtom>(&atom)) {
      for (const Term* t : {&n->a, &n->b}) {
        auto ty = type_of_term(*t);
        if (ty && ty->type != ValueType::GeoPoint) {
          error("TypeMismatch", fmt::format("near expects geopoints, got {}", to_string(ty->type)));
        }
      }
      if (!(n->radius_meters >= 0)) error("InvalidLiteral", "near radius must be non-negative");
      return;
    }
    const auto& w = std::get<WithinAtom>(atom);
    auto iv = type_of_term(w.interval);
    if (iv && iv->type != ValueType::TimeInterval) {
      error("TypeMismatch",
            fmt::format("within expects a timeinterval, got {}", to_string(iv->type)));
    }
    auto tm = type_of_term(w.time);
    if (tm && tm->type != ValueType::Int) {
      error("TypeMismatch", fmt::format("within expects an instant, got {}", to_string(tm->type)));
    }
  }

  void check_condition(const Condition& c) {
    for (const auto& a : c.atoms) check_atom(a);
  }

  bool name_free(const std::string& name) {
    if (env_.has_situation(name)) {
      error("DuplicateName", fmt::format("situation '{}' is already declared", name));
      return false;
    }
    return true;
  }

  void check(const SituationDecl& d) {
    std::size_t before = error_count();
    name_free(d.name);
    vars_.clear();
    for (const auto& h : d.head) {
      if (!env_.ontology.has_class(h.class_name)) {
        error("UnknownClass", fmt::format("unknown class '{}'", h.class_name));
      }
      if (!vars_.emplace(h.var, h.class_name).second) {
        error("DuplicateName", fmt::format("variable '?{}' declared twice", h.var));
      }
    }
    check_condition(d.condition);
    if (d.derive) check_derive(*d.derive);
    vars_.clear();
    if (error_count() == before) env_.situations.emplace(d.name, d);
  }

  void check_derive(const DeriveTemplate& t) {
    auto it = vars_.find(t.var);
    if (it == vars_.end()) {
      error("UnknownVariable", fmt::format("variable '?{}' is not declared", t.var));
      return;
    }
    const kb::PropertyDef* p = env_.ontology.find_property(t.property);
    if (!p) {
      error("UnknownProperty", fmt::format("unknown property '{}'", t.property));
      return;
    }
    if (!compatible(it->second, *p)) {
      error("DomainViolation", fmt::format("?{} ({}) is outside the domain of '{}'", t.var,
                                           it->second, t.property));
    }
    // Conflict resolution among derived facts would depend on evaluation
    // order.
    if (p->functional || (p->cardinality && p->cardinality->max)) {
      error("InvalidDerive", fmt::format("cannot derive into '{}': it has a bounded cardinality",
                                         t.property));
    }
    auto ty = type_of_term(t.value);
    if (!ty) return;
    bool ok = p->is_object() ? ty->type == ValueType::Individual
                             : (ty->type == p->range_type ||
                                (p->range_type == ValueType::Float && ty->type == ValueType::Int));
    if (!ok) {
      error("TypeMismatch", fmt::format("cannot derive a {} into '{}'", to_string(ty->type),
                                        t.property));
    }
  }

  void check_expr_refs(const BoolExpr& e) {
    if (e.kind == BoolExpr::Kind::Ref) {
      if (!env_.has_situation(e.name)) {
        error("UnknownSituation", fmt::format("unknown situation '{}'", e.name));
      }
      return;
    }
    std::size_t want_min = e.kind == BoolExpr::Kind::Not ? 1 : 2;
    if (e.children.size() < want_min ||
        (e.kind == BoolExpr::Kind::Not && e.children.size() != 1)) {
      error("InvalidExpression", "malformed boolean expression");
    }
    for (const auto& c : e.children) check_expr_refs(c);
  }

  void check(const CompositeDecl& d) {
    std::size_t before = error_count();
    name_free(d.name);
    check_expr_refs(d.expr);
    if (error_count() == before) env_.composites.emplace(d.name, d);
  }

  // ---- adaptations and services -------------------------------------------

  void check(const AdaptationDecl& d) {
    std::size_t before = error_count();
    if (env_.adaptations.count(d.name)) {
      error("DuplicateName", fmt::format("adaptation '{}' is already declared", d.name));
    }
    if (d.steps.empty()) error("InvalidAdaptation", "an adaptation needs at least one step");
    for (const auto& s : d.steps) {
      if (const auto* l = std::get_if<LimitStep>(&s); l && l->n < 0) {
        error("InvalidLimit", "limit must be non-negative");
      }
      if (const auto* p = std::get_if<ProjectStep>(&s); p && p->fields.empty()) {
        error("InvalidAdaptation", "project needs at least one field");
      }
      if (const auto* r = std::get_if<ReduceViewStep>(&s); r && r->fields.empty()) {
        error("InvalidAdaptation", "reduce_view needs at least one field");
      }
      if (const auto* g = std::get_if<LanguageStep>(&s); g && g->tag.empty()) {
        error("InvalidAdaptation", "language tag must not be empty");
      }
    }
    if (error_count() == before) env_.adaptations.emplace(d.name, d);
  }

  void check_params(const std::vector<std::string>& params) {
    for (const auto& p : params) {
      if (!is_datatype_tag(p) && !env_.ontology.has_class(p)) {
        error("UnknownClass", fmt::format("unknown class '{}'", p));
      }
    }
  }

  void check_rule(const RuleClause& r) {
    if (!env_.has_situation(r.when)) {
      error("UnknownSituation", fmt::format("unknown situation '{}'", r.when));
    }
    for (const auto& a : r.apply) {
      if (!env_.adaptations.count(a)) {
        error("UnknownAdaptation", fmt::format("unknown adaptation '{}'", a));
      }
    }
  }

  void check(const ServiceDecl& d) {
    std::size_t before = error_count();
    if (env_.services.count(d.name)) {
      error("DuplicateName", fmt::format("service '{}' is already declared", d.name));
    }
    check_params(d.inputs);
    check_params(d.outputs);
    vars_ = {{std::string(kPrincipalVar), "User"}};
    if (d.precondition) check_condition(*d.precondition);
    if (d.effect) check_condition(*d.effect);
    vars_.clear();
    for (const auto& r : d.rules) check_rule(r);
    if (error_count() == before) {
      env_.services.emplace(d.name, d);
      pending_services_.emplace_back(d.name, span_);
    }
  }

  void check(const RuleDecl& d) {
    std::size_t before = error_count();
    auto it = env_.services.find(d.service);
    if (it == env_.services.end()) {
      error("UnknownService", fmt::format("unknown service '{}'", d.service));
    }
    check_rule(d.rule);
    if (error_count() == before) it->second.rules.push_back(d.rule);
  }

  void check(const GoalDecl& d) {
    std::size_t before = error_count();
    if (env_.goals.count(d.name)) {
      error("DuplicateName", fmt::format("goal '{}' is already declared", d.name));
    }
    if (!env_.has_situation(d.related_situation)) {
      error("UnknownSituation", fmt::format("unknown situation '{}'", d.related_situation));
    }
    if (error_count() == before) {
      env_.goals.emplace(d.name, d);
      pending_goals_.emplace_back(d.name, span_);
    }
  }

  void check(const MediatorDecl& d) {
    std::size_t before = error_count();
    if (env_.mediators.count(d.name)) {
      error("DuplicateName", fmt::format("mediator '{}' is already declared", d.name));
    }
    std::set<std::string> sources, targets;
    for (const auto& [from, to] : d.maps) {
      if (!env_.ontology.has_class(to)) {
        error("UnknownClass", fmt::format("unknown class '{}'", to));
      }
      if (!sources.insert(from).second) {
        error("InvalidMediator", fmt::format("'{}' is mapped twice", from));
      }
      if (!targets.insert(to).second) {
        error("NonInjectiveMediator", fmt::format("two concepts map onto '{}'", to));
      }
    }
    if (error_count() == before) env_.mediators.emplace(d.name, d);
  }

  bool concept_resolves(const std::string& c) const {
    if (is_datatype_tag(c) || env_.ontology.has_class(c)) return true;
    for (const auto& [_, m] : env_.mediators) {
      for (const auto& [from, to] : m.maps) {
        if (from == c) return true;
      }
    }
    return false;
  }

  // Checks that can only be decided once the whole document is in: standalone
  // rules may follow their service and mediators may follow goals.
  void finish() {
    for (const auto& [name, span] : pending_services_) {
      span_ = span;
      const ServiceDecl& s = env_.services.at(name);
      if (s.rules.empty() && !s.is_static) {
        error("MissingAdaptation",
              fmt::format("service '{}' has no adaptation rule and is not static", name));
      }
    }
    for (const auto& [name, span] : pending_goals_) {
      span_ = span;
      const GoalDecl& g = env_.goals.at(name);
      std::vector<std::string> concepts = g.outputs;
      if (g.inputs) concepts.insert(concepts.end(), g.inputs->begin(), g.inputs->end());
      for (const auto& c : concepts) {
        if (!concept_resolves(c)) {
          warning("UnresolvedConcept",
                  fmt::format("goal '{}': '{}' is neither a class nor mediated", name, c));
        }
      }
    }
    const auto unrooted = env_.ontology.unrooted_domain_classes();
    for (const auto& [c, span] : declared_classes_) {
      if (std::find(unrooted.begin(), unrooted.end(), c) != unrooted.end()) {
        span_ = span;
        warning("UnrootedClass", fmt::format("class '{}' does not specialize an upper class", c));
      }
    }
  }

  Environment& env_;
  std::vector<Diagnostic>& diags_;
  Span span_;
  std::map<std::string, std::string> vars_;
  std::vector<std::pair<std::string, Span>> pending_services_;
  std::vector<std::pair<std::string, Span>> pending_goals_;
  std::vector<std::pair<std::string, Span>> declared_classes_;
};

}  // namespace

std::vector<Diagnostic> validate(const Document& doc, Environment& env) {
  std::vector<Diagnostic> diags;
  Validator(env, diags).run(doc);
  return diags;
}

}  // namespace cas::cdl
