#include "cas/situation/engine.hpp"

#include <algorithm>
#include <functional>

#include <fmt/core.h>

#include "cas/cdl/unparse.hpp"
#include "cas/error.hpp"

namespace cas::situation {

// ---- program --------------------------------------------------------------

bool Program::contains(const std::string& name) const {
  return simple_.count(name) || composites_.count(name);
}

void Program::add(SituationDef def) {
  if (contains(def.name)) {
    throw Error(Errc::DuplicateName, fmt::format("situation '{}' is already defined", def.name));
  }
  std::string name = def.name;
  simple_.emplace(std::move(name), std::move(def));
}

void Program::add(CompositeDef def) {
  if (contains(def.name)) {
    throw Error(Errc::DuplicateName, fmt::format("situation '{}' is already defined", def.name));
  }
  std::string name = def.name;
  composites_.emplace(std::move(name), std::move(def));
}

// ---- stratification -------------------------------------------------------

namespace {

void collect_reads(const cdl::Term& t, std::set<std::string>& out) {
  if (const auto* vp = std::get_if<cdl::VarPath>(&t.node)) out.insert(vp->path.begin(), vp->path.end());
}

std::set<std::string> reads_of(const SituationDef& d) {
  std::set<std::string> out;
  for (const auto& atom : d.condition.atoms) {
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, cdl::CompareAtom>) {
            collect_reads(a.lhs, out);
            collect_reads(a.rhs, out);
          } else if constexpr (std::is_same_v<T, cdl::NearAtom>) {
            collect_reads(a.a, out);
            collect_reads(a.b, out);
          } else {
            collect_reads(a.interval, out);
            collect_reads(a.time, out);
          }
        },
        atom);
  }
  if (d.derive) collect_reads(d.derive->value, out);
  return out;
}

std::set<std::string> writes_of(const SituationDef& d, const kb::Ontology* ontology) {
  std::set<std::string> out;
  if (!d.derive) return out;
  out.insert(d.derive->property);
  if (ontology) {
    if (const auto* p = ontology->find_property(d.derive->property); p && p->inverse_of) {
      out.insert(*p->inverse_of);
    }
  }
  return out;
}

// (referenced name, reached under a `not`)
void collect_refs(const cdl::BoolExpr& e, bool negated,
                  std::vector<std::pair<std::string, bool>>& out) {
  if (e.kind == cdl::BoolExpr::Kind::Ref) {
    out.emplace_back(e.name, negated);
    return;
  }
  bool under_not = negated || e.kind == cdl::BoolExpr::Kind::Not;
  for (const auto& c : e.children) collect_refs(c, under_not, out);
}

// Layers for simple situations: longest path over the condensation of the
// writer -> reader graph.
std::map<std::string, std::size_t> simple_layers(const Program& program,
                                                 const kb::Ontology* ontology) {
  std::vector<std::string> names;
  std::vector<std::set<std::string>> reads, writes;
  for (const auto& [name, def] : program.simple()) {
    names.push_back(name);
    reads.push_back(reads_of(def));
    writes.push_back(writes_of(def, ontology));
  }
  const std::size_t n = names.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t w = 0; w < n; ++w) {
    for (std::size_t r = 0; r < n; ++r) {
      bool hit = std::any_of(writes[w].begin(), writes[w].end(),
                             [&](const std::string& p) { return reads[r].count(p) > 0; });
      if (hit) succ[w].push_back(r);
    }
  }

  // Tarjan.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  int counter = 0, ncomp = 0;
  std::function<void(std::size_t)> strong = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : succ[v]) {
      if (index[w] < 0) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      while (true) {
        std::size_t w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
        if (w == v) break;
      }
      ++ncomp;
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) strong(v);
  }

  // Tarjan numbers components in reverse topological order.
  std::vector<std::size_t> comp_layer(static_cast<std::size_t>(ncomp), 0);
  for (int c = ncomp - 1; c >= 0; --c) {
    for (std::size_t v = 0; v < n; ++v) {
      if (comp[v] != c) continue;
      for (std::size_t w : succ[v]) {
        if (comp[w] == c) continue;
        auto& target = comp_layer[static_cast<std::size_t>(comp[w])];
        target = std::max(target, comp_layer[static_cast<std::size_t>(c)] + 1);
      }
    }
  }
  std::map<std::string, std::size_t> out;
  for (std::size_t v = 0; v < n; ++v) {
    out[names[v]] = comp_layer[static_cast<std::size_t>(comp[v])];
  }
  return out;
}

}  // namespace

Strata stratify(const Program& program, const kb::Ontology* ontology) {
  Strata st;
  st.layer_of = simple_layers(program, ontology);

  enum class Mark { None, Active, Done };
  std::map<std::string, Mark> mark;
  // Path of (composite, edge into the next path element is negated).
  std::vector<std::pair<std::string, bool>> path;

  std::function<std::size_t(const std::string&)> visit = [&](const std::string& name) {
    if (auto it = st.layer_of.find(name); it != st.layer_of.end()) return it->second;
    auto cit = program.composites().find(name);
    if (cit == program.composites().end()) {
      throw Error(Errc::UnknownSituation, fmt::format("unknown situation '{}'", name));
    }
    mark[name] = Mark::Active;
    std::vector<std::pair<std::string, bool>> refs;
    collect_refs(cit->second.expr, false, refs);
    std::size_t layer = 0;
    for (const auto& [ref, negated] : refs) {
      if (mark[ref] == Mark::Active) {
        auto start = std::find_if(path.begin(), path.end(),
                                  [&](const auto& p) { return p.first == ref; });
        bool through_not = negated;
        std::vector<std::string> cycle;
        for (auto it = start; it != path.end(); ++it) {
          through_not = through_not || it->second;
          cycle.push_back(it->first);
        }
        cycle.push_back(name);
        cycle.push_back(ref);
        std::string text;
        for (std::size_t i = 0; i < cycle.size(); ++i) text += (i ? " -> " : "") + cycle[i];
        throw Error(through_not ? Errc::NegationCycle : Errc::CyclicComposite, text);
      }
      path.emplace_back(name, negated);
      layer = std::max(layer, visit(ref) + 1);
      path.pop_back();
    }
    if (refs.empty()) layer = 1;
    mark[name] = Mark::Done;
    st.layer_of[name] = layer;
    return layer;
  };
  for (const auto& [name, _] : program.composites()) visit(name);

  std::size_t depth = 0;
  for (const auto& [_, l] : st.layer_of) depth = std::max(depth, l + 1);
  st.layers.resize(depth);
  for (const auto& [name, l] : st.layer_of) st.layers[l].push_back(name);
  st.layers.erase(std::remove_if(st.layers.begin(), st.layers.end(),
                                 [](const auto& l) { return l.empty(); }),
                  st.layers.end());
  for (std::size_t i = 0; i < st.layers.size(); ++i) {
    for (const auto& name : st.layers[i]) st.layer_of[name] = i;
  }
  return st;
}

// ---- evaluation -----------------------------------------------------------

namespace {

struct Resolved {
  Value value;
  std::vector<kb::Assertion> chain;
};

using Binding = std::map<std::string, std::string>;

std::vector<Resolved> resolve(const cdl::Term& term, const Binding& binding,
                              const kb::FactIndex& index, Instant at) {
  if (std::holds_alternative<cdl::Now>(term.node)) return {Resolved{Value{at}, {}}};
  if (const auto* v = std::get_if<Value>(&term.node)) return {Resolved{*v, {}}};
  const auto& vp = std::get<cdl::VarPath>(term.node);
  auto it = binding.find(vp.var);
  if (it == binding.end()) return {};
  std::vector<Resolved> frontier{Resolved{IndividualRef{it->second}, {}}};
  for (const auto& hop : vp.path) {
    std::vector<Resolved> next;
    for (const auto& r : frontier) {
      const auto* ref = std::get_if<IndividualRef>(&r.value);
      if (!ref) continue;
      for (const auto& fact : index.lookup(ref->name, hop)) {
        Resolved n{fact.value, r.chain};
        n.chain.push_back(fact);
        next.push_back(std::move(n));
      }
    }
    frontier = std::move(next);
  }
  return frontier;
}

std::vector<const cdl::Term*> terms_of(const cdl::Atom& atom) {
  if (const auto* c = std::get_if<cdl::CompareAtom>(&atom)) return {&c->lhs, &c->rhs};
  if (const auto* n = std::get_if<cdl::NearAtom>(&atom)) return {&n->a, &n->b};
  const auto& w = std::get<cdl::WithinAtom>(atom);
  return {&w.interval, &w.time};
}

// First satisfying operand combination in resolution order.
std::optional<Witness> satisfy(const cdl::Atom& atom, std::size_t atom_index,
                               const Binding& binding, const kb::FactIndex& index, Instant at) {
  auto terms = terms_of(atom);
  auto lhs = resolve(*terms[0], binding, index, at);
  if (lhs.empty()) return std::nullopt;
  auto rhs = resolve(*terms[1], binding, index, at);
  for (const auto& l : lhs) {
    for (const auto& r : rhs) {
      std::vector<Value> operands{l.value, r.value};
      if (!atom_holds(atom, operands)) continue;
      Witness w{atom_index, atom, std::move(operands), l.chain};
      w.facts.insert(w.facts.end(), r.chain.begin(), r.chain.end());
      return w;
    }
  }
  return std::nullopt;
}

bool assertion_less(const kb::Assertion& a, const kb::Assertion& b) {
  return kb::canonical_less(a, b);
}

class Evaluator {
 public:
  Evaluator(const kb::Snapshot& snapshot, const Program& program)
      : snapshot_(snapshot), program_(program) {}

  Evaluation run() {
    Evaluation out;
    out.at = snapshot_.at();
    Strata strata = stratify(program_, &snapshot_.ontology());
    rebuild();
    for (const auto& layer : strata.layers) {
      std::vector<const SituationDef*> defs;
      for (const auto& name : layer) {
        if (auto it = program_.simple().find(name); it != program_.simple().end()) {
          defs.push_back(&it->second);
        }
      }
      if (defs.empty()) continue;
      std::vector<ActiveSituation> active;
      while (true) {
        active.clear();
        std::vector<kb::Assertion> fresh;
        for (const auto* def : defs) evaluate_def(*def, active, fresh);
        bool grew = false;
        for (auto& f : fresh) grew = derived_.insert(std::move(f)).second || grew;
        if (!grew) break;
        rebuild();
      }
      out.simple.insert(out.simple.end(), active.begin(), active.end());
    }
    std::sort(out.simple.begin(), out.simple.end(), [](const auto& a, const auto& b) {
      return std::tie(a.situation, a.bindings) < std::tie(b.situation, b.bindings);
    });
    out.composites = evaluate_composites(out.simple, program_);
    out.derived.assign(derived_.begin(), derived_.end());
    return out;
  }

 private:
  void rebuild() {
    std::vector<kb::Assertion> facts = snapshot_.assertions();
    facts.insert(facts.end(), derived_.begin(), derived_.end());
    view_ = std::make_unique<kb::Snapshot>(snapshot_.at(), std::move(facts),
                                           snapshot_.ontology_ptr());
    index_ = std::make_unique<kb::FactIndex>(*view_);
  }

  void evaluate_def(const SituationDef& def, std::vector<ActiveSituation>& active,
                    std::vector<kb::Assertion>& fresh) {
    std::vector<std::vector<std::string>> candidates;
    for (const auto& h : def.head) {
      candidates.push_back(snapshot_.ontology().instances_of(h.class_name));
    }
    Binding binding;
    std::vector<std::pair<std::string, std::string>> ordered;
    std::function<void(std::size_t)> enumerate = [&](std::size_t i) {
      if (i == def.head.size()) {
        check(def, binding, ordered, active, fresh);
        return;
      }
      for (const auto& ind : candidates[i]) {
        binding[def.head[i].var] = ind;
        ordered.emplace_back(def.head[i].var, ind);
        enumerate(i + 1);
        ordered.pop_back();
      }
      binding.erase(def.head[i].var);
    };
    enumerate(0);
  }

  void check(const SituationDef& def, const Binding& binding,
             const std::vector<std::pair<std::string, std::string>>& ordered,
             std::vector<ActiveSituation>& active, std::vector<kb::Assertion>& fresh) {
    ActiveSituation a{def.name, ordered, {}};
    for (std::size_t i = 0; i < def.condition.atoms.size(); ++i) {
      auto w = satisfy(def.condition.atoms[i], i, binding, *index_, snapshot_.at());
      if (!w) return;
      a.derivation.push_back(std::move(*w));
    }
    if (def.derive) {
      const auto& t = *def.derive;
      for (const auto& r : resolve(t.value, binding, *index_, snapshot_.at())) {
        kb::Assertion f;
        f.subject = binding.at(t.var);
        f.property = t.property;
        f.value = snapshot_.ontology().normalize_value(t.property, r.value);
        f.timestamp = snapshot_.at();
        f.source = "reasoner";
        f.quality = 1.0;
        f.derived = true;
        fresh.push_back(std::move(f));
      }
    }
    active.push_back(std::move(a));
  }

  const kb::Snapshot& snapshot_;
  const Program& program_;
  std::set<kb::Assertion, decltype(&assertion_less)> derived_{&assertion_less};
  std::unique_ptr<kb::Snapshot> view_;
  std::unique_ptr<kb::FactIndex> index_;
};

bool expr_true(const cdl::BoolExpr& e, const std::function<bool(const std::string&)>& truth) {
  using K = cdl::BoolExpr::Kind;
  switch (e.kind) {
    case K::Ref: return truth(e.name);
    case K::Not: return !expr_true(e.children.front(), truth);
    case K::And:
      return std::all_of(e.children.begin(), e.children.end(),
                         [&](const auto& c) { return expr_true(c, truth); });
    case K::Or:
      return std::any_of(e.children.begin(), e.children.end(),
                         [&](const auto& c) { return expr_true(c, truth); });
  }
  return false;
}

std::string format_fact(const kb::Assertion& a) {
  return fmt::format("{} {} {} @{} {}{}", a.subject, a.property, format_value(a.value),
                     a.timestamp, a.source, a.derived ? " derived" : "");
}

}  // namespace

bool atom_holds(const cdl::Atom& atom, const std::vector<Value>& operands) {
  if (operands.size() != 2) return false;
  if (const auto* c = std::get_if<cdl::CompareAtom>(&atom)) {
    return compare(operands[0], c->op, operands[1]).value_or(false);
  }
  if (const auto* n = std::get_if<cdl::NearAtom>(&atom)) {
    const auto* a = std::get_if<GeoPoint>(&operands[0]);
    const auto* b = std::get_if<GeoPoint>(&operands[1]);
    return a && b && haversine_meters(*a, *b) <= n->radius_meters;
  }
  const auto* iv = std::get_if<TimeInterval>(&operands[0]);
  const auto* t = std::get_if<std::int64_t>(&operands[1]);
  return iv && t && within(*iv, *t);
}

std::optional<std::vector<Witness>> satisfy_condition(
    const cdl::Condition& condition, const std::map<std::string, std::string>& binding,
    const kb::Snapshot& snapshot) {
  kb::FactIndex index(snapshot);
  std::vector<Witness> out;
  for (std::size_t i = 0; i < condition.atoms.size(); ++i) {
    auto w = satisfy(condition.atoms[i], i, binding, index, snapshot.at());
    if (!w) return std::nullopt;
    out.push_back(std::move(*w));
  }
  return out;
}

Evaluation evaluate(const kb::Snapshot& snapshot, const Program& program) {
  return Evaluator(snapshot, program).run();
}

std::set<std::string> evaluate_composites(const std::set<std::string>& active_simple,
                                          const Program& program) {
  Strata strata = stratify(program);
  std::set<std::string> active;
  auto truth = [&](const std::string& name) {
    return active_simple.count(name) > 0 || active.count(name) > 0;
  };
  for (const auto& layer : strata.layers) {
    for (const auto& name : layer) {
      auto it = program.composites().find(name);
      if (it != program.composites().end() && expr_true(it->second.expr, truth)) {
        active.insert(name);
      }
    }
  }
  return active;
}

std::set<std::string> evaluate_composites(const std::vector<ActiveSituation>& active_simple,
                                          const Program& program) {
  std::set<std::string> names;
  for (const auto& a : active_simple) names.insert(a.situation);
  return evaluate_composites(names, program);
}

std::map<std::string, std::string> ActiveSituation::binding_map() const {
  return {bindings.begin(), bindings.end()};
}

bool Evaluation::is_active(const std::string& name) const {
  if (composites.count(name)) return true;
  return std::any_of(simple.begin(), simple.end(),
                     [&](const auto& a) { return a.situation == name; });
}

std::set<std::string> Evaluation::active_names() const {
  std::set<std::string> out(composites.begin(), composites.end());
  for (const auto& a : simple) out.insert(a.situation);
  return out;
}

const ActiveSituation& explain(const Evaluation& evaluation, const std::string& situation,
                               const std::map<std::string, std::string>& bindings) {
  for (const auto& a : evaluation.simple) {
    if (a.situation == situation && a.binding_map() == bindings) return a;
  }
  std::string b;
  for (const auto& [k, v] : bindings) b += fmt::format("{}{}={}", b.empty() ? "" : ", ", k, v);
  throw Error(Errc::NotActive,
              fmt::format("'{}({})' is not active at {}", situation, b, evaluation.at));
}

std::string format_active(const ActiveSituation& a) {
  std::string b;
  for (const auto& [k, v] : a.bindings) b += fmt::format("{}{}={}", b.empty() ? "" : ", ", k, v);
  return fmt::format("{}({})", a.situation, b);
}

std::string format_trace(const ActiveSituation& a) {
  std::string out = format_active(a) + "\n";
  for (const auto& w : a.derivation) {
    std::string ops;
    for (const auto& v : w.operands) ops += (ops.empty() ? "" : ", ") + format_value(v);
    std::string facts;
    for (const auto& f : w.facts) facts += (facts.empty() ? "" : "; ") + format_fact(f);
    out += fmt::format("  atom {}: {} | operands {} | facts {}\n", w.atom_index + 1,
                       cdl::format_atom(w.atom), ops, facts.empty() ? "-" : facts);
  }
  return out;
}

std::string format_evaluation(const Evaluation& e) {
  std::string out;
  for (const auto& a : e.simple) out += format_active(a) + "\n";
  for (const auto& c : e.composites) out += "composite " + c + "\n";
  return out;
}

}  // namespace cas::situation
