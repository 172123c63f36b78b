#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

#include <fmt/core.h>

namespace oracle {

using cas::Value;
namespace cdl = cas::cdl;
namespace kb = cas::kb;
namespace reg = cas::registry;

std::set<std::pair<std::string, std::string>> closure_bfs(const Parents& parents) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [start, _] : parents) {
    std::set<std::string> seen{start};
    std::deque<std::string> queue{start};
    while (!queue.empty()) {
      std::string c = queue.front();
      queue.pop_front();
      out.emplace(start, c);
      auto it = parents.find(c);
      if (it == parents.end()) continue;
      for (const auto& p : it->second) {
        if (seen.insert(p).second) queue.push_back(p);
      }
    }
  }
  return out;
}

namespace {

std::string line(const kb::Assertion& a) {
  std::string until = a.ttl ? std::to_string(a.timestamp + *a.ttl) : "inf";
  return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}", a.subject, a.property,
                     cas::format_value(a.value), a.timestamp, until, a.source,
                     cas::format_number(a.quality), a.derived ? "true" : "false");
}

}  // namespace

std::vector<kb::Assertion> visible_scan(const std::vector<kb::Assertion>& facts,
                                        const std::set<std::string>& functional, cas::Instant t) {
  std::vector<kb::Assertion> vis;
  for (const auto& a : facts) {
    bool started = a.timestamp <= t;
    bool alive = !a.ttl || t < a.timestamp + *a.ttl;
    if (!started || !alive) continue;
    if (std::find(vis.begin(), vis.end(), a) == vis.end()) vis.push_back(a);
  }
  // Winner per functional key: newest, then best quality, then smallest
  // source, then smallest canonical line.
  auto beats = [](const kb::Assertion& a, const kb::Assertion& b) {
    return std::make_tuple(-a.timestamp, -a.quality, a.source, line(a)) <
           std::make_tuple(-b.timestamp, -b.quality, b.source, line(b));
  };
  std::vector<kb::Assertion> out;
  for (const auto& a : vis) {
    if (functional.count(a.property)) {
      bool lost = false;
      for (const auto& b : vis) {
        if (&a != &b && b.subject == a.subject && b.property == a.property && beats(b, a)) {
          lost = true;
        }
      }
      if (lost) continue;
    }
    out.push_back(a);
  }
  std::sort(out.begin(), out.end(),
            [](const kb::Assertion& a, const kb::Assertion& b) { return line(a) < line(b); });
  return out;
}

double haversine(double lat1, double lon1, double lat2, double lon2) {
  const double r = 6371000.0;
  const double k = M_PI / 180.0;
  double a = std::pow(std::sin((lat2 - lat1) * k / 2), 2) +
             std::cos(lat1 * k) * std::cos(lat2 * k) * std::pow(std::sin((lon2 - lon1) * k / 2), 2);
  return 2 * r * std::atan2(std::sqrt(a), std::sqrt(1 - a));
}

namespace {

std::optional<double> number(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

template <typename T>
bool apply(const T& a, cas::CompareOp op, const T& b) {
  switch (op) {
    case cas::CompareOp::Eq: return a == b;
    case cas::CompareOp::Ne: return a != b;
    case cas::CompareOp::Lt: return a < b;
    case cas::CompareOp::Le: return a <= b;
    case cas::CompareOp::Gt: return a > b;
    case cas::CompareOp::Ge: return a >= b;
  }
  return false;
}

bool holds(const Value& a, cas::CompareOp op, const Value& b) {
  auto na = number(a), nb = number(b);
  if (na && nb) {
    auto* ia = std::get_if<std::int64_t>(&a);
    auto* ib = std::get_if<std::int64_t>(&b);
    if (ia && ib) return apply(*ia, op, *ib);
    return apply(*na, op, *nb);
  }
  if (a.index() != b.index()) return false;
  if (auto* s = std::get_if<std::string>(&a)) return apply(*s, op, std::get<std::string>(b));
  if (op == cas::CompareOp::Eq) return a == b;
  if (op == cas::CompareOp::Ne) return !(a == b);
  return false;
}

struct Evaluator {
  const World& w;
  const std::map<std::string, std::string>& binding;

  std::vector<Value> values(const cdl::Term& t) const {
    if (std::holds_alternative<cdl::Now>(t.node)) return {Value{w.now}};
    if (auto* v = std::get_if<Value>(&t.node)) return {*v};
    const auto& vp = std::get<cdl::VarPath>(t.node);
    auto it = binding.find(vp.var);
    if (it == binding.end()) return {};
    std::vector<Value> cur{Value{cas::IndividualRef{it->second}}};
    for (const auto& hop : vp.path) {
      std::vector<Value> next;
      for (const auto& v : cur) {
        auto* ref = std::get_if<cas::IndividualRef>(&v);
        if (!ref) continue;
        for (const auto& f : w.facts) {
          if (f.subject == ref->name && f.property == hop) next.push_back(f.value);
        }
      }
      cur = std::move(next);
    }
    return cur;
  }

  bool atom(const cdl::Atom& a) const {
    if (auto* c = std::get_if<cdl::CompareAtom>(&a)) {
      for (const auto& l : values(c->lhs)) {
        for (const auto& r : values(c->rhs)) {
          if (holds(l, c->op, r)) return true;
        }
      }
      return false;
    }
    if (auto* n = std::get_if<cdl::NearAtom>(&a)) {
      for (const auto& l : values(n->a)) {
        for (const auto& r : values(n->b)) {
          auto* p = std::get_if<cas::GeoPoint>(&l);
          auto* q = std::get_if<cas::GeoPoint>(&r);
          if (p && q && haversine(p->lat, p->lon, q->lat, q->lon) <= n->radius_meters) return true;
        }
      }
      return false;
    }
    const auto& wa = std::get<cdl::WithinAtom>(a);
    for (const auto& l : values(wa.interval)) {
      for (const auto& r : values(wa.time)) {
        auto* iv = std::get_if<cas::TimeInterval>(&l);
        auto* t = std::get_if<std::int64_t>(&r);
        if (!iv || !t) continue;
        std::int64_t s = ((*t % 86400) + 86400) % 86400;
        bool in = iv->start < iv->end    ? (iv->start <= s && s < iv->end)
                  : iv->start > iv->end ? (s >= iv->start || s < iv->end)
                                         : false;
        if (in) return true;
      }
    }
    return false;
  }
};

}  // namespace

std::vector<std::string> exhaustive_bindings(const World& w, const cdl::SituationDecl& def) {
  auto closure = closure_bfs(w.parents);
  auto members = [&](const std::string& cls) {
    std::vector<std::string> out;
    for (const auto& [ind, classes] : w.individual_classes) {
      for (const auto& c : classes) {
        if (closure.count({c, cls})) {
          out.push_back(ind);
          break;
        }
      }
    }
    return out;
  };
  std::vector<std::vector<std::string>> domains;
  for (const auto& h : def.head) domains.push_back(members(h.class_name));

  std::vector<std::string> out;
  std::map<std::string, std::string> binding;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == def.head.size()) {
      Evaluator ev{w, binding};
      for (const auto& a : def.condition.atoms) {
        if (!ev.atom(a)) return;
      }
      std::string s = def.name + "(";
      bool first = true;
      for (const auto& [k, v] : binding) {
        s += fmt::format("{}{}={}", first ? "" : ", ", k, v);
        first = false;
      }
      out.push_back(s + ")");
      return;
    }
    for (const auto& ind : domains[i]) {
      binding[def.head[i].var] = ind;
      rec(i + 1);
    }
    binding.erase(def.head[i].var);
  };
  rec(0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::set<std::string> truth_table(const std::map<std::string, cdl::BoolExpr>& composites,
                                  const std::set<std::string>& active_simple) {
  std::function<bool(const cdl::BoolExpr&)> eval = [&](const cdl::BoolExpr& e) -> bool {
    switch (e.kind) {
      case cdl::BoolExpr::Kind::Ref: {
        auto it = composites.find(e.name);
        return it == composites.end() ? active_simple.count(e.name) > 0 : eval(it->second);
      }
      case cdl::BoolExpr::Kind::Not: return !eval(e.children[0]);
      case cdl::BoolExpr::Kind::And:
        for (const auto& c : e.children) {
          if (!eval(c)) return false;
        }
        return true;
      case cdl::BoolExpr::Kind::Or:
        for (const auto& c : e.children) {
          if (eval(c)) return true;
        }
        return false;
    }
    return false;
  };
  std::set<std::string> out;
  for (const auto& [name, e] : composites) {
    if (eval(e)) out.insert(name);
  }
  return out;
}

namespace {

int rank_of(const Value& v) {
  if (std::holds_alternative<bool>(v)) return 0;
  if (number(v)) return 1;
  if (std::holds_alternative<std::string>(v)) return 2;
  return 3;
}

// Ascending order used by sortby for the value kinds the generators emit.
bool before(const Value& a, const Value& b) {
  int ra = rank_of(a), rb = rank_of(b);
  if (ra != rb) return ra < rb;
  if (ra == 0) return !std::get<bool>(a) && std::get<bool>(b);
  if (ra == 1) {
    double x = *number(a), y = *number(b);
    if (x != y) return x < y;
    return std::holds_alternative<std::int64_t>(a) && std::holds_alternative<double>(b);
  }
  if (ra == 2) return std::get<std::string>(a) < std::get<std::string>(b);
  return false;
}

}  // namespace

cas::adaptation::Payload transform(const std::vector<cdl::Step>& steps,
                                   cas::adaptation::Payload p) {
  using Record = cas::adaptation::Record;
  for (const auto& step : steps) {
    if (auto* f = std::get_if<cdl::FilterStep>(&step)) {
      std::vector<Record> kept;
      for (const auto& r : p.records) {
        auto it = r.find(f->field);
        if (it != r.end() && holds(it->second, f->op, f->literal)) kept.push_back(r);
      }
      p.records = kept;
    } else if (auto* s = std::get_if<cdl::SortStep>(&step)) {
      // Insertion sort is stable by construction.
      std::vector<Record> with, without;
      for (const auto& r : p.records) (r.count(s->field) ? with : without).push_back(r);
      std::vector<Record> sorted;
      for (const auto& r : with) {
        auto pos = sorted.end();
        for (auto it = sorted.begin(); it != sorted.end(); ++it) {
          const Value& x = r.at(s->field);
          const Value& y = it->at(s->field);
          if (s->descending ? before(y, x) : before(x, y)) {
            pos = it;
            break;
          }
        }
        sorted.insert(pos, r);
      }
      sorted.insert(sorted.end(), without.begin(), without.end());
      p.records = sorted;
    } else if (auto* l = std::get_if<cdl::LimitStep>(&step)) {
      std::vector<Record> kept;
      for (std::size_t i = 0; i < p.records.size() && static_cast<std::int64_t>(i) < l->n; ++i) {
        kept.push_back(p.records[i]);
      }
      p.records = kept;
    } else if (auto* set = std::get_if<cdl::SetStep>(&step)) {
      for (auto& r : p.records) r[set->field] = set->value;
    } else if (auto* lang = std::get_if<cdl::LanguageStep>(&step)) {
      p.language = lang->tag;
    } else {
      const std::vector<std::string>* fields = nullptr;
      if (auto* pr = std::get_if<cdl::ProjectStep>(&step)) fields = &pr->fields;
      auto* rv = std::get_if<cdl::ReduceViewStep>(&step);
      if (rv) fields = &rv->fields;
      for (auto& r : p.records) {
        Record kept;
        for (const auto& [k, v] : r) {
          if (std::find(fields->begin(), fields->end(), k) != fields->end()) kept[k] = v;
        }
        r = kept;
      }
      if (rv) p.params["view"] = std::string("reduced");
    }
  }
  return p;
}

namespace {

bool is_tag(const std::string& c) {
  return c == "bool" || c == "int" || c == "float" || c == "string" || c == "geopoint" ||
         c == "timeinterval";
}

}  // namespace

std::vector<RankEntry> rank(const Parents& parents, const std::vector<reg::CAWebService>& services,
                            const reg::CAGoal& goal, const std::vector<reg::CAMediator>& mediators,
                            bool* unresolved) {
  auto closure = closure_bfs(parents);
  auto known = [&](const std::string& c) { return is_tag(c) || parents.count(c) > 0; };
  auto degree = [&](const std::string& offered, const std::string& wanted) {
    if (offered == wanted) return 0;
    if (is_tag(offered) || is_tag(wanted)) return 3;
    if (closure.count({offered, wanted})) return 1;
    if (closure.count({wanted, offered})) return 2;
    return 3;
  };

  struct Route {
    reg::CAGoal g;
    int hops;
    std::optional<std::string> via;
  };
  std::vector<Route> routes;
  auto resolves = [&](const reg::CAGoal& g) {
    for (const auto& c : g.outputs) {
      if (!known(c)) return false;
    }
    if (g.inputs) {
      for (const auto& c : *g.inputs) {
        if (!known(c)) return false;
      }
    }
    return true;
  };
  if (resolves(goal)) routes.push_back({goal, 0, std::nullopt});
  std::vector<reg::CAMediator> ms = mediators;
  std::sort(ms.begin(), ms.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& m : ms) {
    reg::CAGoal g = goal;
    auto map = [&](std::string& c) {
      auto it = m.concept_map.find(c);
      if (it != m.concept_map.end()) c = it->second;
    };
    for (auto& c : g.outputs) map(c);
    if (g.inputs) {
      for (auto& c : *g.inputs) map(c);
    }
    if (g.outputs == goal.outputs && g.inputs == goal.inputs) continue;
    if (resolves(g)) routes.push_back({g, 1, m.id});
  }
  *unresolved = routes.empty();

  std::vector<RankEntry> out;
  for (const auto& s : services) {
    std::optional<RankEntry> best;
    for (const auto& r : routes) {
      int worst = 0;
      for (const auto& want : r.g.outputs) {
        int b = 3;
        for (const auto& off : s.capability.outputs) b = std::min(b, degree(off, want));
        worst = std::max(worst, b);
      }
      if (r.g.inputs) {
        for (const auto& need : s.capability.inputs) {
          int b = 3;
          for (const auto& have : *r.g.inputs) b = std::min(b, degree(have, need));
          worst = std::max(worst, b);
        }
      }
      if (worst == 3) continue;
      RankEntry e{s.id, static_cast<reg::MatchDegree>(worst), r.hops, r.via};
      auto key = [](const RankEntry& x) {
        return std::make_tuple(static_cast<int>(x.degree), x.hops, x.mediator.value_or(""));
      };
      if (!best || key(e) < key(*best)) best = e;
    }
    if (best) out.push_back(*best);
  }
  std::sort(out.begin(), out.end(), [](const RankEntry& a, const RankEntry& b) {
    return std::make_tuple(static_cast<int>(a.degree), a.hops, a.service, a.mediator.value_or("")) <
           std::make_tuple(static_cast<int>(b.degree), b.hops, b.service, b.mediator.value_or(""));
  });
  return out;
}

}  // namespace oracle
