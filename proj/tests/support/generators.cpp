#include "generators.hpp"

#include <fmt/core.h>

namespace gen {

using namespace cas;
namespace cdl = cas::cdl;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

oracle::Parents class_dag(Rng& rng, int n) {
  oracle::Parents out;
  for (int i = 0; i < n; ++i) {
    std::set<std::string> parents;
    if (i > 0) {
      int k = uniform(rng, 0, std::min(i, 3));
      for (int j = 0; j < k; ++j) parents.insert(fmt::format("C{}", uniform(rng, 0, i - 1)));
    }
    out[fmt::format("C{}", i)] = parents;
  }
  return out;
}

FactSet fact_set(Rng& rng) {
  FactSet fs;
  fs.kb.define_class(kb::ClassDef{"T", {}, {}, kb::ClassLevel::Upper});
  int subjects = uniform(rng, 1, 5);
  for (int i = 0; i < subjects; ++i) fs.kb.define_individual(kb::Individual{fmt::format("s{}", i), {"T"}});
  auto prop = [&](std::string name, ValueType t, bool functional) {
    kb::PropertyDef d;
    d.name = name;
    d.domain = {"T"};
    d.range_type = t;
    d.functional = functional;
    fs.kb.define_property(d);
    if (functional) fs.functional.insert(name);
  };
  prop("p0", ValueType::Int, true);
  prop("p1", ValueType::Bool, true);
  prop("p2", ValueType::Int, false);
  prop("p3", ValueType::String, false);

  int n = uniform(rng, 0, 25);
  for (int i = 0; i < n; ++i) {
    kb::Assertion a;
    if (!fs.facts.empty() && coin(rng, 0.1)) {
      a = pick(rng, fs.facts);  // exact duplicate
    } else {
      a.subject = fmt::format("s{}", uniform(rng, 0, subjects - 1));
      int p = uniform(rng, 0, 3);
      a.property = fmt::format("p{}", p);
      if (p == 1) {
        a.value = coin(rng);
      } else if (p == 3) {
        a.value = std::string(1, static_cast<char>('a' + uniform(rng, 0, 2)));
      } else {
        a.value = std::int64_t{uniform(rng, 0, 4)};
      }
      a.timestamp = uniform(rng, 0, 50);
      if (coin(rng, 0.7)) a.ttl = uniform(rng, 0, 40);
      a.source = std::string(1, static_cast<char>('a' + uniform(rng, 0, 2)));
      static const std::vector<double> qualities{0.5, 0.9, 1.0};
      a.quality = pick(rng, qualities);
    }
    fs.facts.push_back(fs.kb.facts().at(fs.kb.assert_fact(a)));
  }
  return fs;
}

namespace {

const std::vector<std::string> kSitClasses{"Thing", "A", "B", "C"};

// ?v followed by zero or more `link` hops and then `leaf` (empty: none).
cdl::Term path_term(Rng& rng, const std::vector<std::string>& vars, const std::string& leaf) {
  cdl::VarPath vp{pick(rng, vars), {}};
  if (coin(rng, 0.3)) vp.path.push_back("link");
  if (!leaf.empty()) vp.path.push_back(leaf);
  return cdl::Term{vp};
}

cdl::Atom situation_atom(Rng& rng, const std::vector<std::string>& vars, int individuals) {
  auto op = [&] { return static_cast<CompareOp>(uniform(rng, 0, 5)); };
  auto ind = [&] { return Value{IndividualRef{fmt::format("i{}", uniform(rng, 0, individuals - 1))}}; };
  switch (uniform(rng, 0, 7)) {
    case 0: {
      cdl::NearAtom n;
      n.a = path_term(rng, vars, "loc");
      n.b = coin(rng) ? path_term(rng, vars, "loc") : cdl::Term{Value{GeoPoint{0.0, 0.0}}};
      n.radius_meters = uniform(rng, 0, 3) * 50000.0;
      return n;
    }
    case 1:
      return cdl::WithinAtom{path_term(rng, vars, "hours"),
                             coin(rng, 0.8) ? cdl::Term{cdl::Now{}} : cdl::Term{Value{std::int64_t{uniform(rng, 0, 86400)}}}};
    case 2: {
      cdl::Term rhs = coin(rng) ? path_term(rng, vars, "num")
                                : cdl::Term{coin(rng, 0.8) ? Value{std::int64_t{uniform(rng, 0, 3)}}
                                                           : Value{uniform(rng, 0, 6) / 2.0}};
      return cdl::CompareAtom{path_term(rng, vars, "num"), op(), rhs};
    }
    case 3: {
      cdl::Term rhs = coin(rng) ? path_term(rng, vars, "flag") : cdl::Term{Value{coin(rng)}};
      return cdl::CompareAtom{path_term(rng, vars, "flag"), coin(rng) ? CompareOp::Eq : CompareOp::Ne, rhs};
    }
    case 4: {
      cdl::Term rhs = coin(rng) ? path_term(rng, vars, "") : cdl::Term{ind()};
      return cdl::CompareAtom{path_term(rng, vars, coin(rng) ? "link" : ""),
                              coin(rng, 0.7) ? CompareOp::Eq : CompareOp::Ne, rhs};
    }
    default: {
      // Arbitrary operands, mostly ill-typed.
      static const std::vector<std::string> leaves{"", "num", "flag", "link", "loc", "hours"};
      auto any = [&]() -> cdl::Term {
        switch (uniform(rng, 0, 3)) {
          case 0: return path_term(rng, vars, pick(rng, leaves));
          case 1: return cdl::Term{cdl::Now{}};
          case 2: return cdl::Term{ind()};
          default: return cdl::Term{Value{std::int64_t{uniform(rng, 0, 3)}}};
        }
      };
      return cdl::CompareAtom{any(), op(), any()};
    }
  }
}

}  // namespace

SituationCase situation_case(Rng& rng) {
  SituationCase sc;
  sc.world.parents = {{"Thing", {}}, {"A", {"Thing"}}, {"B", {"A"}}, {"C", {"Thing"}}};
  sc.kb.define_class(kb::ClassDef{"Thing", {}, {}, kb::ClassLevel::Upper});
  sc.kb.define_class(kb::ClassDef{"A", {"Thing"}, {}, kb::ClassLevel::Domain});
  sc.kb.define_class(kb::ClassDef{"B", {"A"}, {}, kb::ClassLevel::Domain});
  sc.kb.define_class(kb::ClassDef{"C", {"Thing"}, {}, kb::ClassLevel::Domain});
  auto prop = [&](std::string name, std::optional<ValueType> t) {
    kb::PropertyDef d;
    d.name = name;
    d.domain = {"Thing"};
    if (t) {
      d.range_type = *t;
    } else {
      d.kind = kb::PropertyKind::Object;
      d.range_class = "Thing";
    }
    sc.kb.define_property(d);
  };
  prop("num", ValueType::Int);
  prop("flag", ValueType::Bool);
  prop("loc", ValueType::GeoPoint);
  prop("hours", ValueType::TimeInterval);
  prop("link", std::nullopt);

  int individuals = uniform(rng, 1, 10);
  static const std::vector<std::string> leaf_classes{"Thing", "A", "B", "C"};
  for (int i = 0; i < individuals; ++i) {
    std::set<std::string> classes{pick(rng, leaf_classes)};
    if (coin(rng, 0.2)) classes.insert(pick(rng, leaf_classes));
    std::string name = fmt::format("i{}", i);
    sc.kb.define_individual(kb::Individual{name, classes});
    sc.world.individual_classes[name] = classes;
  }
  sc.at = uniform(rng, 0, 2 * 86400);
  int facts = uniform(rng, individuals, 5 * individuals);
  for (int i = 0; i < facts; ++i) {
    kb::Assertion a;
    a.subject = fmt::format("i{}", uniform(rng, 0, individuals - 1));
    a.timestamp = uniform(rng, 0, static_cast<int>(std::min<Instant>(sc.at, 1000)));
    a.source = "gen";
    switch (uniform(rng, 0, 4)) {
      case 0:
        a.property = "num";
        a.value = std::int64_t{uniform(rng, 0, 3)};
        break;
      case 1:
        a.property = "flag";
        a.value = coin(rng);
        break;
      case 2:
        a.property = "loc";
        a.value = GeoPoint{uniform(rng, -2, 2) * 0.5, uniform(rng, -2, 2) * 0.5};
        break;
      case 3:
        a.property = "hours";
        a.value = TimeInterval{uniform(rng, 0, 24) * 3600, uniform(rng, 0, 24) * 3600};
        break;
      default:
        a.property = "link";
        a.value = IndividualRef{fmt::format("i{}", uniform(rng, 0, individuals - 1))};
    }
    sc.world.facts.push_back(sc.kb.facts().at(sc.kb.assert_fact(a)));
  }
  sc.world.now = sc.at;

  int defs = uniform(rng, 1, 2);
  for (int d = 0; d < defs; ++d) {
    cdl::SituationDecl def;
    def.name = fmt::format("S{}", d);
    int nvars = uniform(rng, 1, 3);
    std::vector<std::string> vars;
    for (int v = 0; v < nvars; ++v) {
      vars.push_back(std::string(1, static_cast<char>('a' + v)));
      def.head.push_back(cdl::HeadVar{vars.back(), pick(rng, kSitClasses)});
    }
    int atoms = coin(rng, 0.8) ? uniform(rng, 1, 2) : 3;
    for (int i = 0; i < atoms; ++i) def.condition.atoms.push_back(situation_atom(rng, vars, individuals));
    sc.program.add(def);
    sc.defs.push_back(def);
  }
  return sc;
}

namespace {

cdl::BoolExpr bool_expr(Rng& rng, const std::vector<std::string>& names, int depth) {
  if (depth == 0 || coin(rng, 0.3)) return cdl::BoolExpr::ref(pick(rng, names));
  switch (uniform(rng, 0, 2)) {
    case 0: return cdl::BoolExpr::negate(bool_expr(rng, names, depth - 1));
    case 1: {
      std::vector<cdl::BoolExpr> c;
      int n = uniform(rng, 2, 3);
      for (int i = 0; i < n; ++i) c.push_back(bool_expr(rng, names, depth - 1));
      return cdl::BoolExpr::all(std::move(c));
    }
    default: {
      std::vector<cdl::BoolExpr> c;
      int n = uniform(rng, 2, 3);
      for (int i = 0; i < n; ++i) c.push_back(bool_expr(rng, names, depth - 1));
      return cdl::BoolExpr::any(std::move(c));
    }
  }
}

}  // namespace

CompositeCase composite_case(Rng& rng) {
  CompositeCase cc;
  int k = uniform(rng, 1, 5);
  for (int i = 0; i < k; ++i) cc.simple.push_back(fmt::format("S{}", i));
  std::vector<std::string> names = cc.simple;
  int m = uniform(rng, 1, 3);
  for (int i = 0; i < m; ++i) {
    std::string name = fmt::format("K{}", i);
    cc.composites[name] = bool_expr(rng, names, 3);
    names.push_back(name);
  }
  return cc;
}

namespace {

const std::vector<std::string> kFields{"a", "b", "c", "d"};

Value field_value(Rng& rng) {
  switch (uniform(rng, 0, 3)) {
    case 0: return std::int64_t{uniform(rng, -3, 3)};
    case 1: return static_cast<double>(uniform(rng, -6, 6)) / 2.0;
    case 2: return std::string(1, static_cast<char>('x' + uniform(rng, 0, 2)));
    default: return coin(rng);
  }
}

std::vector<std::string> field_subset(Rng& rng) {
  std::vector<std::string> out;
  for (const auto& f : kFields) {
    if (coin(rng)) out.push_back(f);
  }
  if (out.empty()) out.push_back(pick(rng, kFields));
  return out;
}

}  // namespace

adaptation::Payload payload(Rng& rng) {
  adaptation::Payload p;
  int n = uniform(rng, 0, 8);
  for (int i = 0; i < n; ++i) {
    adaptation::Record r;
    for (const auto& f : kFields) {
      if (coin(rng, 0.75)) r[f] = field_value(rng);
    }
    p.records.push_back(std::move(r));
  }
  if (coin(rng, 0.3)) p.params["q"] = field_value(rng);
  if (coin(rng, 0.2)) p.language = "en";
  return p;
}

std::vector<cdl::Step> steps(Rng& rng) {
  std::vector<cdl::Step> out;
  int n = uniform(rng, 1, 6);
  for (int i = 0; i < n; ++i) {
    switch (uniform(rng, 0, 6)) {
      case 0:
        out.push_back(cdl::FilterStep{pick(rng, kFields), static_cast<CompareOp>(uniform(rng, 0, 5)),
                                      field_value(rng)});
        break;
      case 1: out.push_back(cdl::SortStep{pick(rng, kFields), coin(rng)}); break;
      case 2: out.push_back(cdl::LimitStep{uniform(rng, 0, 6)}); break;
      case 3: out.push_back(cdl::ProjectStep{field_subset(rng)}); break;
      case 4: out.push_back(cdl::SetStep{pick(rng, kFields), field_value(rng)}); break;
      case 5: out.push_back(cdl::ReduceViewStep{field_subset(rng)}); break;
      default: out.push_back(cdl::LanguageStep{coin(rng) ? "fr" : "ar"});
    }
  }
  return out;
}

MatchCase match_case(Rng& rng) {
  MatchCase mc;
  int n = uniform(rng, 2, 7);
  mc.parents = class_dag(rng, n);
  for (int i = 0; i < n; ++i) {
    std::string name = fmt::format("C{}", i);
    mc.ontology.define_class(kb::ClassDef{name, mc.parents[name], {}, kb::ClassLevel::Domain});
  }
  std::vector<std::string> classes;
  for (const auto& [c, _] : mc.parents) classes.push_back(c);
  std::vector<std::string> service_concepts = classes;
  service_concepts.push_back("string");
  std::vector<std::string> goal_concepts = service_concepts;
  goal_concepts.push_back("X0");
  goal_concepts.push_back("X1");

  auto concepts = [&](const std::vector<std::string>& pool, int lo, int hi) {
    std::vector<std::string> out;
    int k = uniform(rng, lo, hi);
    for (int i = 0; i < k; ++i) out.push_back(pick(rng, pool));
    return out;
  };
  int services = uniform(rng, 1, 15);
  for (int i = 0; i < services; ++i) {
    registry::CAWebService s;
    s.id = fmt::format("Svc{}", i);
    s.capability.outputs = concepts(service_concepts, 1, 2);
    s.capability.inputs = concepts(service_concepts, 0, 2);
    s.is_static = true;
    mc.services.push_back(std::move(s));
  }
  int mediators = uniform(rng, 0, 2);
  for (int i = 0; i < mediators; ++i) {
    registry::CAMediator m;
    m.id = fmt::format("M{}", i);
    std::set<std::string> targets;
    int k = uniform(rng, 1, 2);
    for (int j = 0; j < k; ++j) {
      std::string to = pick(rng, classes);
      if (!targets.insert(to).second) continue;
      m.concept_map[pick(rng, goal_concepts)] = to;
    }
    std::set<std::string> check;
    bool injective = true;
    for (const auto& [_, to] : m.concept_map) injective &= check.insert(to).second;
    if (injective) mc.mediators.push_back(std::move(m));
  }
  mc.goal.id = "G";
  mc.goal.outputs = concepts(goal_concepts, 1, 2);
  if (coin(rng)) mc.goal.inputs = concepts(goal_concepts, 1, 2);
  mc.goal.related_situation = "S";
  return mc;
}

// ---- documents --------------------------------------------------------------

namespace {

struct DocGen {
  explicit DocGen(Rng& r) : rng(r) {}

  Rng& rng;
  std::vector<std::string> classes{"User", "Service", "Activity", "Device", "Environment"};
  std::vector<std::string> data_props, obj_props, individuals, situations, adaptations, services;
  int counter = 0;
  cdl::Document doc;

  std::string fresh(const char* prefix) { return fmt::format("{}{}", prefix, counter++); }

  Value literal(bool allow_individual = true) {
    switch (uniform(rng, 0, 7)) {
      case 0: return coin(rng);
      case 1: {
        static const std::vector<std::int64_t> edge{0, -1, 1, 42, std::numeric_limits<std::int64_t>::min(),
                                                    std::numeric_limits<std::int64_t>::max()};
        return coin(rng) ? pick(rng, edge) : std::int64_t{uniform(rng, -100000, 100000)};
      }
      case 2: {
        std::uniform_real_distribution<double> d(-1e6, 1e6);
        static const std::vector<double> edge{0.0, -0.5, 1e-300, 1.7976931348623157e308, 3.14159};
        return coin(rng, 0.3) ? pick(rng, edge) : d(rng);
      }
      case 3: {
        static const std::vector<std::string> s{"", "plain", "with space", "q\"uote", "back\\slash",
                                                "tab\there", "new\nline", "caf\xc3\xa9"};
        return pick(rng, s);
      }
      case 4: {
        std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
        return GeoPoint{lat(rng), lon(rng)};
      }
      case 5: {
        auto t = [&] {
          int s = uniform(rng, 0, 86400);
          return coin(rng) ? (s / 60) * 60 : s;
        };
        return TimeInterval{t(), t()};
      }
      default:
        if (allow_individual && !individuals.empty()) return IndividualRef{pick(rng, individuals)};
        return std::int64_t{uniform(rng, 0, 9)};
    }
  }

  std::vector<std::string> some(const std::vector<std::string>& pool, int lo, int hi) {
    std::vector<std::string> out;
    if (pool.empty()) return out;
    int k = uniform(rng, lo, hi);
    for (int i = 0; i < k; ++i) out.push_back(pick(rng, pool));
    return out;
  }

  cdl::Term term(const std::vector<std::string>& vars) {
    int k = uniform(rng, 0, 3);
    if (k == 0 && !vars.empty()) {
      cdl::VarPath vp{pick(rng, vars), {}};
      std::vector<std::string> props = data_props;
      props.insert(props.end(), obj_props.begin(), obj_props.end());
      if (!props.empty()) {
        int hops = uniform(rng, 0, 2);
        for (int i = 0; i < hops; ++i) vp.path.push_back(pick(rng, props));
      }
      return cdl::Term{vp};
    }
    if (k == 1) return cdl::Term{cdl::Now{}};
    return cdl::Term{literal()};
  }

  cdl::Condition condition(const std::vector<std::string>& vars, int lo) {
    cdl::Condition c;
    int n = uniform(rng, lo, 3);
    for (int i = 0; i < n; ++i) {
      switch (uniform(rng, 0, 3)) {
        case 0: {
          cdl::NearAtom a{term(vars), term(vars), uniform(rng, 0, 5000) / 4.0};
          c.atoms.push_back(a);
          break;
        }
        case 1: c.atoms.push_back(cdl::WithinAtom{term(vars), term(vars)}); break;
        default:
          c.atoms.push_back(
              cdl::CompareAtom{term(vars), static_cast<CompareOp>(uniform(rng, 0, 5)), term(vars)});
      }
    }
    return c;
  }

  cdl::BoolExpr bool_expr(int depth) {
    if (depth == 0 || coin(rng, 0.35)) return cdl::BoolExpr::ref(pick(rng, situations));
    int k = uniform(rng, 0, 2);
    if (k == 0) return cdl::BoolExpr::negate(bool_expr(depth - 1));
    std::vector<cdl::BoolExpr> children;
    int n = uniform(rng, 2, 3);
    for (int i = 0; i < n; ++i) children.push_back(bool_expr(depth - 1));
    return k == 1 ? cdl::BoolExpr::all(std::move(children)) : cdl::BoolExpr::any(std::move(children));
  }

  cdl::Step step() {
    static const std::vector<std::string> fields{"f", "name", "distance", "g2"};
    switch (uniform(rng, 0, 6)) {
      case 0:
        return cdl::FilterStep{pick(rng, fields), static_cast<CompareOp>(uniform(rng, 0, 5)), literal()};
      case 1: return cdl::SortStep{pick(rng, fields), coin(rng)};
      case 2: return cdl::LimitStep{uniform(rng, 0, 100)};
      case 3: return cdl::ProjectStep{some(fields, 1, 3)};
      case 4: return cdl::SetStep{pick(rng, fields), literal()};
      case 5: return cdl::ReduceViewStep{some(fields, 1, 3)};
      default: return cdl::LanguageStep{coin(rng) ? "fr" : "en-US"};
    }
  }

  cdl::RuleClause rule() {
    return cdl::RuleClause{pick(rng, situations), some(adaptations, 0, 3)};
  }

  void add(cdl::StatementBody body) { doc.statements.push_back(cdl::Statement{std::move(body), {}}); }

  void statement() {
    int kind = uniform(rng, 0, 10);
    switch (kind) {
      case 0: {
        cdl::ClassDecl d;
        d.name = fresh("K");
        d.upper = coin(rng, 0.1);
        d.parents = some(classes, 0, 2);
        if (coin(rng, 0.3)) d.disjoint = some(classes, 1, 2);
        classes.push_back(d.name);
        add(d);
        return;
      }
      case 1: {
        cdl::PropertyDecl d;
        d.object = coin(rng, 0.4);
        d.name = fresh(d.object ? "r" : "p");
        d.domain = some(classes, 1, 2);
        static const std::vector<std::string> tags{"bool", "int", "float", "string", "geopoint", "timeinterval"};
        d.range = d.object ? pick(rng, classes) : pick(rng, tags);
        d.functional = coin(rng, 0.3);
        d.symmetric = coin(rng, 0.1);
        d.transitive = coin(rng, 0.1);
        d.part_of = coin(rng, 0.1);
        if (d.object && !obj_props.empty() && coin(rng, 0.2)) d.inverse_of = pick(rng, obj_props);
        if (coin(rng, 0.3)) {
          cdl::CardinalitySpec c;
          c.min = static_cast<std::uint32_t>(uniform(rng, 0, 3));
          if (coin(rng)) c.max = c.min + static_cast<std::uint32_t>(uniform(rng, 0, 3));
          d.cardinality = c;
        }
        (d.object ? obj_props : data_props).push_back(d.name);
        add(d);
        return;
      }
      case 2: {
        cdl::IndividualDecl d{fresh("ind"), some(classes, 1, 2)};
        individuals.push_back(d.name);
        add(d);
        return;
      }
      case 3: {
        if (individuals.empty() || (data_props.empty() && obj_props.empty())) return;
        cdl::AssertDecl d;
        d.subject = pick(rng, individuals);
        std::vector<std::string> props = data_props;
        props.insert(props.end(), obj_props.begin(), obj_props.end());
        d.property = pick(rng, props);
        d.value = literal();
        if (coin(rng, 0.3)) d.at = uniform(rng, 0, 100000);
        if (coin(rng, 0.3)) d.ttl = coin(rng) ? std::optional<Duration>{uniform(rng, 0, 1000)} : std::nullopt;
        if (coin(rng, 0.3)) d.source = coin(rng) ? "gps" : "profile";
        if (coin(rng, 0.3)) d.quality = uniform(rng, 0, 100) / 100.0;
        add(d);
        return;
      }
      case 4: {
        cdl::SituationDecl d;
        d.name = fresh("Sit");
        std::vector<std::string> vars;
        int n = uniform(rng, 0, 3);
        for (int i = 0; i < n; ++i) {
          std::string v = fmt::format("v{}", i);
          vars.push_back(v);
          d.head.push_back(cdl::HeadVar{v, pick(rng, classes)});
        }
        d.condition = condition(vars, 0);
        std::vector<std::string> props = data_props;
        props.insert(props.end(), obj_props.begin(), obj_props.end());
        if (!vars.empty() && !props.empty() && coin(rng, 0.3)) {
          d.derive = cdl::DeriveTemplate{pick(rng, vars), pick(rng, props), term(vars)};
        }
        situations.push_back(d.name);
        add(d);
        return;
      }
      case 5: {
        if (situations.empty()) return;
        cdl::CompositeDecl d{fresh("Comp"), bool_expr(3)};
        situations.push_back(d.name);
        add(d);
        return;
      }
      case 6: {
        cdl::AdaptationDecl d;
        d.name = fresh("Ad");
        d.join_point = static_cast<cdl::JoinPoint>(uniform(rng, 0, 2));
        int n = uniform(rng, 1, 4);
        for (int i = 0; i < n; ++i) d.steps.push_back(step());
        adaptations.push_back(d.name);
        add(d);
        return;
      }
      case 7: {
        cdl::ServiceDecl d;
        d.name = fresh("Svc");
        std::vector<std::string> concepts = classes;
        concepts.push_back("string");
        concepts.push_back("geopoint");
        d.inputs = some(concepts, 0, 2);
        d.outputs = some(concepts, 0, 2);
        if (coin(rng)) d.handler = coin(rng) ? "echo" : "pharmacyDirectory";
        d.is_static = coin(rng, 0.3);
        std::vector<std::string> principal{"principal"};
        if (coin(rng, 0.3)) d.precondition = condition(principal, 0);
        if (coin(rng, 0.2)) d.effect = condition(principal, 0);
        if (!situations.empty()) {
          int n = uniform(rng, 0, 2);
          for (int i = 0; i < n; ++i) d.rules.push_back(rule());
        }
        services.push_back(d.name);
        add(d);
        return;
      }
      case 8: {
        if (situations.empty()) return;
        cdl::GoalDecl d;
        d.name = fresh("Goal");
        std::vector<std::string> concepts = classes;
        concepts.push_back("Foreign");
        concepts.push_back("int");
        if (coin(rng)) d.inputs = some(concepts, 0, 2);
        d.outputs = some(concepts, 0, 2);
        d.related_situation = pick(rng, situations);
        add(d);
        return;
      }
      case 9: {
        cdl::MediatorDecl d;
        d.name = fresh("Med");
        int n = uniform(rng, 1, 3);
        for (int i = 0; i < n; ++i) d.maps.emplace_back(fresh("X"), pick(rng, classes));
        add(d);
        return;
      }
      default: {
        if (services.empty() || situations.empty()) return;
        add(cdl::RuleDecl{pick(rng, services), rule()});
        return;
      }
    }
  }
};

}  // namespace

cdl::Document document(Rng& rng) {
  DocGen g(rng);
  int n = uniform(rng, 1, 30);
  for (int i = 0; i < n; ++i) g.statement();
  return std::move(g.doc);
}

}  // namespace gen
