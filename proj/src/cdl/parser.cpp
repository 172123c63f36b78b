#include "cas/cdl/parser.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/core.h>

#include "cas/cdl/lexer.hpp"
#include "cas/error.hpp"
#include "cas/kb/ontology.hpp"

namespace cas::cdl {

namespace {

struct SyntaxError {
  Diagnostic diagnostic;
};

std::optional<CompareOp> compare_op_from(std::string_view s) {
  if (s == "==") return CompareOp::Eq;
  if (s == "!=") return CompareOp::Ne;
  if (s == "<") return CompareOp::Lt;
  if (s == "<=") return CompareOp::Le;
  if (s == ">") return CompareOp::Gt;
  if (s == ">=") return CompareOp::Ge;
  return std::nullopt;
}

// Identifier resolution is optional so the same machinery parses
// free-standing fragments (facts, records) without a scope.
class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags, NameScope* scope)
      : toks_(std::move(tokens)), diags_(diags), scope_(scope) {}

  Document document() {
    Document doc;
    while (!at_end()) {
      std::size_t first = pos_;
      std::size_t errors_before = error_count();
      try {
        Statement st = statement();
        if (error_count() == errors_before && scope_) scope_->declare(st);
        doc.statements.push_back(std::move(st));
      } catch (const SyntaxError& e) {
        diags_.push_back(e.diagnostic);
        recover(first);
      }
    }
    return doc;
  }

  // Fragment entry points.
  Value literal_only() {
    Value v = literal();
    expect_end();
    return v;
  }

  AssertDecl fact_only() {
    AssertDecl a;
    a.subject = expect_ident("subject").text;
    a.property = expect_ident("property").text;
    a.value = literal();
    assert_options(a, /*allow_at=*/false);
    expect_end();
    return a;
  }

  std::map<std::string, Value> record_only() {
    auto r = record();
    expect_end();
    return r;
  }

 private:
  // ---- token helpers ------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_end() const { return peek().kind == TokenKind::End; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is(TokenKind k) const { return peek().kind == k; }
  bool is_kw(std::string_view kw, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::Ident && peek(ahead).text == kw;
  }
  bool accept_kw(std::string_view kw) {
    if (!is_kw(kw)) return false;
    next();
    return true;
  }
  bool accept(TokenKind k) {
    if (!is(k)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const Token& at, const std::string& code, const std::string& message) {
    Span s = at.span;
    if (s.length == 0) s.length = 1;
    throw SyntaxError{Diagnostic{Severity::Error, code, message, s}};
  }
  [[noreturn]] void unexpected(const std::string& wanted) {
    const Token& t = peek();
    std::string got = t.kind == TokenKind::End ? "end of input" : fmt::format("'{}'", t.text);
    fail(t, "UnexpectedToken", fmt::format("expected {}, found {}", wanted, got));
  }

  const Token& expect(TokenKind k) {
    if (!is(k)) unexpected(std::string(to_string(k)));
    return next();
  }
  const Token& expect_ident(std::string_view what) {
    if (!is(TokenKind::Ident)) unexpected(std::string(what));
    return next();
  }
  void expect_kw(std::string_view kw) {
    if (!is_kw(kw)) unexpected(fmt::format("'{}'", kw));
    next();
  }
  void expect_end() {
    if (!at_end()) unexpected("end of input");
  }

  std::size_t error_count() const {
    return static_cast<std::size_t>(std::count_if(diags_.begin(), diags_.end(), [](const auto& d) {
      return d.severity == Severity::Error;
    }));
  }

  void recover(std::size_t first) {
    if (pos_ == first) next();
    while (!at_end()) {
      if (next().kind == TokenKind::Dot) return;
    }
  }

  void report(const Token& at, const std::string& code, const std::string& message) {
    Span s = at.span;
    if (s.length == 0) s.length = 1;
    diags_.push_back(Diagnostic{Severity::Error, code, message, s});
  }

  // ---- name resolution ----------------------------------------------------

  using Names = std::set<std::string, std::less<>>;

  void need(const Names NameScope::*ns, const Token& tok, std::string_view code,
            std::string_view what) {
    if (!scope_) return;
    if (!(scope_->*ns).count(tok.text)) {
      report(tok, std::string(code), fmt::format("unknown {} '{}'", what, tok.text));
    }
  }
  void need_class(const Token& t) { need(&NameScope::classes, t, "UnknownClass", "class"); }
  void need_class_or_datatype(const Token& t) {
    if (is_datatype_tag(t.text)) return;
    need_class(t);
  }
  void need_property(const Token& t) {
    need(&NameScope::properties, t, "UnknownProperty", "property");
  }
  void need_individual(const Token& t) {
    need(&NameScope::individuals, t, "UnknownIndividual", "individual");
  }
  void need_situation(const Token& t) {
    need(&NameScope::situations, t, "UnknownSituation", "situation");
  }
  void need_adaptation(const Token& t) {
    need(&NameScope::adaptations, t, "UnknownAdaptation", "adaptation");
  }
  void fresh(const Names NameScope::*ns, const Token& tok) {
    if (scope_ && (scope_->*ns).count(tok.text)) {
      report(tok, "DuplicateName", fmt::format("'{}' is already declared", tok.text));
    }
  }

  // ---- statements ---------------------------------------------------------

  Statement statement() {
    const Token& first = peek();
    if (first.kind != TokenKind::Ident) unexpected("a statement");
    Statement st;
    const std::string& kw = first.text;
    if (kw == "class" || kw == "upper") {
      st.body = class_decl();
    } else if (kw == "dataprop" || kw == "objprop") {
      st.body = property_decl();
    } else if (kw == "individual") {
      st.body = individual_decl();
    } else if (kw == "assert") {
      st.body = assert_decl();
    } else if (kw == "situation") {
      st.body = situation_decl();
    } else if (kw == "composite") {
      st.body = composite_decl();
    } else if (kw == "adaptation") {
      st.body = adaptation_decl();
    } else if (kw == "service") {
      st.body = service_decl();
    } else if (kw == "goal") {
      st.body = goal_decl();
    } else if (kw == "mediator") {
      st.body = mediator_decl();
    } else if (kw == "rule") {
      st.body = rule_decl();
    } else {
      fail(first, "UnexpectedToken", fmt::format("expected a statement, found '{}'", kw));
    }
    const Token& dot = expect(TokenKind::Dot);
    st.span = first.span;
    st.span.length = dot.span.offset + dot.span.length - first.span.offset;
    return st;
  }

  std::vector<std::string> ident_list(void (Parser::*check)(const Token&)) {
    std::vector<std::string> out;
    do {
      const Token& t = expect_ident("an identifier");
      if (check) (this->*check)(t);
      out.push_back(t.text);
    } while (accept(TokenKind::Comma));
    return out;
  }

  ClassDecl class_decl() {
    ClassDecl d;
    d.upper = accept_kw("upper");
    expect_kw("class");
    const Token& name = expect_ident("a class name");
    fresh(&NameScope::classes, name);
    d.name = name.text;
    if (is(TokenKind::Op) && peek().text == "<") {
      next();
      d.parents = ident_list(&Parser::need_class);
    }
    if (accept_kw("disjoint")) d.disjoint = ident_list(&Parser::need_class);
    return d;
  }

  PropertyDecl property_decl() {
    PropertyDecl d;
    d.object = next().text == "objprop";
    const Token& name = expect_ident("a property name");
    fresh(&NameScope::properties, name);
    d.name = name.text;
    expect(TokenKind::Colon);
    do {
      const Token& t = expect_ident("a domain class");
      need_class(t);
      d.domain.push_back(t.text);
    } while (accept(TokenKind::Pipe));
    expect(TokenKind::Arrow);
    const Token& range = expect_ident("a range");
    if (d.object) {
      need_class(range);
    } else if (!is_datatype_tag(range.text)) {
      report(range, "UnknownDatatype", fmt::format("unknown datatype '{}'", range.text));
    }
    d.range = range.text;
    while (is(TokenKind::Ident)) {
      const Token& c = next();
      if (c.text == "functional") {
        d.functional = true;
      } else if (c.text == "symmetric") {
        d.symmetric = true;
      } else if (c.text == "transitive") {
        d.transitive = true;
      } else if (c.text == "partof") {
        d.part_of = true;
      } else if (c.text == "inverseof") {
        const Token& inv = expect_ident("a property name");
        need_property(inv);
        d.inverse_of = inv.text;
      } else if (c.text == "card") {
        CardinalitySpec card;
        card.min = cardinality_bound();
        expect(TokenKind::DotDot);
        if (!accept(TokenKind::Star)) card.max = cardinality_bound();
        d.cardinality = card;
      } else {
        fail(c, "UnexpectedToken", fmt::format("unknown property characteristic '{}'", c.text));
      }
    }
    return d;
  }

  std::uint32_t cardinality_bound() {
    const Token& t = expect(TokenKind::Int);
    std::int64_t v = int_value(t);
    if (v < 0 || v > 1000000) fail(t, "InvalidLiteral", "cardinality bound out of range");
    return static_cast<std::uint32_t>(v);
  }

  IndividualDecl individual_decl() {
    expect_kw("individual");
    IndividualDecl d;
    const Token& name = expect_ident("an individual name");
    fresh(&NameScope::individuals, name);
    d.name = name.text;
    expect(TokenKind::Colon);
    d.classes = ident_list(&Parser::need_class);
    return d;
  }

  AssertDecl assert_decl() {
    expect_kw("assert");
    AssertDecl a;
    const Token& subject = expect_ident("a subject");
    need_individual(subject);
    a.subject = subject.text;
    const Token& prop = expect_ident("a property");
    need_property(prop);
    a.property = prop.text;
    a.value = literal();
    assert_options(a, /*allow_at=*/true);
    return a;
  }

  void assert_options(AssertDecl& a, bool allow_at) {
    while (is(TokenKind::Ident)) {
      const Token& opt = peek();
      if (opt.text == "at" && allow_at) {
        next();
        if (a.at) fail(opt, "DuplicateClause", "'at' given twice");
        a.at = int_value(expect(TokenKind::Int));
      } else if (opt.text == "ttl") {
        next();
        if (a.ttl) fail(opt, "DuplicateClause", "'ttl' given twice");
        if (accept_kw("inf")) {
          a.ttl = std::optional<Duration>{};
        } else {
          a.ttl = std::optional<Duration>{int_value(expect(TokenKind::Int))};
        }
      } else if (opt.text == "source") {
        next();
        if (a.source) fail(opt, "DuplicateClause", "'source' given twice");
        a.source = expect_ident("a source name").text;
      } else if (opt.text == "quality") {
        next();
        if (a.quality) fail(opt, "DuplicateClause", "'quality' given twice");
        a.quality = number_value();
      } else {
        break;
      }
    }
  }

  SituationDecl situation_decl() {
    expect_kw("situation");
    SituationDecl d;
    const Token& name = expect_ident("a situation name");
    fresh(&NameScope::situations, name);
    d.name = name.text;
    expect(TokenKind::LParen);
    std::set<std::string> vars;
    if (!is(TokenKind::RParen)) {
      do {
        const Token& v = expect(TokenKind::Var);
        if (!vars.insert(v.text).second) {
          report(v, "DuplicateName", fmt::format("variable '?{}' declared twice", v.text));
        }
        expect(TokenKind::Colon);
        const Token& cls = expect_ident("a class");
        need_class(cls);
        d.head.push_back(HeadVar{v.text, cls.text});
      } while (accept(TokenKind::Comma));
    }
    expect(TokenKind::RParen);
    expect(TokenKind::Assign);
    vars_ = &vars;
    d.condition = condition();
    if (accept_kw("derive")) {
      DeriveTemplate t;
      const Token& v = expect(TokenKind::Var);
      check_var(v);
      t.var = v.text;
      expect(TokenKind::PathDot);
      const Token& p = expect_ident("a property");
      need_property(p);
      t.property = p.text;
      expect(TokenKind::Equals);
      t.value = term();
      d.derive = std::move(t);
    }
    vars_ = nullptr;
    return d;
  }

  void check_var(const Token& v) {
    if (vars_ && !vars_->count(v.text)) {
      report(v, "UnknownVariable", fmt::format("variable '?{}' is not declared", v.text));
    }
  }

  Condition condition() {
    Condition c;
    if (is_kw("true") && peek(1).kind != TokenKind::Op) {
      next();
      return c;
    }
    c.atoms.push_back(atom());
    while (accept_kw("and")) c.atoms.push_back(atom());
    return c;
  }

  Atom atom() {
    if (is_kw("near") && peek(1).kind == TokenKind::LParen) {
      next();
      next();
      NearAtom n;
      n.a = term();
      expect(TokenKind::Comma);
      n.b = term();
      expect(TokenKind::Comma);
      const Token& r = peek();
      n.radius_meters = number_value();
      if (n.radius_meters < 0) report(r, "InvalidLiteral", "radius must be non-negative");
      expect(TokenKind::RParen);
      return n;
    }
    if (is_kw("within") && peek(1).kind == TokenKind::LParen) {
      next();
      next();
      WithinAtom w;
      w.interval = term();
      expect(TokenKind::Comma);
      w.time = term();
      expect(TokenKind::RParen);
      return w;
    }
    CompareAtom c;
    c.lhs = term();
    const Token& op = expect(TokenKind::Op);
    c.op = *compare_op_from(op.text);
    c.rhs = term();
    return c;
  }

  Term term() {
    if (is(TokenKind::Var)) {
      const Token& v = next();
      check_var(v);
      VarPath vp{v.text, {}};
      while (accept(TokenKind::PathDot)) {
        const Token& p = expect_ident("a property");
        need_property(p);
        vp.path.push_back(p.text);
      }
      return Term{vp};
    }
    if (is_kw("now")) {
      next();
      return Term{Now{}};
    }
    return Term{literal()};
  }

  CompositeDecl composite_decl() {
    expect_kw("composite");
    CompositeDecl d;
    const Token& name = expect_ident("a composite name");
    fresh(&NameScope::situations, name);
    d.name = name.text;
    expect(TokenKind::Assign);
    d.expr = or_expr();
    return d;
  }

  BoolExpr or_expr() {
    BoolExpr first = and_expr();
    if (!is_kw("or")) return first;
    std::vector<BoolExpr> parts{std::move(first)};
    while (accept_kw("or")) parts.push_back(and_expr());
    return BoolExpr::any(std::move(parts));
  }

  BoolExpr and_expr() {
    BoolExpr first = not_expr();
    if (!is_kw("and")) return first;
    std::vector<BoolExpr> parts{std::move(first)};
    while (accept_kw("and")) parts.push_back(not_expr());
    return BoolExpr::all(std::move(parts));
  }

  BoolExpr not_expr() {
    if (accept_kw("not")) return BoolExpr::negate(not_expr());
    if (accept(TokenKind::LParen)) {
      BoolExpr e = or_expr();
      expect(TokenKind::RParen);
      return e;
    }
    const Token& ref = expect_ident("a situation name");
    need_situation(ref);
    return BoolExpr::ref(ref.text);
  }

  AdaptationDecl adaptation_decl() {
    expect_kw("adaptation");
    AdaptationDecl d;
    const Token& name = expect_ident("an adaptation name");
    fresh(&NameScope::adaptations, name);
    d.name = name.text;
    expect_kw("at");
    const Token& jp = expect_ident("a join point");
    auto j = join_point_from(jp.text);
    if (!j) fail(jp, "UnexpectedToken", "expected Selection, PreInvoke or PostInvoke");
    d.join_point = *j;
    expect(TokenKind::Assign);
    do {
      d.steps.push_back(step());
    } while (accept(TokenKind::Pipe));
    return d;
  }

  Step step() {
    const Token& kw = expect_ident("a transform step");
    if (kw.text == "filter") {
      FilterStep f;
      f.field = expect_ident("a field").text;
      f.op = *compare_op_from(expect(TokenKind::Op).text);
      f.literal = literal();
      return f;
    }
    if (kw.text == "sortby") {
      SortStep s;
      s.field = expect_ident("a field").text;
      if (accept_kw("desc")) {
        s.descending = true;
      } else {
        expect_kw("asc");
      }
      return s;
    }
    if (kw.text == "limit") {
      const Token& n = expect(TokenKind::Int);
      LimitStep l{int_value(n)};
      if (l.n < 0) fail(n, "InvalidLiteral", "limit must be non-negative");
      return l;
    }
    if (kw.text == "project") return ProjectStep{ident_list(nullptr)};
    if (kw.text == "reduce_view") return ReduceViewStep{ident_list(nullptr)};
    if (kw.text == "set") {
      SetStep s;
      s.field = expect_ident("a field").text;
      expect(TokenKind::Equals);
      s.value = literal();
      return s;
    }
    if (kw.text == "language") return LanguageStep{expect(TokenKind::String).text};
    fail(kw, "UnexpectedToken", fmt::format("unknown transform step '{}'", kw.text));
  }

  std::vector<std::string> param_list() {
    expect(TokenKind::LParen);
    std::vector<std::string> out;
    if (!is(TokenKind::RParen)) {
      do {
        const Token& t = expect_ident("a class or datatype");
        need_class_or_datatype(t);
        out.push_back(t.text);
      } while (accept(TokenKind::Comma));
    }
    expect(TokenKind::RParen);
    return out;
  }

  // Goal concepts may come from a foreign ontology and be mapped by a
  // mediator, so they are not resolved here.
  std::vector<std::string> foreign_param_list() {
    expect(TokenKind::LParen);
    std::vector<std::string> out;
    if (!is(TokenKind::RParen)) out = ident_list(nullptr);
    expect(TokenKind::RParen);
    return out;
  }

  RuleClause rule_clause() {
    RuleClause r;
    expect_kw("when");
    const Token& when = expect_ident("a situation name");
    need_situation(when);
    r.when = when.text;
    expect_kw("apply");
    expect(TokenKind::LBracket);
    if (!is(TokenKind::RBracket)) r.apply = ident_list(&Parser::need_adaptation);
    expect(TokenKind::RBracket);
    return r;
  }

  ServiceDecl service_decl() {
    expect_kw("service");
    ServiceDecl d;
    const Token& name = expect_ident("a service name");
    fresh(&NameScope::services, name);
    d.name = name.text;
    bool seen_in = false, seen_out = false;
    while (is(TokenKind::Ident)) {
      const Token& c = peek();
      auto once = [&](bool& seen) {
        if (seen) fail(c, "DuplicateClause", fmt::format("'{}' given twice", c.text));
        seen = true;
      };
      if (c.text == "inputs") {
        once(seen_in);
        next();
        d.inputs = param_list();
      } else if (c.text == "outputs") {
        once(seen_out);
        next();
        d.outputs = param_list();
      } else if (c.text == "handler") {
        if (d.handler) fail(c, "DuplicateClause", "'handler' given twice");
        next();
        d.handler = expect_ident("a handler id").text;
      } else if (c.text == "static") {
        if (d.is_static) fail(c, "DuplicateClause", "'static' given twice");
        next();
        d.is_static = true;
      } else if (c.text == "pre" || c.text == "effect") {
        auto& slot = c.text == "pre" ? d.precondition : d.effect;
        if (slot) fail(c, "DuplicateClause", fmt::format("'{}' given twice", c.text));
        next();
        std::set<std::string> principal{std::string(kPrincipalVar)};
        vars_ = &principal;
        slot = condition();
        vars_ = nullptr;
      } else if (c.text == "rule") {
        next();
        d.rules.push_back(rule_clause());
      } else {
        break;
      }
    }
    return d;
  }

  GoalDecl goal_decl() {
    expect_kw("goal");
    GoalDecl d;
    const Token& name = expect_ident("a goal name");
    fresh(&NameScope::goals, name);
    d.name = name.text;
    expect_kw("requests");
    if (accept_kw("inputs")) d.inputs = foreign_param_list();
    expect_kw("outputs");
    d.outputs = foreign_param_list();
    expect_kw("relatedTo");
    const Token& sit = expect_ident("a situation name");
    need_situation(sit);
    d.related_situation = sit.text;
    return d;
  }

  MediatorDecl mediator_decl() {
    expect_kw("mediator");
    MediatorDecl d;
    const Token& name = expect_ident("a mediator name");
    fresh(&NameScope::mediators, name);
    d.name = name.text;
    expect_kw("maps");
    expect(TokenKind::LParen);
    do {
      std::string from = expect_ident("a concept").text;
      expect(TokenKind::Arrow);
      const Token& to = expect_ident("a class");
      need_class(to);
      d.maps.emplace_back(std::move(from), to.text);
    } while (accept(TokenKind::Comma));
    expect(TokenKind::RParen);
    return d;
  }

  RuleDecl rule_decl() {
    expect_kw("rule");
    RuleDecl d;
    const Token& svc = expect_ident("a service name");
    need(&NameScope::services, svc, "UnknownService", "service");
    d.service = svc.text;
    d.rule = rule_clause();
    return d;
  }

  // ---- literals -----------------------------------------------------------

  std::int64_t int_value(const Token& t) {
    std::int64_t v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
      fail(t, "InvalidLiteral", fmt::format("integer '{}' out of range", t.text));
    }
    return v;
  }

  double float_value(const Token& t) {
    double v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size() || !std::isfinite(v)) {
      fail(t, "InvalidLiteral", fmt::format("number '{}' out of range", t.text));
    }
    return v;
  }

  double number_value() {
    if (is(TokenKind::Int)) return static_cast<double>(int_value(next()));
    if (is(TokenKind::Float)) return float_value(next());
    unexpected("a number");
  }

  std::int64_t time_value() {
    const Token& t = peek();
    if (t.kind == TokenKind::Int) {
      std::int64_t v = int_value(next());
      if (v < 0 || v > kSecondsPerDay) fail(t, "InvalidLiteral", "seconds-of-day out of range");
      return v;
    }
    if (t.kind != TokenKind::Time) unexpected("a time of day");
    next();
    std::int64_t parts[3] = {0, 0, 0};
    int n = 0;
    std::string_view rest = t.text;
    while (true) {
      std::size_t j = rest.find(':');
      std::string_view piece = rest.substr(0, j);
      bool ok = n < 3 && !piece.empty() && piece.size() <= 2 && (n == 0 || piece.size() == 2);
      if (ok) {
        auto res = std::from_chars(piece.data(), piece.data() + piece.size(), parts[n]);
        ok = res.ec == std::errc() && res.ptr == piece.data() + piece.size();
      }
      if (!ok) fail(t, "InvalidLiteral", fmt::format("malformed time '{}'", t.text));
      ++n;
      if (j == std::string_view::npos) break;
      rest.remove_prefix(j + 1);
    }
    if (n < 2) fail(t, "InvalidLiteral", fmt::format("malformed time '{}'", t.text));
    std::int64_t secs = parts[0] * 3600 + parts[1] * 60 + parts[2];
    if (parts[1] >= 60 || parts[2] >= 60 || secs > kSecondsPerDay) {
      fail(t, "InvalidLiteral", fmt::format("time '{}' out of range", t.text));
    }
    return secs;
  }

  Value literal() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Int: return Value{int_value(next())};
      case TokenKind::Float: return Value{float_value(next())};
      case TokenKind::String: return Value{next().text};
      case TokenKind::LParen: {
        next();
        GeoPoint g;
        g.lat = number_value();
        expect(TokenKind::Comma);
        g.lon = number_value();
        expect(TokenKind::RParen);
        if (g.lat < -90 || g.lat > 90 || g.lon < -180 || g.lon > 180) {
          report(t, "InvalidLiteral", "geopoint outside valid latitude/longitude range");
        }
        return Value{g};
      }
      case TokenKind::Ident: {
        if (t.text == "true" || t.text == "false") return Value{next().text == "true"};
        if (t.text == "interval" && peek(1).kind == TokenKind::LParen) {
          next();
          next();
          TimeInterval iv;
          iv.start = time_value();
          expect(TokenKind::Comma);
          iv.end = time_value();
          expect(TokenKind::RParen);
          return Value{iv};
        }
        const Token& ref = next();
        need_individual(ref);
        return Value{IndividualRef{ref.text}};
      }
      default: unexpected("a literal");
    }
  }

  std::map<std::string, Value> record() {
    std::map<std::string, Value> r;
    expect(TokenKind::LBrace);
    if (!is(TokenKind::RBrace)) {
      do {
        const Token& f = expect_ident("a field name");
        expect(TokenKind::Equals);
        if (!r.emplace(f.text, literal()).second) {
          fail(f, "DuplicateName", fmt::format("field '{}' given twice", f.text));
        }
      } while (accept(TokenKind::Comma));
    }
    expect(TokenKind::RBrace);
    return r;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
  NameScope* scope_;
  const std::set<std::string>* vars_ = nullptr;
};

void clamp_spans(std::vector<Diagnostic>& diags, std::size_t text_size) {
  for (auto& d : diags) {
    if (text_size == 0) {
      d.span = Span{};
      continue;
    }
    if (d.span.offset >= text_size) {
      d.span.offset = text_size - 1;
      d.span.length = 1;
    }
    d.span.length = std::max<std::size_t>(1, std::min(d.span.length, text_size - d.span.offset));
  }
}

template <typename F>
auto parse_fragment(std::string_view text, F&& f) {
  std::vector<Diagnostic> diags;
  auto toks = tokenize(text, diags);
  if (!diags.empty()) throw Error(Errc::ParseError, diags.front().message);
  Parser p(std::move(toks), diags, nullptr);
  try {
    return f(p);
  } catch (const SyntaxError& e) {
    throw Error(Errc::ParseError, fmt::format("{} in '{}'", e.diagnostic.message, text));
  }
}

}  // namespace

NameScope NameScope::standard_prelude() {
  NameScope s;
  for (auto c : kb::kUpperClasses) s.classes.emplace(c);
  return s;
}

void NameScope::declare(const Statement& statement) {
  std::visit(
      [this](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ClassDecl>) classes.insert(d.name);
        if constexpr (std::is_same_v<T, PropertyDecl>) properties.insert(d.name);
        if constexpr (std::is_same_v<T, IndividualDecl>) individuals.insert(d.name);
        if constexpr (std::is_same_v<T, SituationDecl> || std::is_same_v<T, CompositeDecl>) {
          situations.insert(d.name);
        }
        if constexpr (std::is_same_v<T, AdaptationDecl>) adaptations.insert(d.name);
        if constexpr (std::is_same_v<T, ServiceDecl>) services.insert(d.name);
        if constexpr (std::is_same_v<T, GoalDecl>) goals.insert(d.name);
        if constexpr (std::is_same_v<T, MediatorDecl>) mediators.insert(d.name);
      },
      statement.body);
}

void NameScope::declare(const Document& document) {
  for (const auto& s : document.statements) declare(s);
}

ParseResult parse(std::string_view text, const ParseOptions& options) {
  ParseResult result;
  auto tokens = tokenize(text, result.diagnostics);
  NameScope scope = options.scope ? *options.scope : NameScope{};
  Parser parser(std::move(tokens), result.diagnostics, &scope);
  Document doc = parser.document();
  doc.source_name = options.source_name;
  clamp_spans(result.diagnostics, text.size());
  if (!has_errors(result.diagnostics)) result.document = std::move(doc);
  return result;
}

Value parse_literal(std::string_view text) {
  return parse_fragment(text, [](Parser& p) { return p.literal_only(); });
}

AssertDecl parse_fact(std::string_view text) {
  return parse_fragment(text, [](Parser& p) { return p.fact_only(); });
}

std::map<std::string, Value> parse_record(std::string_view text) {
  return parse_fragment(text, [](Parser& p) { return p.record_only(); });
}

}  // namespace cas::cdl
