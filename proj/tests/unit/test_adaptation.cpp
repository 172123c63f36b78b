#include <doctest.h>

#include "cas/adaptation/pipeline.hpp"
#include "cas/error.hpp"
#include "cas/runtime/engine.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace cas;
using namespace cas::adaptation;

namespace {

const std::string kFixture = std::string(CAS_FIXTURE_DIR) + "/ehealth.cdl";

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::InvalidArgument;
}

Payload records(std::initializer_list<std::int64_t> ds) {
  Payload p;
  for (auto d : ds) p.records.push_back({{"d", d}});
  return p;
}

// Fixture engine with user1 next to a closed, out-of-stock ph1.
std::unique_ptr<runtime::Engine> nearest_engine() {
  auto e = std::make_unique<runtime::Engine>();
  e->load_file(kFixture);
  e->assert_fact({"user1", "locatedAt", GeoPoint{34.020, -6.841}, 100, std::nullopt, "gps", 1.0, false});
  e->assert_fact({"ph1", "isOpen", false, 100, std::nullopt, "status", 1.0, false});
  e->assert_fact({"ph1", "hasMedication", false, 100, std::nullopt, "status", 1.0, false});
  return e;
}

RequestEnvelope request(std::string goal, Instant at, std::string id = "") {
  RequestEnvelope r;
  r.request_id = std::move(id);
  r.goal = std::move(goal);
  r.at = at;
  r.principal = "user1";
  return r;
}

// Two services with equal signatures, a toggleable situation and two rules
// woven at the same join point.
const char* kTwoServices = R"(
class Item < Environment .
dataprop flag : User -> bool .
individual u : User .
situation On(?u: User) := ?u.flag == true .
adaptation First at PostInvoke := set tag = "first" | sortby n desc .
adaptation Second at PostInvoke := limit 2 | set tag = "second" .
adaptation PickB at Selection := filter service == "B" .
service A outputs (Item) rule when On apply [First] rule when On apply [Second] .
service B outputs (Item) static .
goal Want requests outputs (Item) relatedTo On .
)";

}  // namespace

TEST_CASE("transform examples") {
  auto sorted = apply_steps({cdl::SortStep{"d", false}}, records({5, 2, 9}));
  CHECK(sorted == records({2, 5, 9}));
  CHECK(apply_steps({cdl::LimitStep{3}}, records({1, 2})).records.size() == 2);
  auto mixed = records({3, 1});
  mixed.records.insert(mixed.records.begin(), Record{{"x", std::int64_t{0}}});
  auto out = apply_steps({cdl::SortStep{"d", true}}, mixed);
  CHECK(out.records.back().count("x"));
  CHECK(apply_steps({cdl::FilterStep{"missing", CompareOp::Eq, std::int64_t{1}}}, records({1})).records.empty());
  auto projected = apply_steps({cdl::ProjectStep{{"missing"}}}, records({1}));
  REQUIRE(projected.records.size() == 1);
  CHECK(projected.records[0].empty());
  auto reduced = apply_steps({cdl::ReduceViewStep{{"d"}}}, records({1}));
  CHECK(reduced.params.at("view") == Value{std::string("reduced")});
  CHECK(apply_steps({cdl::LanguageStep{"fr"}}, {}).language == std::optional<std::string>{"fr"});
}

TEST_CASE("random pipelines agree with the reference evaluator") {
  gen::Rng rng(514);
  for (int i = 0; i < 300; ++i) {
    auto p = gen::payload(rng);
    auto steps = gen::steps(rng);
    CHECK(apply_steps(steps, p) == oracle::transform(steps, p));
  }
}

TEST_CASE("payload text round-trips") {
  gen::Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    auto p = gen::payload(rng);
    CHECK(parse_payload(format_payload(p)) == p);
  }
  CHECK_THROWS_AS(parse_payload("{a=}"), Error);
}

TEST_CASE("sync notify resolves with the service and the active adaptation") {
  auto e = nearest_engine();
  auto t = e->notify(request("FindPharmacyGoal", 120), Mode::Sync);
  CHECK(t.ready());
  const auto& r = t.get().response;
  CHECK(r.service == "SearchingPharmacy");
  CHECK(r.request_id == "req-1");
  REQUIRE(r.applied.size() == 1);
  CHECK(r.applied[0].adaptation == "FindingNearest");
  CHECK(r.applied[0].situation == "NearestPharmacy");
  CHECK(r.applied[0].join_point == cdl::JoinPoint::PostInvoke);
  CHECK(r.payload.records.size() == 3);
  CHECK(t.get().trace.situations.front() == "NearestPharmacy(p=ph1, u=user1)");
}

TEST_CASE("async result equals sync result") {
  auto e = nearest_engine();
  auto sync = e->notify(request("FindPharmacyGoal", 120, "x"), Mode::Sync).get();
  auto async = e->notify(request("FindPharmacyGoal", 120, "x"), Mode::Async).get();
  CHECK(sync == async);
  CHECK(format_response(sync.response) == format_response(async.response));
  CHECK(code_of([&] { e->notify(request("Nope", 120), Mode::Async); }) == Errc::UnknownGoal);
}

TEST_CASE("service identification under row 1") {
  auto e = nearest_engine();
  auto snap = e->snapshot_at(120);
  auto id = identify_service(snap, request("FindPharmacyGoal", 120, "r"), e->context());
  CHECK(id.service == "SearchingPharmacy");
  CHECK(id.evaluation.is_active("NearestPharmacy"));
}

TEST_CASE("no service for a goal is NoMatch") {
  runtime::Engine e;
  e.load("class Item < Environment .\nsituation Any(?u: User) := true .\ngoal Want requests outputs (Item) relatedTo Any .",
         "g.cdl");
  CHECK(code_of([&] { e.invoke("Want", "user1", 0, {}); }) == Errc::NoMatch);
}

TEST_CASE("equal matches pick the smaller service id; selection can override") {
  runtime::Engine e;
  e.load(kTwoServices, "two.cdl");
  CHECK(e.invoke("Want", "u", 0, {}).response.service == "A");

  runtime::Engine sel;
  std::string doc = kTwoServices;
  doc += "rule A when On apply [PickB] .\nassert u flag true .\n";
  sel.load(doc, "two.cdl");
  auto out = sel.invoke("Want", "u", 0, {});
  CHECK(out.response.service == "B");
  REQUIRE_FALSE(out.response.applied.empty());
  CHECK(out.response.applied.front().join_point == cdl::JoinPoint::Selection);
}

TEST_CASE("no active situation leaves the handler output untouched") {
  runtime::Engine e;
  e.load_file(kFixture);
  auto out = e.invoke("FindPharmacyGoal", "user1", 0, {});
  CHECK(out.response.applied.empty());
  HandlerTable table;
  runtime::register_fixture_handlers(table);
  auto snap = e.snapshot_at(0);
  std::string principal = "user1";
  CHECK(out.response.payload == table.find("pharmacyDirectory")(InvocationContext{snap, principal, 0}, {}));
}

TEST_CASE("two rules at one join point compose in declaration order") {
  runtime::Engine e;
  e.load(std::string(kTwoServices) + "assert u flag true .\n", "two.cdl");
  Payload in = records({1, 3, 2});
  for (auto& r : in.records) r["n"] = r["d"];
  auto out = e.invoke("Want", "u", 0, in);
  REQUIRE(out.response.applied.size() == 2);
  CHECK(out.response.applied[0].adaptation == "First");
  CHECK(out.response.applied[1].adaptation == "Second");
  std::vector<cdl::Step> manual{cdl::SetStep{"tag", std::string("first")}, cdl::SortStep{"n", true},
                                cdl::LimitStep{2}, cdl::SetStep{"tag", std::string("second")}};
  CHECK(out.response.payload == oracle::transform(manual, in));
}

TEST_CASE("unsatisfied precondition is reported") {
  runtime::Engine e;
  e.load(R"(
class Item < Environment .
dataprop vip : User -> bool .
individual u : User .
service Gate outputs (Item) static pre ?principal.vip == true .
situation Any(?u: User) := true .
goal Want requests outputs (Item) relatedTo Any .
)",
         "pre.cdl");
  CHECK(code_of([&] { e.invoke("Want", "u", 0, {}); }) == Errc::PreconditionUnsatisfied);
  e.assert_fact({"u", "vip", true, 0, std::nullopt, "t", 1.0, false});
  CHECK(e.invoke("Want", "u", 0, {}).response.service == "Gate");
}

TEST_CASE("handler table") {
  HandlerTable t;
  CHECK(t.ids().count("echo"));
  CHECK(code_of([&] { t.find("nope"); }) == Errc::UnknownHandler);
  t.add("h", [](const InvocationContext&, const Payload& p) { return p; });
  CHECK(code_of([&] { t.add("h", [](const InvocationContext&, const Payload& p) { return p; }); }) ==
        Errc::DuplicateId);
}

TEST_CASE("trace records every executed step") {
  auto e = nearest_engine();
  auto out = e->invoke("FindPharmacyGoal", "user1", 120, {});
  REQUIRE(out.trace.steps.size() == 2);
  CHECK(out.trace.steps[0].step == "sortby distance asc");
  CHECK(out.trace.steps[1].step == "limit 3");
  auto text = e->trace(out.response.trace_id);
  REQUIRE(text.has_value());
  for (auto section : {"SNAPSHOT-DIGEST", "SITUATIONS", "MATCHING", "WEAVE", "STEPS"}) {
    CHECK(text->find(section) != std::string::npos);
  }
}
