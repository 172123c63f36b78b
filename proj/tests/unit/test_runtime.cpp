#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cas/error.hpp"
#include "cas/runtime/engine.hpp"
#include "cas/runtime/ingest.hpp"
#include "cas/runtime/scenario.hpp"

using namespace cas;
using namespace cas::runtime;

namespace {

const std::string kFixtures = CAS_FIXTURE_DIR;

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::InvalidArgument;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

IngestConfig fixture_sources() { return IngestConfig::from_file(kFixtures + "/sources.json"); }

Scenario fixture_scenario(const std::string& name) {
  return load_scenario(kFixtures + "/scenarios/" + name + ".scn");
}

kb::Assertion expect(std::string s, std::string p, Value v, Instant ts, std::optional<Duration> ttl,
                     std::string source, double q) {
  return kb::Assertion{std::move(s), std::move(p), std::move(v), ts, ttl, std::move(source), q, false};
}

}  // namespace

TEST_CASE("a GPS event gets the source's default ttl and quality") {
  Engine e(EngineOptions{fixture_sources()});
  e.load_file(kFixtures + "/ehealth.cdl");
  auto id = e.ingest(ContextEvent{100, "user1", "locatedAt", GeoPoint{34.02, -6.841}, std::nullopt, "gps", std::nullopt});
  const auto& a = e.store().facts().at(id);
  CHECK(a.ttl == std::optional<Duration>{300});
  CHECK(a.quality == 0.9);
  auto explicit_ttl =
      e.ingest(ContextEvent{100, "user1", "locatedAt", GeoPoint{34.02, -6.841}, std::optional<Duration>{}, "gps", 0.5});
  CHECK_FALSE(e.store().facts().at(explicit_ttl).ttl.has_value());
  CHECK(e.store().facts().at(explicit_ttl).quality == 0.5);
}

TEST_CASE("ingest config parsing") {
  auto c = fixture_sources();
  CHECK(c.sources.at("wearable").rename.at("pos") == "locatedAt");
  CHECK_FALSE(c.sources.at("device").ttl.has_value());
  CHECK(code_of([] { IngestConfig::from_json("{\"sources\": {\"gps\": {\"ttl\": -1}}}"); }) == Errc::ConfigInvalid);
  CHECK(code_of([] { IngestConfig::from_json("not json"); }) == Errc::ConfigInvalid);
  IngestConfig strict;
  strict.strict = true;
  Engine e(EngineOptions{strict});
  e.load_file(kFixtures + "/ehealth.cdl");
  CHECK(code_of([&] { e.ingest(ContextEvent{0, "ph1", "isOpen", true, std::nullopt, "radio", std::nullopt}); }) ==
        Errc::UnknownSource);
}

TEST_CASE("a range violation names the offending event") {
  auto s = parse_scenario(
      "scenario bad\nload ../ehealth.cdl\n"
      "at=1 assert ph1 isOpen true\n"
      "at=2 assert ph1 isOpen 42\n",
      kFixtures + "/scenarios");
  try {
    replay(s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RangeViolation);
    CHECK(e.detail().rfind("event 2:", 0) == 0);
  }
}

TEST_CASE("the twelve ingest events produce the expected store") {
  auto s = fixture_scenario("ehealth-ingest");
  Engine e(scenario_options(s));
  e.load_file(kFixtures + "/ehealth.cdl");
  std::size_t events = 0;
  for (const auto& step : s.steps) {
    if (const auto* ev = std::get_if<ContextEvent>(&step)) {
      e.ingest(*ev);
      ++events;
    }
  }
  CHECK(events == 12);
  std::vector<kb::Assertion> got;
  for (const auto& a : e.store().facts()) {
    if (a.source != "cdl") got.push_back(a);
  }
  const std::vector<kb::Assertion> want{
      expect("user1", "uses", IndividualRef{"phone1"}, 10, std::nullopt, "profile", 1.0),
      expect("user1", "preferredLanguage", std::string("fr"), 10, std::nullopt, "preferences", 1.0),
      expect("phone1", "screenWidth", std::int64_t{1080}, 10, std::nullopt, "device", 1.0),
      expect("phone1", "batteryLevel", 0.87, 20, 600, "wearable", 0.8),
      expect("phone1", "locatedAt", GeoPoint{34.021, -6.841}, 20, 600, "wearable", 0.8),
      expect("ph1", "isOpen", false, 30, 3600, "pharmacyStatus", 1.0),
      expect("ph1", "hasMedication", false, 30, 3600, "pharmacyStatus", 1.0),
      expect("user1", "locatedAt", GeoPoint{34.060, -6.841}, 40, 300, "gps", 0.9),
      expect("user1", "locatedAt", GeoPoint{34.020, -6.841}, 200, 300, "gps", 0.9),
      expect("ph1", "isOpen", true, 200, 3600, "pharmacyStatus", 1.0),
      expect("ph1", "hasMedication", true, 250, 3600, "pharmacyStatus", 1.0),
      expect("ph2", "isOpen", false, 260, 3600, "pharmacyStatus", 0.5),
  };
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CAPTURE(i);
    CHECK(got[i].subject == want[i].subject);
    CHECK(got[i].property == want[i].property);
    if (const auto* d = std::get_if<double>(&want[i].value)) {
      CHECK(std::get<double>(got[i].value) == doctest::Approx(*d).epsilon(1e-12));
    } else {
      CHECK(got[i].value == want[i].value);
    }
    CHECK(got[i].timestamp == want[i].timestamp);
    CHECK(got[i].ttl == want[i].ttl);
    CHECK(got[i].source == want[i].source);
    CHECK(got[i].quality == want[i].quality);
  }
}

TEST_CASE("nearest scenario transcript") {
  auto s = fixture_scenario("ehealth-nearest");
  std::string t = replay(s, scenario_options(s));
  CHECK(t == read_file(kFixtures + "/golden/ehealth-nearest.txt"));
  CHECK(t.find("  NearestPharmacy(p=ph1, u=user1)\n") != std::string::npos);
  CHECK(t.find("  service SearchingPharmacy\n") != std::string::npos);
  CHECK(t.find("applied PostInvoke FindingNearest") != std::string::npos);
  CHECK(t.find("payload 3 records") != std::string::npos);
}

TEST_CASE("every golden transcript replays") {
  for (auto name : {"ehealth-nearest", "ehealth-open", "ehealth-medication", "ehealth-expiry", "ehealth-reduceview",
                    "ehealth-ingest", "empty"}) {
    CAPTURE(name);
    auto s = fixture_scenario(name);
    CHECK(replay(s, scenario_options(s)) == read_file(kFixtures + "/golden/" + name + ".txt"));
  }
}

TEST_CASE("no events and one situations probe") {
  auto s = parse_scenario("scenario quiet\nload ../ehealth.cdl\nat=0 situations\n", kFixtures + "/scenarios");
  CHECK(replay(s) == "scenario quiet\nprobe 1 at=0 situations\n  (none)\nevents 0\n");
}

TEST_CASE("swapping same-timestamp events leaves the transcript unchanged") {
  auto s = fixture_scenario("ehealth-nearest");
  auto swapped = s;
  std::swap(swapped.steps[0], swapped.steps[1]);
  CHECK(replay(swapped, scenario_options(swapped)) == replay(s, scenario_options(s)));
  std::swap(swapped.steps[1], swapped.steps[2]);
  CHECK(replay(swapped, scenario_options(swapped)) == replay(s, scenario_options(s)));
}

TEST_CASE("scenario parse errors name the line") {
  auto check_line = [](const std::string& text, const std::string& prefix) {
    try {
      parse_scenario(text);
      FAIL("expected ScenarioError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ScenarioError);
      CHECK(e.detail().rfind(prefix, 0) == 0);
    }
  };
  check_line("scenario s\nat=5 situations\nat=3 situations\n", "line 3:");
  check_line("scenario s\nat=x situations\n", "line 2:");
  check_line("scenario s\nat=1 dance\n", "line 2:");
  check_line("bogus\n", "line 1:");
}

TEST_CASE("event lines round-trip through their canonical form") {
  std::string text =
      "at=5 assert user1 locatedAt (34.02, -6.841) ttl 30 source gps quality 0.5\n"
      "at=6 assert ph1 isOpen true ttl inf\n"
      "at=7 assert ph1 openHours interval(20:00, 09:00)\n";
  auto events = parse_events(text);
  REQUIRE(events.size() == 3);
  CHECK(events[1].source == "scenario");
  std::string again;
  for (const auto& e : events) again += format_event(e) + "\n";
  CHECK(parse_events(again) == events);
  CHECK(code_of([] { parse_events("at=1 situations\n"); }) == Errc::ParseError);
}

TEST_CASE("engine load is atomic") {
  Engine e;
  e.load_file(kFixtures + "/ehealth.cdl");
  std::string before = e.services_cdl();
  CHECK(code_of([&] { e.load("service Broken outputs (Pharmacy) static .\nclass Bad < Ghost .", "bad.cdl"); }) ==
        Errc::ParseError);
  CHECK(e.services_cdl() == before);
  CHECK(code_of([&] { e.load("class Pharmacy < Service .", "dup.cdl"); }) == Errc::ParseError);
  CHECK(code_of([&] {
          e.load("dataprop flag : User -> bool .\nsituation S(?u: User) := ?u.locatedAt == ?u.flag .", "t.cdl");
        }) == Errc::ValidationError);
  CHECK(e.services_cdl() == before);
}
