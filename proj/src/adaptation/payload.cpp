#include "cas/adaptation/payload.hpp"

#include <algorithm>

#include <fmt/core.h>

#include "cas/cdl/parser.hpp"
#include "cas/error.hpp"

namespace cas::adaptation {

namespace {

struct StepApplier {
  Payload& p;

  void operator()(const cdl::FilterStep& s) const {
    auto keep = [&](const Record& r) {
      auto it = r.find(s.field);
      return it != r.end() && compare(it->second, s.op, s.literal).value_or(false);
    };
    std::vector<Record> out;
    std::copy_if(p.records.begin(), p.records.end(), std::back_inserter(out), keep);
    p.records = std::move(out);
  }

  void operator()(const cdl::SortStep& s) const {
    std::stable_sort(p.records.begin(), p.records.end(), [&](const Record& a, const Record& b) {
      auto ia = a.find(s.field);
      auto ib = b.find(s.field);
      bool ha = ia != a.end(), hb = ib != b.end();
      if (ha != hb) return ha;  // records lacking the field go last
      if (!ha) return false;
      return s.descending ? value_less(ib->second, ia->second)
                          : value_less(ia->second, ib->second);
    });
  }

  void operator()(const cdl::LimitStep& s) const {
    auto n = static_cast<std::size_t>(std::max<std::int64_t>(0, s.n));
    if (p.records.size() > n) p.records.resize(n);
  }

  void project(const std::vector<std::string>& fields) const {
    for (auto& r : p.records) {
      Record kept;
      for (const auto& f : fields) {
        if (auto it = r.find(f); it != r.end()) kept.insert(*it);
      }
      r = std::move(kept);
    }
  }

  void operator()(const cdl::ProjectStep& s) const { project(s.fields); }

  void operator()(const cdl::SetStep& s) const {
    for (auto& r : p.records) r[s.field] = s.value;
  }

  void operator()(const cdl::ReduceViewStep& s) const {
    project(s.fields);
    p.params["view"] = std::string("reduced");
  }

  void operator()(const cdl::LanguageStep& s) const { p.language = s.tag; }
};

}  // namespace

Payload apply_transform(const cdl::Step& step, Payload payload) {
  std::visit(StepApplier{payload}, step);
  return payload;
}

Payload apply_steps(const std::vector<cdl::Step>& steps, Payload payload) {
  for (const auto& s : steps) payload = apply_transform(s, std::move(payload));
  return payload;
}

std::string format_record(const Record& r) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : r) {
    out += fmt::format("{}{}={}", first ? "" : ", ", k, format_value(v));
    first = false;
  }
  return out + "}";
}

std::string format_payload(const Payload& p) {
  std::string out;
  for (const auto& r : p.records) out += format_record(r) + "\n";
  if (!p.params.empty()) out += "params " + format_record(p.params) + "\n";
  if (p.language) out += "language " + format_value(Value{*p.language}) + "\n";
  return out;
}

std::string payload_digest(const Payload& p) { return digest_hex(format_payload(p)); }

Payload parse_payload(std::string_view text) {
  Payload p;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.rfind("params ", 0) == 0) {
      p.params = cdl::parse_record(line.substr(7));
    } else if (line.rfind("language ", 0) == 0) {
      Value v = cdl::parse_literal(line.substr(9));
      const auto* s = std::get_if<std::string>(&v);
      if (!s) throw Error(Errc::ParseError, "language expects a string");
      p.language = *s;
    } else {
      p.records.push_back(cdl::parse_record(line));
    }
  }
  return p;
}

}  // namespace cas::adaptation
