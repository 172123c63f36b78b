#include "cas/runtime/ingest.hpp"

#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "cas/error.hpp"

namespace cas::runtime {

IngestConfig IngestConfig::from_json(std::string_view text) {
  using nlohmann::json;
  IngestConfig cfg;
  try {
    json doc = json::parse(text);
    if (doc.contains("strict")) cfg.strict = doc.at("strict").get<bool>();
    for (const auto& [name, body] : doc.at("sources").items()) {
      SourceMapping m;
      if (body.contains("ttl") && !body.at("ttl").is_null()) {
        m.ttl = body.at("ttl").get<Duration>();
        if (*m.ttl < 0) throw Error(Errc::ConfigInvalid, fmt::format("source '{}': negative ttl", name));
      }
      if (body.contains("rename")) m.rename = body.at("rename").get<std::map<std::string, std::string>>();
      if (body.contains("scale")) m.scale = body.at("scale").get<std::map<std::string, double>>();
      if (body.contains("quality")) m.quality = body.at("quality").get<double>();
      if (!(m.quality >= 0.0 && m.quality <= 1.0)) {
        throw Error(Errc::ConfigInvalid, fmt::format("source '{}': quality outside [0,1]", name));
      }
      cfg.sources.emplace(name, std::move(m));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigInvalid, e.what());
  }
  return cfg;
}

IngestConfig IngestConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigInvalid, fmt::format("cannot read '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

kb::Assertion normalize(const ContextEvent& e, const IngestConfig& config,
                        const kb::Ontology& ontology) {
  const SourceMapping* m = nullptr;
  if (auto it = config.sources.find(e.source); it != config.sources.end()) m = &it->second;
  if (!m && config.strict) {
    throw Error(Errc::UnknownSource, fmt::format("no mapping for source '{}'", e.source));
  }
  kb::Assertion a;
  a.subject = e.subject;
  a.property = e.property;
  a.value = e.value;
  a.timestamp = e.at;
  a.source = e.source;
  if (m) {
    if (auto r = m->rename.find(a.property); r != m->rename.end()) a.property = r->second;
    if (auto s = m->scale.find(a.property); s != m->scale.end()) {
      if (auto* i = std::get_if<std::int64_t>(&a.value)) {
        a.value = static_cast<double>(*i) * s->second;
      } else if (auto* d = std::get_if<double>(&a.value)) {
        a.value = *d * s->second;
      }
    }
  }
  a.value = ontology.normalize_value(a.property, std::move(a.value));
  if (e.ttl) {
    a.ttl = *e.ttl;
  } else if (m) {
    a.ttl = m->ttl;
  }
  a.quality = e.quality.value_or(m ? m->quality : 1.0);
  return a;
}

}  // namespace cas::runtime
