#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cas/kb/assertion.hpp"
#include "cas/kb/ontology.hpp"
#include "cas/value.hpp"

namespace cas::runtime {

// A raw observation as a source reports it.
struct ContextEvent {
  Instant at = 0;
  std::string subject;
  std::string property;  // source field name, before mapping
  Value value;
  // nullopt: use the source default. Inner nullopt: unbounded.
  std::optional<std::optional<Duration>> ttl;
  std::string source;
  std::optional<double> quality;
  bool operator==(const ContextEvent&) const = default;
};

// Per-source normalization.
struct SourceMapping {
  std::map<std::string, std::string> rename;  // field -> property
  std::map<std::string, double> scale;        // property -> numeric factor
  std::optional<Duration> ttl;                // default ttl; nullopt = unbounded
  double quality = 1.0;                       // default quality
  bool operator==(const SourceMapping&) const = default;
};

struct IngestConfig {
  std::map<std::string, SourceMapping> sources;
  // Reject events from sources without a mapping.
  bool strict = false;

  // JSON: {"sources": {"gps": {"ttl": 300, "rename": {...}, "scale": {...},
  // "quality": 0.9}}}. A null ttl is unbounded. Throws ConfigInvalid.
  static IngestConfig from_json(std::string_view text);
  static IngestConfig from_file(const std::string& path);
};

// Maps an event onto a schema-conformant assertion (rename, scale, type
// coercion, default ttl and quality). Throws UnknownSource in strict mode.
kb::Assertion normalize(const ContextEvent& e, const IngestConfig& config,
                        const kb::Ontology& ontology);

}  // namespace cas::runtime
