#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cas/cdl/ast.hpp"
#include "cas/value.hpp"

namespace cas::adaptation {

using Record = std::map<std::string, Value>;

// Generic record-set payload shared by requests and responses.
struct Payload {
  std::vector<Record> records;
  std::map<std::string, Value> params;
  std::optional<std::string> language;
  bool operator==(const Payload&) const = default;
};

// Total on every payload: unknown fields make filter atoms false, sort
// last, and are simply absent from projections.
Payload apply_transform(const cdl::Step& step, Payload payload);
Payload apply_steps(const std::vector<cdl::Step>& steps, Payload payload);

// One `{field=literal, ...}` line per record, then `params {...}` and
// `language "tag"` lines when present.
std::string format_payload(const Payload& p);
std::string format_record(const Record& r);
std::string payload_digest(const Payload& p);

// Inverse of format_payload. Throws ParseError.
Payload parse_payload(std::string_view text);

}  // namespace cas::adaptation
