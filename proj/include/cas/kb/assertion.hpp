#pragma once

#include <optional>
#include <string>

#include "cas/value.hpp"

namespace cas::kb {

// A timestamped context fact. ttl == nullopt means unbounded validity.
struct Assertion {
  std::string subject;
  std::string property;
  Value value;
  Instant timestamp = 0;
  std::optional<Duration> ttl;
  std::string source;
  double quality = 1.0;
  bool derived = false;

  std::optional<Instant> valid_until() const {
    if (!ttl) return std::nullopt;
    return timestamp + *ttl;
  }
  // timestamp <= t < valid_until
  bool visible_at(Instant t) const {
    if (t < timestamp) return false;
    auto until = valid_until();
    return !until || t < *until;
  }

  bool operator==(const Assertion&) const = default;
};

// Tab separated: subject, property, value, timestamp, valid_until, source,
// quality, derived. Unbounded validity prints as "inf".
std::string canonical_line(const Assertion& a);

// Order used everywhere assertions are listed: by canonical line.
bool canonical_less(const Assertion& a, const Assertion& b);

// Functional-property conflict order: later timestamp, then higher quality,
// then smaller source, then the canonical line as final tie-break.
bool preferred_over(const Assertion& a, const Assertion& b);

}  // namespace cas::kb
