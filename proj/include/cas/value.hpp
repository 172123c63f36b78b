#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace cas {

// Logical time. Every instant and duration in the engine is whole seconds
// on a virtual clock; nothing reads the wall clock.
using Instant = std::int64_t;
using Duration = std::int64_t;

inline constexpr std::int64_t kSecondsPerDay = 86400;

struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
  bool operator==(const GeoPoint&) const = default;
};

// Seconds-of-day window [start, end). start > end wraps past midnight;
// start == end is empty. end may be 86400 ("24:00").
struct TimeInterval {
  std::int64_t start = 0;
  std::int64_t end = 0;
  bool operator==(const TimeInterval&) const = default;
};

struct IndividualRef {
  std::string name;
  bool operator==(const IndividualRef&) const = default;
  auto operator<=>(const IndividualRef&) const = default;
};

using Value = std::variant<bool, std::int64_t, double, std::string, GeoPoint,
                           TimeInterval, IndividualRef>;

enum class ValueType { Bool, Int, Float, String, GeoPoint, TimeInterval, Individual };

ValueType type_of(const Value& v) noexcept;
std::string_view to_string(ValueType t) noexcept;

// Datatype tags usable as a property range: bool, int, float, string,
// geopoint, timeinterval.
std::optional<ValueType> datatype_from_tag(std::string_view tag) noexcept;
bool is_datatype_tag(std::string_view tag) noexcept;

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
std::string_view to_string(CompareOp op) noexcept;

// nullopt when the operands are incomparable under `op` (different types,
// or an ordering op on a type without an order). Int and Float compare
// numerically with each other.
std::optional<bool> compare(const Value& lhs, CompareOp op, const Value& rhs);

// Strict total order over all values: type rank first (numbers share one
// rank), then the natural order of the type.
bool value_less(const Value& a, const Value& b);

// Canonical literal text, parseable back by the CDL literal grammar.
std::string format_value(const Value& v);
// Shortest round-trip representation; always carries a '.' or exponent so it
// reads back as a float.
std::string format_float(double d);
// Shortest round-trip representation, no float marker forced.
std::string format_number(double d);
// "HH:MM" or "HH:MM:SS".
std::string format_time_of_day(std::int64_t seconds);

std::optional<Value> coerce(const Value& v, ValueType target);

double haversine_meters(const GeoPoint& a, const GeoPoint& b) noexcept;
std::int64_t seconds_of_day(Instant t) noexcept;
bool within(const TimeInterval& interval, Instant t) noexcept;

// FNV-1a 64 bit, hex encoded. Used for snapshot and payload digests.
std::string digest_hex(std::string_view bytes);

}  // namespace cas
