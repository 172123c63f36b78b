#include "cas/value.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

namespace cas {

namespace {

constexpr double kEarthRadiusMeters = 6371000.0;

int type_rank(const Value& v) {
  switch (type_of(v)) {
    case ValueType::Bool: return 0;
    case ValueType::Int:
    case ValueType::Float: return 1;
    case ValueType::String: return 2;
    case ValueType::GeoPoint: return 3;
    case ValueType::TimeInterval: return 4;
    case ValueType::Individual: return 5;
  }
  return 6;
}

std::optional<double> as_number(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

template <typename T>
bool apply_op(const T& a, CompareOp op, const T& b) {
  switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Ge: return a >= b;
  }
  return false;
}

bool is_equality(CompareOp op) { return op == CompareOp::Eq || op == CompareOp::Ne; }

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace

ValueType type_of(const Value& v) noexcept {
  switch (v.index()) {
    case 0: return ValueType::Bool;
    case 1: return ValueType::Int;
    case 2: return ValueType::Float;
    case 3: return ValueType::String;
    case 4: return ValueType::GeoPoint;
    case 5: return ValueType::TimeInterval;
    default: return ValueType::Individual;
  }
}

std::string_view to_string(ValueType t) noexcept {
  switch (t) {
    case ValueType::Bool: return "bool";
    case ValueType::Int: return "int";
    case ValueType::Float: return "float";
    case ValueType::String: return "string";
    case ValueType::GeoPoint: return "geopoint";
    case ValueType::TimeInterval: return "timeinterval";
    case ValueType::Individual: return "individual";
  }
  return "?";
}

std::optional<ValueType> datatype_from_tag(std::string_view tag) noexcept {
  if (tag == "bool") return ValueType::Bool;
  if (tag == "int") return ValueType::Int;
  if (tag == "float") return ValueType::Float;
  if (tag == "string") return ValueType::String;
  if (tag == "geopoint") return ValueType::GeoPoint;
  if (tag == "timeinterval") return ValueType::TimeInterval;
  return std::nullopt;
}

bool is_datatype_tag(std::string_view tag) noexcept {
  return datatype_from_tag(tag).has_value();
}

std::string_view to_string(CompareOp op) noexcept {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

std::optional<bool> compare(const Value& lhs, CompareOp op, const Value& rhs) {
  auto ln = as_number(lhs);
  auto rn = as_number(rhs);
  if (ln && rn) {
    if (lhs.index() == rhs.index() && std::holds_alternative<std::int64_t>(lhs)) {
      return apply_op(std::get<std::int64_t>(lhs), op, std::get<std::int64_t>(rhs));
    }
    return apply_op(*ln, op, *rn);
  }
  if (lhs.index() != rhs.index()) return std::nullopt;
  if (auto* s = std::get_if<std::string>(&lhs)) {
    return apply_op(*s, op, std::get<std::string>(rhs));
  }
  if (!is_equality(op)) return std::nullopt;
  bool eq = lhs == rhs;
  return op == CompareOp::Eq ? eq : !eq;
}

bool value_less(const Value& a, const Value& b) {
  int ra = type_rank(a);
  int rb = type_rank(b);
  if (ra != rb) return ra < rb;
  if (ra == 1) {
    double da = *as_number(a);
    double db = *as_number(b);
    if (da != db) return da < db;
    // 1 and 1.0 are numerically equal; ints order first to stay strict.
    return a.index() < b.index();
  }
  switch (type_of(a)) {
    case ValueType::Bool: return std::get<bool>(a) < std::get<bool>(b);
    case ValueType::String: return std::get<std::string>(a) < std::get<std::string>(b);
    case ValueType::GeoPoint: {
      const auto& x = std::get<GeoPoint>(a);
      const auto& y = std::get<GeoPoint>(b);
      if (x.lat != y.lat) return x.lat < y.lat;
      return x.lon < y.lon;
    }
    case ValueType::TimeInterval: {
      const auto& x = std::get<TimeInterval>(a);
      const auto& y = std::get<TimeInterval>(b);
      if (x.start != y.start) return x.start < y.start;
      return x.end < y.end;
    }
    case ValueType::Individual:
      return std::get<IndividualRef>(a).name < std::get<IndividualRef>(b).name;
    default: return false;
  }
}

std::string format_number(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

std::string format_float(double d) {
  std::string s = format_number(d);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string format_time_of_day(std::int64_t seconds) {
  std::int64_t h = seconds / 3600;
  std::int64_t m = (seconds % 3600) / 60;
  std::int64_t s = seconds % 60;
  if (s == 0) return fmt::format("{:02}:{:02}", h, m);
  return fmt::format("{:02}:{:02}:{:02}", h, m, s);
}

std::string format_value(const Value& v) {
  switch (type_of(v)) {
    case ValueType::Bool: return std::get<bool>(v) ? "true" : "false";
    case ValueType::Int: return std::to_string(std::get<std::int64_t>(v));
    case ValueType::Float: return format_float(std::get<double>(v));
    case ValueType::String: return quote(std::get<std::string>(v));
    case ValueType::GeoPoint: {
      const auto& g = std::get<GeoPoint>(v);
      return "(" + format_number(g.lat) + ", " + format_number(g.lon) + ")";
    }
    case ValueType::TimeInterval: {
      const auto& t = std::get<TimeInterval>(v);
      return "interval(" + format_time_of_day(t.start) + ", " + format_time_of_day(t.end) + ")";
    }
    case ValueType::Individual: return std::get<IndividualRef>(v).name;
  }
  return {};
}

std::optional<Value> coerce(const Value& v, ValueType target) {
  ValueType source = type_of(v);
  if (source == target) return v;
  if (source == ValueType::Int && target == ValueType::Float) {
    return Value{static_cast<double>(std::get<std::int64_t>(v))};
  }
  if (source == ValueType::Float && target == ValueType::Int) {
    double d = std::get<double>(v);
    if (std::isfinite(d) && std::trunc(d) == d && std::fabs(d) < 9.0e15) {
      return Value{static_cast<std::int64_t>(d)};
    }
    return std::nullopt;
  }
  if (source == ValueType::String && target == ValueType::Bool) {
    const auto& s = std::get<std::string>(v);
    if (s == "true") return Value{true};
    if (s == "false") return Value{false};
  }
  return std::nullopt;
}

double haversine_meters(const GeoPoint& a, const GeoPoint& b) noexcept {
  constexpr double to_rad = std::numbers::pi / 180.0;
  double dlat = (b.lat - a.lat) * to_rad;
  double dlon = (b.lon - a.lon) * to_rad;
  double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
             std::cos(a.lat * to_rad) * std::cos(b.lat * to_rad) *
                 std::sin(dlon / 2) * std::sin(dlon / 2);
  s = std::min(1.0, std::max(0.0, s));
  return 2.0 * kEarthRadiusMeters * std::asin(std::sqrt(s));
}

std::int64_t seconds_of_day(Instant t) noexcept {
  std::int64_t r = t % kSecondsPerDay;
  return r < 0 ? r + kSecondsPerDay : r;
}

bool within(const TimeInterval& interval, Instant t) noexcept {
  std::int64_t s = seconds_of_day(t);
  if (interval.start == interval.end) return false;
  if (interval.start < interval.end) return interval.start <= s && s < interval.end;
  return s >= interval.start || s < interval.end;
}

std::string digest_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace cas
