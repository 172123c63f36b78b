#include <cmath>

#include "cas/runtime/engine.hpp"

namespace cas::runtime {

namespace {

template <typename T>
const T* first_value(const kb::FactIndex& index, const std::string& subject,
                     const std::string& property) {
  for (const auto& a : index.lookup(subject, property)) {
    if (const auto* v = std::get_if<T>(&a.value)) return v;
  }
  return nullptr;
}

// Every known pharmacy with its status flags and, when both locations are
// known, the great-circle distance to the principal in meters (0.1 m).
adaptation::Payload pharmacy_directory(const adaptation::InvocationContext& ic,
                                       const adaptation::Payload& request) {
  kb::FactIndex index(ic.snapshot);
  const GeoPoint* here = first_value<GeoPoint>(index, ic.principal, "locatedAt");
  adaptation::Payload out;
  out.params = request.params;
  out.language = request.language;
  if (!ic.snapshot.ontology().has_class("Pharmacy")) return out;
  for (const auto& ph : ic.snapshot.ontology().instances_of("Pharmacy")) {
    adaptation::Record r{{"name", ph}};
    const GeoPoint* there = first_value<GeoPoint>(index, ph, "locatedAt");
    if (here && there) r["distance"] = std::round(haversine_meters(*here, *there) * 10.0) / 10.0;
    if (const bool* open = first_value<bool>(index, ph, "isOpen")) r["isOpen"] = *open;
    if (const bool* stock = first_value<bool>(index, ph, "hasMedication")) {
      r["hasMedication"] = *stock;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace

void register_fixture_handlers(adaptation::HandlerTable& table) {
  table.add("pharmacyDirectory", pharmacy_directory);
}

}  // namespace cas::runtime
