#include "cas/kb/snapshot.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>

#include <fmt/core.h>

#include "cas/error.hpp"

namespace cas::kb {

namespace {

using Edge = std::pair<std::string, std::string>;

bool index_less(const Assertion& a, const Assertion& b) {
  if (a.subject != b.subject) return a.subject < b.subject;
  if (a.property != b.property) return a.property < b.property;
  return canonical_less(a, b);
}

void sort_unique(std::vector<Assertion>& v) {
  std::sort(v.begin(), v.end(), canonical_less);
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::set<Edge> transitive_closure(const std::set<Edge>& edges) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [s, o] : edges) adj[s].push_back(o);
  std::set<Edge> out;
  for (const auto& [start, _] : adj) {
    std::set<std::string> seen;
    std::deque<std::string> frontier(adj[start].begin(), adj[start].end());
    while (!frontier.empty()) {
      std::string n = std::move(frontier.front());
      frontier.pop_front();
      if (!seen.insert(n).second) continue;
      auto it = adj.find(n);
      if (it != adj.end()) frontier.insert(frontier.end(), it->second.begin(), it->second.end());
    }
    for (const auto& n : seen) out.emplace(start, n);
  }
  return out;
}

Assertion synthesized(const std::string& s, const std::string& p, const std::string& o,
                      Instant at) {
  Assertion a;
  a.subject = s;
  a.property = p;
  a.value = IndividualRef{o};
  a.timestamp = at;
  a.source = "reasoner";
  a.quality = 1.0;
  a.derived = true;
  return a;
}

}  // namespace

Snapshot::Snapshot(Instant at, std::vector<Assertion> candidates,
                   std::shared_ptr<const Ontology> ontology)
    : at_(at), ontology_(std::move(ontology)) {
  sort_unique(candidates);
  std::map<std::pair<std::string, std::string>, std::size_t> best;
  std::vector<bool> keep(candidates.size(), true);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& a = candidates[i];
    const PropertyDef* prop = ontology_->find_property(a.property);
    if (!prop || !prop->functional) continue;
    auto key = std::make_pair(a.subject, a.property);
    auto [it, inserted] = best.emplace(key, i);
    if (inserted) continue;
    if (preferred_over(a, candidates[it->second])) {
      keep[it->second] = false;
      it->second = i;
    } else {
      keep[i] = false;
    }
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (keep[i]) assertions_.push_back(std::move(candidates[i]));
  }
}

std::string Snapshot::serialize() const {
  std::string out;
  for (const auto& a : assertions_) {
    out += canonical_line(a);
    out += '\n';
  }
  return out;
}

std::string Snapshot::digest() const { return digest_hex(fmt::format("@{}\n", at_) + serialize()); }

bool Snapshot::operator==(const Snapshot& other) const {
  return at_ == other.at_ && assertions_ == other.assertions_;
}

FactIndex::FactIndex(const Snapshot& snapshot) {
  const Ontology& onto = snapshot.ontology();
  std::map<std::string, std::vector<const Assertion*>> by_property;
  for (const auto& a : snapshot.assertions()) by_property[a.property].push_back(&a);

  std::set<std::string> done;
  for (const auto& [name, prop] : onto.properties()) {
    if (!prop.is_object()) continue;
    if (done.count(name)) continue;
    const PropertyDef* inverse = prop.inverse_of ? onto.find_property(*prop.inverse_of) : nullptr;
    done.insert(name);
    if (inverse) done.insert(inverse->name);

    std::set<Edge> rel;
    std::map<Edge, std::vector<const Assertion*>> asserted_p;
    std::map<Edge, std::vector<const Assertion*>> asserted_q;
    for (const Assertion* a : by_property[name]) {
      if (const auto* ref = std::get_if<IndividualRef>(&a->value)) {
        rel.emplace(a->subject, ref->name);
        asserted_p[{a->subject, ref->name}].push_back(a);
      }
    }
    if (inverse) {
      for (const Assertion* a : by_property[inverse->name]) {
        if (const auto* ref = std::get_if<IndividualRef>(&a->value)) {
          rel.emplace(ref->name, a->subject);
          asserted_q[{a->subject, ref->name}].push_back(a);
        }
      }
    }
    bool symmetric = prop.symmetric || (inverse && inverse->symmetric);
    bool transitive = prop.closes_transitively() || (inverse && inverse->closes_transitively());
    if (symmetric) {
      std::set<Edge> swapped;
      for (const auto& [s, o] : rel) swapped.emplace(o, s);
      rel.insert(swapped.begin(), swapped.end());
    }
    if (transitive) rel = transitive_closure(rel);

    auto emit = [&](const std::string& pname, const std::set<Edge>& edges,
                    const std::map<Edge, std::vector<const Assertion*>>& asserted) {
      for (const auto& e : edges) {
        auto it = asserted.find(e);
        if (it != asserted.end()) {
          for (const Assertion* a : it->second) all_.push_back(*a);
        } else {
          all_.push_back(synthesized(e.first, pname, e.second, snapshot.at()));
        }
      }
    };
    emit(name, rel, asserted_p);
    if (inverse) {
      std::set<Edge> inv;
      for (const auto& [s, o] : rel) inv.emplace(o, s);
      emit(inverse->name, inv, asserted_q);
    }
    // Values that are not individual refs cannot occur after schema checks,
    // but keep them visible rather than silently dropping them.
    for (const auto* pname : {&name, inverse ? &inverse->name : nullptr}) {
      if (!pname) continue;
      for (const Assertion* a : by_property[*pname]) {
        if (!std::holds_alternative<IndividualRef>(a->value)) all_.push_back(*a);
      }
    }
  }
  for (const auto& a : snapshot.assertions()) {
    const PropertyDef* prop = onto.find_property(a.property);
    if (!prop || !prop->is_object()) all_.push_back(a);
  }

  std::sort(all_.begin(), all_.end(), index_less);
  all_.erase(std::unique(all_.begin(), all_.end()), all_.end());
  for (std::size_t i = 0; i < all_.size();) {
    std::size_t j = i;
    while (j < all_.size() && all_[j].subject == all_[i].subject &&
           all_[j].property == all_[i].property) {
      ++j;
    }
    ranges_[{all_[i].subject, all_[i].property}] = {i, j};
    i = j;
  }
}

std::span<const Assertion> FactIndex::lookup(const std::string& subject,
                                             const std::string& property) const {
  auto it = ranges_.find({subject, property});
  if (it == ranges_.end()) return {};
  return std::span<const Assertion>(all_).subspan(it->second.first,
                                                  it->second.second - it->second.first);
}

std::vector<Assertion> query(const Snapshot& snapshot, const Pattern& pattern) {
  if (pattern.property && !snapshot.ontology().find_property(*pattern.property)) {
    throw Error(Errc::UnknownProperty, fmt::format("unknown property '{}'", *pattern.property));
  }
  FactIndex index(snapshot);
  std::vector<Assertion> out;
  for (const auto& a : index.all()) {
    if (pattern.subject && a.subject != *pattern.subject) continue;
    if (pattern.property && a.property != *pattern.property) continue;
    if (pattern.value && !(a.value == *pattern.value)) continue;
    out.push_back(a);
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::Cardinality: return "CardinalityViolation";
    case ViolationKind::Disjointness: return "DisjointnessViolation";
    case ViolationKind::DanglingReference: return "DanglingReference";
  }
  return "?";
}

std::string format_violation(const Violation& v) {
  return fmt::format("{} {} {}", to_string(v.kind), v.subject, v.detail);
}

std::vector<Violation> check_consistency(const Snapshot& snapshot) {
  const Ontology& onto = snapshot.ontology();
  std::vector<Violation> out;

  std::map<std::pair<std::string, std::string>, std::vector<std::string>> values;
  for (const auto& a : snapshot.assertions()) {
    values[{a.subject, a.property}].push_back(format_value(a.value));
  }
  for (auto& [key, vals] : values) {
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  }

  for (const auto& [name, prop] : onto.properties()) {
    if (!prop.cardinality) continue;
    const Cardinality& card = *prop.cardinality;
    std::set<std::string> subjects;
    if (card.min > 0) {
      for (const auto& [ind, _] : onto.individuals()) {
        for (const auto& d : prop.domain) {
          if (onto.is_instance(ind, d)) subjects.insert(ind);
        }
      }
    }
    for (const auto& [key, vals] : values) {
      if (key.second == name) subjects.insert(key.first);
    }
    for (const auto& subject : subjects) {
      auto it = values.find({subject, name});
      std::size_t count = it == values.end() ? 0 : it->second.size();
      bool low = count < card.min;
      bool high = card.max && count > *card.max;
      if (low || high) {
        out.push_back({ViolationKind::Cardinality, subject,
                       fmt::format("{} count {} outside [{},{}]", name, count, card.min,
                                   card.max ? std::to_string(*card.max) : "*")});
      }
    }
  }

  for (const auto& [name, ind] : onto.individuals()) {
    std::vector<std::string> cls(ind.classes.begin(), ind.classes.end());
    for (std::size_t i = 0; i < cls.size(); ++i) {
      for (std::size_t j = i + 1; j < cls.size(); ++j) {
        if (onto.disjoint(cls[i], cls[j])) {
          out.push_back({ViolationKind::Disjointness, name,
                         fmt::format("{} disjoint {}", cls[i], cls[j])});
        }
      }
    }
  }

  for (const auto& a : snapshot.assertions()) {
    const auto* ref = std::get_if<IndividualRef>(&a.value);
    if (ref && !onto.find_individual(ref->name)) {
      out.push_back({ViolationKind::DanglingReference, a.subject,
                     fmt::format("{} -> {}", a.property, ref->name)});
    }
  }

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.kind, a.subject, a.detail) < std::tie(b.kind, b.subject, b.detail);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace cas::kb
