#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cas {

// One code per failure the engine can report. Violations found by
// consistency checks are data, not errors, and do not appear here.
enum class Errc {
  InvalidArgument,
  // ontology / store
  DuplicateName,
  UnknownParent,
  UnknownClass,
  CycleIntroduced,
  InvalidProperty,
  UnknownProperty,
  UnknownSubject,
  UnknownIndividual,
  RangeViolation,
  DomainViolation,
  NegativeTtl,
  InvalidQuality,
  // situations
  UnknownSituation,
  CyclicComposite,
  NegationCycle,
  NotActive,
  // registry
  DuplicateId,
  UnresolvedReference,
  UnknownHandler,
  MissingAdaptation,
  InvalidMediator,
  UnresolvedGoal,
  UnknownService,
  // adaptation pipeline
  UnknownGoal,
  NoMatch,
  PreconditionUnsatisfied,
  UnknownAdaptationId,
  // runtime
  UnknownSource,
  ParseError,
  ValidationError,
  ScenarioError,
  ConfigInvalid,
  BindFailure,
};

std::string_view to_string(Errc code) noexcept;
std::optional<Errc> errc_from_string(std::string_view name) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  // Message without the "Code: " prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace cas
