#include "cas/error.hpp"

namespace cas {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::UnknownParent: return "UnknownParent";
    case Errc::UnknownClass: return "UnknownClass";
    case Errc::CycleIntroduced: return "CycleIntroduced";
    case Errc::InvalidProperty: return "InvalidProperty";
    case Errc::UnknownProperty: return "UnknownProperty";
    case Errc::UnknownSubject: return "UnknownSubject";
    case Errc::UnknownIndividual: return "UnknownIndividual";
    case Errc::RangeViolation: return "RangeViolation";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::NegativeTtl: return "NegativeTtl";
    case Errc::InvalidQuality: return "InvalidQuality";
    case Errc::UnknownSituation: return "UnknownSituation";
    case Errc::CyclicComposite: return "CyclicComposite";
    case Errc::NegationCycle: return "NegationCycle";
    case Errc::NotActive: return "NotActive";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::UnresolvedReference: return "UnresolvedReference";
    case Errc::UnknownHandler: return "UnknownHandler";
    case Errc::MissingAdaptation: return "MissingAdaptation";
    case Errc::InvalidMediator: return "InvalidMediator";
    case Errc::UnresolvedGoal: return "UnresolvedGoal";
    case Errc::UnknownService: return "UnknownService";
    case Errc::UnknownGoal: return "UnknownGoal";
    case Errc::NoMatch: return "NoMatch";
    case Errc::PreconditionUnsatisfied: return "PreconditionUnsatisfied";
    case Errc::UnknownAdaptationId: return "UnknownAdaptationId";
    case Errc::UnknownSource: return "UnknownSource";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::ScenarioError: return "ScenarioError";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::BindFailure: return "BindFailure";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message) {}

std::optional<Errc> errc_from_string(std::string_view name) noexcept {
  for (int i = 0; i <= static_cast<int>(Errc::BindFailure); ++i) {
    auto code = static_cast<Errc>(i);
    if (to_string(code) == name) return code;
  }
  return std::nullopt;
}

}  // namespace cas
