#include "icm/error.hpp"

namespace icm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MismatchedEndpoint: return "MismatchedEndpoint";
    case ErrorKind::NonMonotoneTimes: return "NonMonotoneTimes";
    case ErrorKind::NegativeTime: return "NegativeTime";
    case ErrorKind::EmptyRiskSet: return "EmptyRiskSet";
    case ErrorKind::OutOfSupport: return "OutOfSupport";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::NotAbsoluteCase: return "NotAbsoluteCase";
    case ErrorKind::ZeroSurvival: return "ZeroSurvival";
    case ErrorKind::NoCaseMass: return "NoCaseMass";
    case ErrorKind::NoControlMass: return "NoControlMass";
    case ErrorKind::NoAbsoluteCases: return "NoAbsoluteCases";
    case ErrorKind::NoAbsoluteControls: return "NoAbsoluteControls";
    case ErrorKind::AllContributionsDegenerate: return "AllContributionsDegenerate";
    case ErrorKind::RootNotBracketed: return "RootNotBracketed";
    case ErrorKind::MissingTruth: return "MissingTruth";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace icm
