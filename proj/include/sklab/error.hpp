#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sklab {

enum class ErrorKind {
    NonConvergence,
    AmbiguousMatching,
    OddTotalParity,
    DegenerateCover,
    PathThroughBranchPoint,
    StepLimitExceeded,
    FitUnstable,
    ClusterCrowded,
    NoRoute,
    PlanInconsistent,
    StepTooLarge,
    ToleranceNotMet,
    PoleOnPath,
    IllConditioned,
    ModelSingular,
    InsufficientRows,
    ConfigError,
};

std::string_view to_string(ErrorKind kind);

// All recoverable numeric and input failures surface as this type; `kind`
// lets drivers decide whether to refine a step, skip a row, or abort.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::AmbiguousMatching: return "AmbiguousMatching";
    case ErrorKind::OddTotalParity: return "OddTotalParity";
    case ErrorKind::DegenerateCover: return "DegenerateCover";
    case ErrorKind::PathThroughBranchPoint: return "PathThroughBranchPoint";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::FitUnstable: return "FitUnstable";
    case ErrorKind::ClusterCrowded: return "ClusterCrowded";
    case ErrorKind::NoRoute: return "NoRoute";
    case ErrorKind::PlanInconsistent: return "PlanInconsistent";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::PoleOnPath: return "PoleOnPath";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::ModelSingular: return "ModelSingular";
    case ErrorKind::InsufficientRows: return "InsufficientRows";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

} // namespace sklab
