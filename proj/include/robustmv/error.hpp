#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robustmv {

enum class ErrorCode {
  // model validation
  NotPositiveDefinite,
  AsymmetricCovariance,
  NonPositiveGamma,
  DimensionMismatch,
  DegenerateDimension,
  RhoOutOfRange,
  InvalidSpec,
  // domain of the tilted measure / solvers
  ThetaOutOfDomain,
  ThetaZero,
  DomainViolation,
  NoBracket,
  ToleranceNotReached,
  NegativeDiscriminant,
  EtaUnreachable,
  PerturbedModelInvalid,
  InvalidArgument,
  // oracle
  MaxIterations,
  DegenerateWeights,
  // cli plumbing
  Config,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::AsymmetricCovariance: return "AsymmetricCovariance";
    case ErrorCode::NonPositiveGamma: return "NonPositiveGamma";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateDimension: return "DegenerateDimension";
    case ErrorCode::RhoOutOfRange: return "RhoOutOfRange";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ThetaOutOfDomain: return "ThetaOutOfDomain";
    case ErrorCode::ThetaZero: return "ThetaZero";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorCode::NegativeDiscriminant: return "NegativeDiscriminant";
    case ErrorCode::EtaUnreachable: return "EtaUnreachable";
    case ErrorCode::PerturbedModelInvalid: return "PerturbedModelInvalid";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// True for errors raised while validating a model or its inputs, as opposed
/// to errors raised by solving on a valid model.
constexpr bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::AsymmetricCovariance:
    case ErrorCode::NonPositiveGamma:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DegenerateDimension:
    case ErrorCode::RhoOutOfRange:
    case ErrorCode::InvalidSpec:
    case ErrorCode::Config:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace robustmv
