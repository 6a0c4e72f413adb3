#pragma once

#include <stdexcept>
#include <string>

namespace resodecay {

// Base of everything this library throws on purpose. The what() string
// carries the offending values; callers that need to branch catch the
// concrete type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments: out-of-domain parameters, malformed windows, bad bin edges.
struct BadParams : Error {
  using Error::Error;
};
struct BadWindow : BadParams {
  using BadParams::BadParams;
};
struct BadEdges : BadParams {
  using BadParams::BadParams;
};
struct BadWeights : BadParams {
  using BadParams::BadParams;
};

// Quadrature failures.
struct NonConvergence : Error {
  using Error::Error;
};
struct NonFiniteIntegrand : Error {
  using Error::Error;
};
struct TailBoundExceeded : Error {
  using Error::Error;
};
struct PoleOnAxis : Error {
  using Error::Error;
};
struct StrategyUnavailable : Error {
  using Error::Error;
};

// Hardy-space and Gamow-vector failures.
struct EvalAtPole : Error {
  using Error::Error;
};
struct WrongClass : Error {
  using Error::Error;
};
struct DecayOrderTooLow : Error {
  using Error::Error;
};
struct NegativeTime : Error {
  using Error::Error;
};
struct NonNegativeTime : Error {
  using Error::Error;
};

// Sampling failures.
struct EnvelopeViolation : Error {
  using Error::Error;
};
struct TooFewEvents : Error {
  using Error::Error;
};

// Fit failures. FitNonConvergence is distinct from the quadrature
// NonConvergence so the CLI can map them to different exit codes.
struct FitNonConvergence : Error {
  using Error::Error;
};
struct DegenerateData : Error {
  using Error::Error;
};
struct BoundaryStuck : FitNonConvergence {
  using FitNonConvergence::FitNonConvergence;
};
struct UnconvergedInput : Error {
  using Error::Error;
};

// Corrupt or unusable files handed to the CLI.
struct InvalidData : Error {
  using Error::Error;
};

}  // namespace resodecay
