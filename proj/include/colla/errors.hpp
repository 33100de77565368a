#pragma once

#include <stdexcept>
#include <string>

namespace colla {

// Error taxonomy. Categories map onto the CLI exit codes (2 = config,
// 3 = data, 4 = numerical).
enum class Err {
  // configuration
  ConfigError,
  BadSpec,
  UnpairedConfigs,
  // data
  NonFiniteInput,
  DimensionMismatch,
  DisconnectedGraph,
  MalformedEdge,
  TooFewAgents,
  EmptyInput,
  DegenerateLabels,
  MissingPair,
  TooFewInstances,
  ParseError,
  InconsistentWidth,
  UnknownLabel,
  // numerical
  SolveFailure,
  NoConvergence,
  CholeskyFailure,
};

const char* err_name(Err e) noexcept;

// Exit code for the category this error belongs to.
int err_exit_code(Err e) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what),
        code_(code),
        message_(what) {}

  Err code() const noexcept { return code_; }
  int exit_code() const noexcept { return err_exit_code(code_); }
  // message without the error-name prefix
  const std::string& message() const noexcept { return message_; }

 private:
  Err code_;
  std::string message_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, Err code, const std::string& what) {
  if (!ok) fail(code, what);
}

inline const char* err_name(Err e) noexcept {
  switch (e) {
    case Err::ConfigError: return "ConfigError";
    case Err::BadSpec: return "BadSpec";
    case Err::UnpairedConfigs: return "UnpairedConfigs";
    case Err::NonFiniteInput: return "NonFiniteInput";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::DisconnectedGraph: return "DisconnectedGraph";
    case Err::MalformedEdge: return "MalformedEdge";
    case Err::TooFewAgents: return "TooFewAgents";
    case Err::EmptyInput: return "EmptyInput";
    case Err::DegenerateLabels: return "DegenerateLabels";
    case Err::MissingPair: return "MissingPair";
    case Err::TooFewInstances: return "TooFewInstances";
    case Err::ParseError: return "ParseError";
    case Err::InconsistentWidth: return "InconsistentWidth";
    case Err::UnknownLabel: return "UnknownLabel";
    case Err::SolveFailure: return "SolveFailure";
    case Err::NoConvergence: return "NoConvergence";
    case Err::CholeskyFailure: return "CholeskyFailure";
  }
  return "Error";
}

inline int err_exit_code(Err e) noexcept {
  switch (e) {
    case Err::ConfigError:
    case Err::BadSpec:
    case Err::UnpairedConfigs:
      return 2;
    case Err::SolveFailure:
    case Err::NoConvergence:
    case Err::CholeskyFailure:
      return 4;
    default:
      return 3;
  }
}

}  // namespace colla
