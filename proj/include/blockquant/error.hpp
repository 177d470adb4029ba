#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blockquant {

enum class Errc {
  // Input / validation failures.
  TooFewBlocks,
  TooFewRanks,
  RanksExceedBlockSize,
  NonMonotoneBlock,
  NegativeLogValue,
  NonFiniteValue,
  InsufficientData,
  ParseError,
  ConfigError,
  UnknownModel,
  UnknownV,
  // Domain failures.
  DomainError,
  HeterogeneousData,
  ZeroACoeff,
  NonNegativeACoeff,
  DegenerateEstimate,
};

std::string_view errc_name(Errc code) noexcept;

/// True for errors caused by malformed or inconsistent input (CLI exit code 2);
/// false for mathematical domain failures (exit code 3).
bool is_input_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace blockquant
