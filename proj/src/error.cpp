#include "blockquant/error.hpp"

namespace blockquant {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::TooFewBlocks: return "TooFewBlocks";
    case Errc::TooFewRanks: return "TooFewRanks";
    case Errc::RanksExceedBlockSize: return "RanksExceedBlockSize";
    case Errc::NonMonotoneBlock: return "NonMonotoneBlock";
    case Errc::NegativeLogValue: return "NegativeLogValue";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::ParseError: return "ParseError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::UnknownModel: return "UnknownModel";
    case Errc::UnknownV: return "UnknownV";
    case Errc::DomainError: return "DomainError";
    case Errc::HeterogeneousData: return "HeterogeneousData";
    case Errc::ZeroACoeff: return "ZeroACoeff";
    case Errc::NonNegativeACoeff: return "NonNegativeACoeff";
    case Errc::DegenerateEstimate: return "DegenerateEstimate";
  }
  return "Unknown";
}

bool is_input_error(Errc code) noexcept {
  switch (code) {
    case Errc::DomainError:
    case Errc::HeterogeneousData:
    case Errc::ZeroACoeff:
    case Errc::NonNegativeACoeff:
    case Errc::DegenerateEstimate:
      return false;
    default:
      return true;
  }
}

}  // namespace blockquant
