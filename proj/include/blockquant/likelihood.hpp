#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "blockquant/block_data.hpp"
#include "blockquant/estimators.hpp"

namespace blockquant {

/// Default weight of the adjusted-likelihood pseudo point (optimal for
/// exponential data).
inline constexpr double kDefaultAn = 19.0 / 12.0;

enum class CiMethod { Normal, EL, AEL };

std::string_view method_name(CiMethod method) noexcept;  // "normal", "el", "ael"
CiMethod parse_method(std::string_view name);            // throws ConfigError

struct CiDiagnostics {
  /// An endpoint bracket ended at a y where zero left the convex hull (EL).
  bool hull_failure_at_endpoints = false;
  /// The statistic dips back below the critical value beyond a reported
  /// endpoint, i.e. the sub-level set is not connected within the bracket.
  bool bracket_expanded = false;
  /// No crossing within the expansion budget; the bound is the last bracket edge.
  bool bracket_failure = false;
  /// Lower endpoint below zero (log x_p >= 0 when X >= 1).
  bool negative_lower = false;
  /// a_n exceeds k^{2/3}.
  bool correction_factor_large = false;
};

struct ConfidenceInterval {
  CiMethod method = CiMethod::Normal;
  double level = 0.95;
  double lower = 0.0;
  double upper = 0.0;
  double point = 0.0;
  CiDiagnostics diagnostics;

  double length() const noexcept { return upper - lower; }
  bool contains(double y) const noexcept { return lower <= y && y <= upper; }
};

/// Estimating-equation values z_j^{(i)}(y), block-major, and the optional
/// adjusted-likelihood pseudo point.
struct ZSample {
  std::vector<double> values;
  std::optional<double> pseudo;

  /// values followed by pseudo (when present).
  std::vector<double> points() const;
};

/// z_j^{(i)}(y) = j (log X_{m,j} - log X_{m,j+1}) - (log X_{m,r+1} - y) / a(m,r,p);
/// with_pseudo appends z(y) = -a_n/(k r) * sum z. Homogeneous data only.
/// Throws ZeroACoeff, HeterogeneousData, DomainError.
ZSample z_sample(const BlockData& data, double p, double y, bool with_pseudo, double a_n = kDefaultAn);

/// Lagrange multiplier solving sum z/(1 + lambda z) = 0 on
/// (-1/max z, -1/min z). Returns nullopt when zero is not strictly inside
/// the convex hull of z (the caller's statistic is then +infinity).
std::optional<double> el_lambda(std::span<const double> z);

/// -2 log empirical likelihood ratio for mean zero: 2 sum log(1 + lambda z),
/// +infinity on hull failure.
double el_log_ratio(std::span<const double> z);

double el_statistic(const BlockData& data, double p, double y);
double ael_statistic(const BlockData& data, double p, double y, double a_n = kDefaultAn);

/// Upper-alpha quantile of chi-square(1).
double chi2_critical(double alpha);
/// Upper-alpha/2 quantile of the standard normal.
double normal_critical(double alpha);

/// point +/- z_{alpha/2} * se_log_xp. Throws DomainError, ZeroACoeff,
/// DegenerateEstimate (gamma_hat == 0).
ConfidenceInterval normal_ci(const QuantileEstimate& est, double alpha);

/// Connected component of {y : statistic(y) < c(alpha)} around log x_p-hat.
ConfidenceInterval likelihood_ci(const BlockData& data, double p, double alpha, CiMethod method,
                                 double a_n = kDefaultAn);

/// Precomputed per-dataset state for repeated statistic evaluations in y.
/// Holds scratch storage: one instance must not be used from two threads at
/// once.
class LogQuantileProfile {
 public:
  /// Homogeneous data with a(m,r,p) < 0 (throws HeterogeneousData,
  /// ZeroACoeff or NonNegativeACoeff otherwise).
  LogQuantileProfile(const BlockData& data, double p);

  const QuantileEstimate& estimate() const noexcept { return estimate_; }
  std::size_t blocks() const noexcept { return blocks_; }

  /// EL or AEL statistic at y (CiMethod::Normal is rejected).
  double statistic(double y, CiMethod method, double a_n = kDefaultAn) const;

  ConfidenceInterval interval(double alpha, CiMethod method, double a_n = kDefaultAn) const;

 private:
  void fill(double y, bool with_pseudo, double a_n) const;

  QuantileEstimate estimate_;
  std::size_t blocks_ = 0;
  std::vector<double> spacing_;    // j (log X_j - log X_{j+1}) per point
  std::vector<double> threshold_;  // log X_{r+1} of the point's block
  mutable std::vector<double> scratch_;
};

}  // namespace blockquant
