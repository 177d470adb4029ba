#pragma once

#include <cstddef>

#include "blockquant/block_data.hpp"

namespace blockquant {

struct QuantileEstimate {
  double gamma_hat = 0.0;
  double log_xp_hat = 0.0;
  /// a(m, r, p) for homogeneous data, the rank-weighted a_n(p) otherwise.
  double a_coeff = 0.0;
  std::size_t total_ranks = 0;
  /// |a_coeff| * gamma_hat / sqrt(total_ranks).
  double se_log_xp = 0.0;
  bool heterogeneous = false;
  /// a_coeff >= 0: p is not in the tail relative to the block sizes.
  bool non_negative_a = false;
};

/// sum_{j=r+1}^{m} 1/j, accumulated from the smallest term up. Requires 1 <= r < m.
double harmonic_tail(std::size_t m, std::size_t r);

/// a(m, r, p) = harmonic_tail(m, r) + log p.
double a_coeff(std::size_t m, std::size_t r, double p);

/// Rank-weighted centering a_n(p) = sum r_i a(m_i, r_i, p) / sum r_i.
double a_coeff_weighted(const BlockData& data, double p);

/// Mean log-excess over the (r+1)-th order statistic. Homogeneous data only
/// (throws HeterogeneousData).
double gamma_hat(const BlockData& data);

/// Rank-weighted mean log-excess; any block data.
double gamma_hat_star(const BlockData& data);

/// log x_p estimate for homogeneous data: mean log X_{m,r+1} - a(m,r,p) gamma_hat.
QuantileEstimate quantile_hat(const BlockData& data, double p);

/// Rank-weighted analogue for heterogeneous blocks; identical to
/// quantile_hat() on homogeneous data.
QuantileEstimate quantile_hat_star(const BlockData& data, double p);

/// Asymptotic bias constant b_r of the tail-index estimator, r >= 1, rho < 0.
double bias_constant_br(std::size_t r, double rho);

}  // namespace blockquant
