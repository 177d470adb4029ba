#include "blockquant/estimators.hpp"

#include <cmath>

#include "blockquant/error.hpp"

namespace blockquant {
namespace {

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::DomainError, "p must lie in (0, 1)");
}

void require_homogeneous(const BlockData& data) {
  if (!data.is_homogeneous()) {
    throw Error(Errc::HeterogeneousData, "blocks differ in (m, r); use the rank-weighted estimators");
  }
}

// sum_i sum_{j<=r_i} (log X_{m_i,j} - log X_{m_i,r_i+1})
double log_excess_sum(const BlockData& data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto block = data[i];
    const double threshold = block.threshold();
    for (std::size_t j = 1; j <= block.r(); ++j) total += block.log_order_stat(j) - threshold;
  }
  return total;
}

QuantileEstimate finish(double gamma, double log_xp, double a, std::size_t total_ranks, bool heterogeneous) {
  QuantileEstimate est;
  est.gamma_hat = gamma;
  est.log_xp_hat = log_xp;
  est.a_coeff = a;
  est.total_ranks = total_ranks;
  est.se_log_xp = std::abs(a) * gamma / std::sqrt(static_cast<double>(total_ranks));
  est.heterogeneous = heterogeneous;
  est.non_negative_a = a >= 0.0;
  return est;
}

}  // namespace

double harmonic_tail(std::size_t m, std::size_t r) {
  if (r < 1 || r >= m) throw Error(Errc::DomainError, "harmonic_tail requires 1 <= r < m");
  double sum = 0.0;
  for (std::size_t j = m; j > r; --j) sum += 1.0 / static_cast<double>(j);
  return sum;
}

double a_coeff(std::size_t m, std::size_t r, double p) {
  check_p(p);
  return harmonic_tail(m, r) + std::log(p);
}

double a_coeff_weighted(const BlockData& data, double p) {
  check_p(p);
  double weighted = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto block = data[i];
    weighted += static_cast<double>(block.r()) * a_coeff(block.m(), block.r(), p);
  }
  return weighted / static_cast<double>(data.total_ranks());
}

double gamma_hat(const BlockData& data) {
  require_homogeneous(data);
  return log_excess_sum(data) / static_cast<double>(data.total_ranks());
}

double gamma_hat_star(const BlockData& data) {
  return log_excess_sum(data) / static_cast<double>(data.total_ranks());
}

QuantileEstimate quantile_hat(const BlockData& data, double p) {
  require_homogeneous(data);
  check_p(p);
  const double gamma = gamma_hat(data);
  double threshold_sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) threshold_sum += data[i].threshold();
  const double a = a_coeff(data.common_m(), data.common_r(), p);
  const double log_xp = threshold_sum / static_cast<double>(data.size()) - a * gamma;
  return finish(gamma, log_xp, a, data.total_ranks(), false);
}

QuantileEstimate quantile_hat_star(const BlockData& data, double p) {
  // Constant rank weights cancel, leaving the unweighted estimator.
  if (data.is_homogeneous()) return quantile_hat(data, p);
  check_p(p);
  const double gamma = gamma_hat_star(data);
  double weighted_threshold = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    weighted_threshold += static_cast<double>(data[i].r()) * data[i].threshold();
  }
  const double total = static_cast<double>(data.total_ranks());
  const double a = a_coeff_weighted(data, p);
  return finish(gamma, weighted_threshold / total - a * gamma, a, data.total_ranks(), true);
}

double bias_constant_br(std::size_t r, double rho) {
  if (r < 1) throw Error(Errc::DomainError, "b_r requires r >= 1");
  if (!(rho < 0.0)) throw Error(Errc::DomainError, "b_r requires rho < 0");
  // All Gamma arguments are positive, so every term is positive and the
  // ratios can be formed in log space.
  double sum = 0.0;
  for (std::size_t j = 1; j <= r; ++j) {
    const double jd = static_cast<double>(j);
    sum += std::exp(std::lgamma(jd - rho) - std::lgamma(jd));
  }
  const double rd = static_cast<double>(r);
  const double last = std::exp(std::lgamma(rd + 1.0 - rho) - std::lgamma(rd));
  return (sum - last) / (rd * rho);
}

}  // namespace blockquant
