#include "blockquant/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "blockquant/error.hpp"

namespace blockquant {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxExpansions = 50;
constexpr double kEndpointTolerance = 1e-6;
constexpr int kConnectivityProbes = 8;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::DomainError, "alpha must lie in (0, 1)");
}

void check_an(double a_n) {
  if (!(a_n > 0.0) || !std::isfinite(a_n)) throw Error(Errc::DomainError, "a_n must be positive");
}

double pseudo_point(std::span<const double> values, double a_n) {
  double sum = 0.0;
  for (double z : values) sum += z;
  return -a_n * sum / static_cast<double>(values.size());
}

}  // namespace

std::string_view method_name(CiMethod method) noexcept {
  switch (method) {
    case CiMethod::Normal: return "normal";
    case CiMethod::EL: return "el";
    case CiMethod::AEL: return "ael";
  }
  return "?";
}

CiMethod parse_method(std::string_view name) {
  if (name == "normal" || name == "norm") return CiMethod::Normal;
  if (name == "el") return CiMethod::EL;
  if (name == "ael") return CiMethod::AEL;
  throw Error(Errc::ConfigError, "unknown method '" + std::string(name) + "'");
}

std::vector<double> ZSample::points() const {
  std::vector<double> out = values;
  if (pseudo) out.push_back(*pseudo);
  return out;
}

ZSample z_sample(const BlockData& data, double p, double y, bool with_pseudo, double a_n) {
  if (!data.is_homogeneous()) throw Error(Errc::HeterogeneousData, "likelihood methods need a common (m, r)");
  if (with_pseudo) check_an(a_n);
  const double a = a_coeff(data.common_m(), data.common_r(), p);
  if (a == 0.0) throw Error(Errc::ZeroACoeff, "a(m, r, p) = 0");
  ZSample out;
  out.values.reserve(data.total_ranks() + 1);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto block = data[i];
    const double shift = (block.threshold() - y) / a;
    for (std::size_t j = 1; j <= block.r(); ++j) {
      const double spacing = static_cast<double>(j) * (block.log_order_stat(j) - block.log_order_stat(j + 1));
      out.values.push_back(spacing - shift);
    }
  }
  if (with_pseudo) out.pseudo = pseudo_point(out.values, a_n);
  return out;
}

std::optional<double> el_lambda(std::span<const double> z) {
  if (z.empty()) return std::nullopt;
  const auto [min_it, max_it] = std::minmax_element(z.begin(), z.end());
  const double zmin = *min_it;
  const double zmax = *max_it;
  if (zmin == 0.0 && zmax == 0.0) return 0.0;
  if (!(zmin < 0.0 && zmax > 0.0)) return std::nullopt;

  // g(lambda) = sum z/(1 + lambda z) is strictly decreasing between the poles.
  double lo = -1.0 / zmax;
  double hi = -1.0 / zmin;
  const double shrink = 1e-12 * (hi - lo);
  lo += shrink;
  hi -= shrink;
  const double scale = 1.0 / std::max(-zmin, zmax);

  double lambda = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    double g = 0.0;
    double dg = 0.0;
    for (double v : z) {
      const double w = v / (1.0 + lambda * v);
      g += w;
      dg -= w * w;
    }
    if (g == 0.0) break;
    if (g > 0.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    double next = lambda - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = next - lambda;
    lambda = next;
    if (std::abs(step) <= 1e-12 * std::max(std::abs(lambda), scale) || hi - lo <= 1e-15 * scale) break;
  }
  return lambda;
}

double el_log_ratio(std::span<const double> z) {
  const auto lambda = el_lambda(z);
  if (!lambda) return kInf;
  double sum = 0.0;
  for (double v : z) sum += std::log1p(*lambda * v);
  return std::max(2.0 * sum, 0.0);
}

double el_statistic(const BlockData& data, double p, double y) {
  return el_log_ratio(z_sample(data, p, y, false).values);
}

double ael_statistic(const BlockData& data, double p, double y, double a_n) {
  const auto z = z_sample(data, p, y, true, a_n);
  if (*z.pseudo == 0.0) return 0.0;
  return el_log_ratio(z.points());
}

double chi2_critical(double alpha) {
  check_alpha(alpha);
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(1.0), alpha));
}

double normal_critical(double alpha) {
  check_alpha(alpha);
  return boost::math::quantile(boost::math::complement(boost::math::normal(0.0, 1.0), alpha / 2.0));
}

ConfidenceInterval normal_ci(const QuantileEstimate& est, double alpha) {
  check_alpha(alpha);
  if (est.a_coeff == 0.0) throw Error(Errc::ZeroACoeff, "a(m, r, p) = 0");
  if (!(est.gamma_hat > 0.0)) throw Error(Errc::DegenerateEstimate, "gamma_hat = 0 gives a zero-width interval");
  const double half = normal_critical(alpha) * est.se_log_xp;
  ConfidenceInterval ci;
  ci.method = CiMethod::Normal;
  ci.level = 1.0 - alpha;
  ci.point = est.log_xp_hat;
  ci.lower = est.log_xp_hat - half;
  ci.upper = est.log_xp_hat + half;
  ci.diagnostics.negative_lower = ci.lower < 0.0;
  return ci;
}

ConfidenceInterval likelihood_ci(const BlockData& data, double p, double alpha, CiMethod method, double a_n) {
  check_alpha(alpha);
  return LogQuantileProfile(data, p).interval(alpha, method, a_n);
}

LogQuantileProfile::LogQuantileProfile(const BlockData& data, double p) {
  if (!data.is_homogeneous()) throw Error(Errc::HeterogeneousData, "likelihood methods need a common (m, r)");
  estimate_ = quantile_hat(data, p);
  if (estimate_.a_coeff == 0.0) throw Error(Errc::ZeroACoeff, "a(m, r, p) = 0");
  if (estimate_.a_coeff > 0.0) {
    throw Error(Errc::NonNegativeACoeff, "a(m, r, p) > 0: p is too large for likelihood intervals");
  }
  blocks_ = data.size();
  spacing_.reserve(data.total_ranks());
  threshold_.reserve(data.total_ranks());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto block = data[i];
    for (std::size_t j = 1; j <= block.r(); ++j) {
      spacing_.push_back(static_cast<double>(j) * (block.log_order_stat(j) - block.log_order_stat(j + 1)));
      threshold_.push_back(block.threshold());
    }
  }
  scratch_.reserve(spacing_.size() + 1);
}

void LogQuantileProfile::fill(double y, bool with_pseudo, double a_n) const {
  const double a = estimate_.a_coeff;
  scratch_.resize(spacing_.size());
  for (std::size_t i = 0; i < spacing_.size(); ++i) scratch_[i] = spacing_[i] - (threshold_[i] - y) / a;
  if (with_pseudo) scratch_.push_back(pseudo_point(scratch_, a_n));
}

double LogQuantileProfile::statistic(double y, CiMethod method, double a_n) const {
  switch (method) {
    case CiMethod::EL:
      fill(y, false, a_n);
      return el_log_ratio(scratch_);
    case CiMethod::AEL:
      check_an(a_n);
      fill(y, true, a_n);
      if (scratch_.back() == 0.0) return 0.0;
      return el_log_ratio(scratch_);
    case CiMethod::Normal:
      break;
  }
  throw Error(Errc::DomainError, "statistic() is defined for EL and AEL only");
}

ConfidenceInterval LogQuantileProfile::interval(double alpha, CiMethod method, double a_n) const {
  check_alpha(alpha);
  if (method == CiMethod::Normal) return normal_ci(estimate_, alpha);
  if (method == CiMethod::AEL) check_an(a_n);
  if (!(estimate_.gamma_hat > 0.0)) throw Error(Errc::DegenerateEstimate, "gamma_hat = 0");

  const double critical = chi2_critical(alpha);
  const double point = estimate_.log_xp_hat;
  const double step = normal_critical(alpha) * estimate_.se_log_xp;

  ConfidenceInterval ci;
  ci.method = method;
  ci.level = 1.0 - alpha;
  ci.point = point;
  if (method == CiMethod::AEL) {
    ci.diagnostics.correction_factor_large = a_n > std::pow(static_cast<double>(blocks_), 2.0 / 3.0);
  }

  auto endpoint = [&](double direction) {
    double inner = point;
    double outer = point;
    double outer_value = 0.0;
    bool crossed = false;
    for (int j = 0; j < kMaxExpansions; ++j) {
      outer = point + direction * step * std::ldexp(1.0, j);
      outer_value = statistic(outer, method, a_n);
      if (!(outer_value < critical)) {
        crossed = true;
        break;
      }
      inner = outer;
    }
    if (!crossed) {
      ci.diagnostics.bracket_failure = true;
      return outer;
    }
    if (std::isinf(outer_value)) ci.diagnostics.hull_failure_at_endpoints = true;
    const double bracket_edge = outer;
    while (std::abs(outer - inner) > kEndpointTolerance) {
      const double mid = 0.5 * (inner + outer);
      if (statistic(mid, method, a_n) < critical) {
        inner = mid;
      } else {
        outer = mid;
      }
    }
    const double bound = 0.5 * (inner + outer);
    for (int i = 1; i <= kConnectivityProbes; ++i) {
      const double probe = outer + (bracket_edge - outer) * i / (kConnectivityProbes + 1.0);
      if (statistic(probe, method, a_n) < critical) {
        ci.diagnostics.bracket_expanded = true;
        break;
      }
    }
    return bound;
  };

  ci.lower = endpoint(-1.0);
  ci.upper = endpoint(+1.0);
  ci.diagnostics.negative_lower = ci.lower < 0.0;
  return ci;
}

}  // namespace blockquant
