#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Heavy-tailed parametric models and top-of-block samplers.
//
// Both families admit a two-term tail expansion
//     1 - F(x) = c x^{-1/gamma} + d x^{-beta} + o(x^{-beta}),
// which yields the second-order function
//     A(t) = -gamma (beta*gamma - 1) d c^{-beta*gamma} t^{1 - beta*gamma},
//     rho  = 1 - beta*gamma.
//
//   Frechet(a):  1 - F(x) = 1 - exp(-x^{-a}) = x^{-a} - x^{-2a}/2 + ...
//                c = 1, d = -1/2, beta = 2a, gamma = 1/a
//                => rho = -1,    A(t) = gamma / (2t)
//   Burr(a, b):  1 - F(x) = (1 + x^a)^{-b} = x^{-ab} - b x^{-a(b+1)} + ...
//                c = 1, d = -b, beta = a(b+1), gamma = 1/(ab)
//                => rho = -1/b,  A(t) = gamma t^{-1/b}
//
// Both expressions agree with a direct expansion of U(tx)/U(t) - x^gamma.

namespace blockquant {

/// Per-replicate random stream.
using RandomStream = std::mt19937_64;

struct Frechet {
  double a = 1.0;
};

struct Burr {
  double a = 1.0;
  double b = 1.0;
};

class HeavyTailModel {
 public:
  static HeavyTailModel frechet(double a);
  static HeavyTailModel burr(double a, double b);
  /// Parses `frechet:a=1` or `burr:a=0.5,b=1`. Throws Error(UnknownModel).
  static HeavyTailModel parse(std::string_view spec);

  const std::variant<Frechet, Burr>& family() const noexcept { return family_; }
  double gamma() const noexcept { return gamma_; }
  double rho() const noexcept { return rho_; }
  /// Canonical specification string, round-trips through parse().
  std::string spec() const;
  /// Display name, e.g. "Frechet(1)" or "Burr(0.5,1)".
  std::string display_name() const;

  /// log U(e^s) for s > 0, i.e. the log-quantile at upper tail probability
  /// e^{-s}. Not clamped.
  double log_u_of_log(double s) const;
  /// 1 - F(x) for x > 0.
  double survival(double x) const;

  friend bool operator==(const HeavyTailModel& a, const HeavyTailModel& b) { return a.spec() == b.spec(); }

 private:
  HeavyTailModel(std::variant<Frechet, Burr> family, double gamma, double rho)
      : family_(family), gamma_(gamma), rho_(rho) {}

  std::variant<Frechet, Burr> family_;
  double gamma_;
  double rho_;
};

/// Exponential order statistics E_{m,1} >= ... >= E_{m,r+1} of one block and
/// the matching log-observations max(log U(e^E), 0).
struct TopOrderSample {
  std::vector<double> e_values;
  std::vector<double> log_values;
};

enum class SamplerKind {
  /// E_{m,r+1} = -log B, B ~ Beta(r+1, m-r). O(r) per block.
  Beta,
  /// E_{m,r+1} = sum_{j=r+1}^m I_j / j. O(m) per block.
  HarmonicSum,
};

/// U(t) = F^-(1 - 1/t), t > 1.
double quantile_u(const HeavyTailModel& model, double t);

/// log x_p = log U(1/p), 0 < p < 1.
double true_log_quantile(const HeavyTailModel& model, double p);

/// Second-order function A(t) for t > 1 (see the table at the top of this file).
double second_order_a(const HeavyTailModel& model, double t);

/// Top r+1 order statistics of m iid draws, generated from r+1 exponential
/// spacings instead of m variates. Requires 1 <= r < m.
TopOrderSample sample_top_block(const HeavyTailModel& model, std::size_t m, std::size_t r, RandomStream& rng,
                                SamplerKind kind = SamplerKind::Beta);

/// Appends the r+1 clamped log-observations of one block to `out`; the
/// allocation-free core of sample_top_block.
void append_top_block_logs(const HeavyTailModel& model, std::size_t m, std::size_t r, RandomStream& rng,
                           std::vector<double>& out, SamplerKind kind = SamplerKind::Beta);

/// Brute-force reference: draws all m variates by inversion, sorts, keeps the
/// top r+1. Requires 1 <= r < m <= 100000.
TopOrderSample sample_top_block_naive(const HeavyTailModel& model, std::size_t m, std::size_t r,
                                      RandomStream& rng);

}  // namespace blockquant
