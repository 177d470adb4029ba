#include "blockquant/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "blockquant/block_data.hpp"
#include "blockquant/error.hpp"

namespace blockquant {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double parse_positive(std::string_view text, std::string_view spec) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !(value > 0.0) || !std::isfinite(value)) {
    throw Error(Errc::UnknownModel, "bad parameter '" + std::string(text) + "' in '" + std::string(spec) + "'");
  }
  return value;
}

// log(e^x - 1) without overflow for large x.
double log_expm1(double x) {
  if (x > 30.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

}  // namespace

HeavyTailModel HeavyTailModel::frechet(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw Error(Errc::DomainError, "Frechet shape must be positive");
  return HeavyTailModel(Frechet{a}, 1.0 / a, -1.0);
}

HeavyTailModel HeavyTailModel::burr(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(Errc::DomainError, "Burr parameters must be positive");
  }
  return HeavyTailModel(Burr{a, b}, 1.0 / (a * b), -1.0 / b);
}

HeavyTailModel HeavyTailModel::parse(std::string_view spec) {
  std::string text;
  for (char ch : spec) {
    if (ch != ' ' && ch != '\t') text.push_back(ch);
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(Errc::UnknownModel, "expected 'family:params', got '" + text + "'");
  std::string family = text.substr(0, colon);
  std::transform(family.begin(), family.end(), family.begin(), [](unsigned char c) { return std::tolower(c); });

  std::map<std::string, double> params;
  std::string_view rest = std::string_view(text).substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw Error(Errc::UnknownModel, "expected key=value in '" + text + "'");
    const std::string key(item.substr(0, eq));
    if (!params.emplace(key, parse_positive(item.substr(eq + 1), spec)).second) {
      throw Error(Errc::UnknownModel, "duplicate parameter '" + key + "'");
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }

  auto take = [&](const char* key) {
    auto it = params.find(key);
    if (it == params.end()) throw Error(Errc::UnknownModel, std::string("missing parameter '") + key + "'");
    const double v = it->second;
    params.erase(it);
    return v;
  };
  HeavyTailModel model = [&] {
    if (family == "frechet") return frechet(take("a"));
    if (family == "burr") {
      const double a = take("a");
      return burr(a, take("b"));
    }
    throw Error(Errc::UnknownModel, "unknown family '" + family + "'");
  }();
  if (!params.empty()) throw Error(Errc::UnknownModel, "unexpected parameter '" + params.begin()->first + "'");
  return model;
}

std::string HeavyTailModel::spec() const {
  return std::visit(overloaded{
                        [](const Frechet& f) { return "frechet:a=" + format_double(f.a); },
                        [](const Burr& b) { return "burr:a=" + format_double(b.a) + ",b=" + format_double(b.b); },
                    },
                    family_);
}

std::string HeavyTailModel::display_name() const {
  return std::visit(overloaded{
                        [](const Frechet& f) { return "Frechet(" + format_double(f.a) + ")"; },
                        [](const Burr& b) { return "Burr(" + format_double(b.a) + "," + format_double(b.b) + ")"; },
                    },
                    family_);
}

double HeavyTailModel::log_u_of_log(double s) const {
  return std::visit(overloaded{
                        // U(t) = (-log(1 - 1/t))^{-1/a}
                        [s](const Frechet& f) { return -std::log(-std::log1p(-std::exp(-s))) / f.a; },
                        // U(t) = (t^{1/b} - 1)^{1/a}
                        [s](const Burr& b) { return log_expm1(s / b.b) / b.a; },
                    },
                    family_);
}

double HeavyTailModel::survival(double x) const {
  return std::visit(overloaded{
                        [x](const Frechet& f) { return -std::expm1(-std::pow(x, -f.a)); },
                        [x](const Burr& b) { return std::pow(1.0 + std::pow(x, b.a), -b.b); },
                    },
                    family_);
}

double quantile_u(const HeavyTailModel& model, double t) {
  if (!(t > 1.0)) throw Error(Errc::DomainError, "U(t) requires t > 1");
  return std::exp(model.log_u_of_log(std::log(t)));
}

double true_log_quantile(const HeavyTailModel& model, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::DomainError, "p must lie in (0, 1)");
  return model.log_u_of_log(-std::log(p));
}

double second_order_a(const HeavyTailModel& model, double t) {
  if (!(t > 1.0)) throw Error(Errc::DomainError, "A(t) requires t > 1");
  const double gamma = model.gamma();
  return std::visit(overloaded{
                        [&](const Frechet&) { return gamma / (2.0 * t); },
                        [&](const Burr& b) { return gamma * std::pow(t, -1.0 / b.b); },
                    },
                    model.family());
}

namespace {

void check_shape(std::size_t m, std::size_t r) {
  if (r < 1 || r >= m) throw Error(Errc::DomainError, "sampler requires 1 <= r < m");
}

// Fills e[0..r] with E_{m,1} >= ... >= E_{m,r+1}.
void draw_exponential_tops(std::size_t m, std::size_t r, RandomStream& rng, SamplerKind kind, double* e) {
  std::exponential_distribution<double> unit_exp(1.0);
  double threshold = 0.0;
  if (kind == SamplerKind::Beta) {
    // exp(-E_{m,r+1}) ~ Beta(r+1, m-r) = G1 / (G1 + G2).
    std::gamma_distribution<double> g1(static_cast<double>(r + 1), 1.0);
    std::gamma_distribution<double> g2(static_cast<double>(m - r), 1.0);
    const double a = g1(rng);
    const double b = g2(rng);
    threshold = std::log1p(b / a);
  } else {
    for (std::size_t j = m; j > r; --j) threshold += unit_exp(rng) / static_cast<double>(j);
  }
  e[r] = threshold;
  for (std::size_t j = r; j >= 1; --j) e[j - 1] = e[j] + unit_exp(rng) / static_cast<double>(j);
}

}  // namespace

void append_top_block_logs(const HeavyTailModel& model, std::size_t m, std::size_t r, RandomStream& rng,
                           std::vector<double>& out, SamplerKind kind) {
  check_shape(m, r);
  const std::size_t base = out.size();
  out.resize(base + r + 1);
  double* e = out.data() + base;
  draw_exponential_tops(m, r, rng, kind, e);
  for (std::size_t j = 0; j <= r; ++j) e[j] = std::max(model.log_u_of_log(e[j]), 0.0);
}

TopOrderSample sample_top_block(const HeavyTailModel& model, std::size_t m, std::size_t r, RandomStream& rng,
                                SamplerKind kind) {
  check_shape(m, r);
  TopOrderSample out;
  out.e_values.resize(r + 1);
  draw_exponential_tops(m, r, rng, kind, out.e_values.data());
  out.log_values.reserve(r + 1);
  for (double e : out.e_values) out.log_values.push_back(std::max(model.log_u_of_log(e), 0.0));
  return out;
}

TopOrderSample sample_top_block_naive(const HeavyTailModel& model, std::size_t m, std::size_t r,
                                      RandomStream& rng) {
  check_shape(m, r);
  if (m > 100000) throw Error(Errc::DomainError, "naive sampler limited to m <= 100000");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  // Inversion X = F^-(V) = U(1 / (1 - V)); E = -log(1 - V) orders identically.
  std::vector<double> e(m);
  for (auto& v : e) v = -std::log1p(-uniform(rng));
  std::partial_sort(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(r + 1), e.end(), std::greater<>());
  TopOrderSample out;
  out.e_values.assign(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(r + 1));
  for (double s : out.e_values) out.log_values.push_back(std::max(model.log_u_of_log(s), 0.0));
  return out;
}

}  // namespace blockquant
