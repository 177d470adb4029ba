#include <doctest.h>

#include <cmath>
#include <vector>

#include "blockquant/distributions.hpp"
#include "blockquant/error.hpp"
#include "blockquant/likelihood.hpp"

using namespace blockquant;

namespace {

BlockData worked_example() {
  return BlockData::validate(std::vector<Block>{{3, {2.0, 1.0}}, {3, {3.0, 2.5}}});
}

const double kWorkedP = std::exp(-5.0 / 6.0 - 2.0);  // a(3, 1, p) = -2

// a(2, 1, e^{-1/2}) == 0 exactly.
BlockData zero_a_example() {
  return BlockData::validate(std::vector<Block>{{2, {2.0, 1.0}}, {2, {3.0, 2.5}}});
}
const double kZeroAP = std::exp(-0.5);

BlockData simulated(const HeavyTailModel& model, std::size_t k, std::size_t m, std::size_t r, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> values;
  for (std::size_t i = 0; i < k; ++i) append_top_block_logs(model, m, r, rng, values);
  return BlockData::homogeneous(m, r, std::move(values));
}

}  // namespace

TEST_CASE("critical values") {
  CHECK(chi2_critical(0.05) == doctest::Approx(3.841459).epsilon(1e-7));
  CHECK(normal_critical(0.05) == doctest::Approx(1.959964).epsilon(1e-7));
  CHECK_THROWS_AS(chi2_critical(0.0), Error);
  CHECK_THROWS_AS(normal_critical(1.0), Error);
}

TEST_CASE("method names") {
  CHECK(parse_method("ael") == CiMethod::AEL);
  CHECK(parse_method("el") == CiMethod::EL);
  CHECK(parse_method("normal") == CiMethod::Normal);
  CHECK(method_name(CiMethod::AEL) == "ael");
  CHECK_THROWS_AS(parse_method("bootstrap"), Error);
}

TEST_CASE("z sample hand example") {
  const auto z = z_sample(worked_example(), kWorkedP, 3.25, false);
  REQUIRE(z.values.size() == 2);
  CHECK(z.values[0] == doctest::Approx(-0.125).epsilon(1e-13));
  CHECK(z.values[1] == doctest::Approx(0.125).epsilon(1e-13));
  CHECK_FALSE(z.pseudo.has_value());
}

TEST_CASE("pseudo point") {
  const double y = 4.0;
  const auto plain = z_sample(worked_example(), kWorkedP, y, false);
  const auto adjusted = z_sample(worked_example(), kWorkedP, y, true, 19.0 / 12.0);
  const double s = plain.values[0] + plain.values[1];
  REQUIRE(adjusted.pseudo.has_value());
  CHECK(*adjusted.pseudo == doctest::Approx(-(19.0 / 12.0) * s / 2.0));
  CHECK(adjusted.points().size() == 3);
}

TEST_CASE("z sample mean vanishes at the point estimate") {
  const auto data = simulated(HeavyTailModel::burr(0.5, 1.0), 30, 40, 2, 17);
  const double p = 1e-4;
  const auto est = quantile_hat(data, p);
  const auto z = z_sample(data, p, est.log_xp_hat, true);
  double sum = 0.0;
  for (double v : z.values) sum += v;
  CHECK(std::abs(sum) < 1e-12 * z.values.size());
  CHECK(std::abs(*z.pseudo) < 1e-12);
}

TEST_CASE("z sample is affine and monotone in y") {
  const auto data = simulated(HeavyTailModel::frechet(1.0), 10, 50, 1, 3);
  const double p = 1e-3;
  const double a = a_coeff(50, 1, p);
  const auto z0 = z_sample(data, p, 1.0, false);
  const auto z1 = z_sample(data, p, 2.0, false);
  for (std::size_t i = 0; i < z0.values.size(); ++i) {
    CHECK(z1.values[i] - z0.values[i] == doctest::Approx(1.0 / a));
  }
}

TEST_CASE("z sample preconditions") {
  const auto mixed = BlockData::validate(std::vector<Block>{{100, {2.0, 1.0}}, {200, {3.0, 2.0, 1.0}}});
  CHECK_THROWS_AS(z_sample(mixed, 1e-3, 1.0, false), Error);
  CHECK_THROWS_AS(z_sample(zero_a_example(), kZeroAP, 1.0, false), Error);
}

TEST_CASE("lambda closed forms") {
  const std::vector<double> sym{-1.0, 1.0};
  CHECK(*el_lambda(sym) == doctest::Approx(0.0));
  const std::vector<double> two{-1.0, 2.0};
  CHECK(*el_lambda(two) == doctest::Approx(0.25).epsilon(1e-12));
  const std::vector<double> one_sided{1.0, 2.0, 3.0};
  CHECK_FALSE(el_lambda(one_sided).has_value());
  const std::vector<double> touching{0.0, 1.0, 2.0};
  CHECK_FALSE(el_lambda(touching).has_value());
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(*el_lambda(zeros) == 0.0);
}

TEST_CASE("lambda keeps weights positive and solves the score equation") {
  RandomStream rng(4);
  std::normal_distribution<double> n(0.3, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> z(5 + rep % 40);
    for (auto& v : z) v = n(rng);
    const auto lambda = el_lambda(z);
    if (!lambda) continue;
    double g = 0.0;
    double scale = 0.0;
    for (double v : z) {
      CHECK(1.0 + *lambda * v > 0.0);
      g += v / (1.0 + *lambda * v);
      scale += std::abs(v);
    }
    CHECK(std::abs(g) < 1e-9 * scale);
  }
}

TEST_CASE("EL log ratio") {
  const std::vector<double> two{-1.0, 2.0};
  CHECK(el_log_ratio(two) == doctest::Approx(2.0 * (std::log(0.75) + std::log(1.5))).epsilon(1e-12));
  // 2 log(1.125) = 0.235566; the commonly quoted 0.23525 is a rounding slip.
  CHECK(std::abs(el_log_ratio(two) - 0.23525) < 5e-4);
  const std::vector<double> one_sided{1.0, 2.0};
  CHECK(std::isinf(el_log_ratio(one_sided)));
}

TEST_CASE("statistics vanish at the point estimate") {
  const auto data = simulated(HeavyTailModel::frechet(1.0), 25, 40, 1, 21);
  const double p = 1e-3;
  const double y = quantile_hat(data, p).log_xp_hat;
  CHECK(el_statistic(data, p, y) < 1e-18);
  CHECK(ael_statistic(data, p, y) < 1e-18);
}

TEST_CASE("AEL is dominated by EL pointwise") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto data = simulated(HeavyTailModel::burr(1.0, 0.5), 15 + seed, 30, 1 + seed % 3, seed);
    const double p = 1e-3;
    const double center = quantile_hat(data, p).log_xp_hat;
    for (double dy = -4.0; dy <= 4.0; dy += 0.25) {
      const double el = el_statistic(data, p, center + dy);
      const double ael = ael_statistic(data, p, center + dy);
      CHECK(ael <= el + 1e-12);
      CHECK(std::isfinite(ael));
    }
  }
}

TEST_CASE("profile statistic matches the free functions") {
  const auto data = simulated(HeavyTailModel::frechet(1.0), 20, 50, 2, 5);
  const double p = 1e-3;
  const LogQuantileProfile profile(data, p);
  for (double y : {1.0, 4.0, 7.5, 12.0}) {
    const double el = el_statistic(data, p, y);
    if (std::isinf(el)) {
      CHECK(std::isinf(profile.statistic(y, CiMethod::EL)));
    } else {
      CHECK(profile.statistic(y, CiMethod::EL) == doctest::Approx(el).epsilon(1e-12));
    }
    CHECK(profile.statistic(y, CiMethod::AEL) == doctest::Approx(ael_statistic(data, p, y)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(profile.statistic(1.0, CiMethod::Normal), Error);
}

TEST_CASE("normal interval") {
  const auto est = quantile_hat(worked_example(), kWorkedP);
  const auto ci = normal_ci(est, 0.05);
  CHECK(ci.upper - ci.point == doctest::Approx(1.959964 * 2.0 * 0.75 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(ci.upper - ci.point == doctest::Approx(2.0789).epsilon(1e-4));
  CHECK(ci.point - ci.lower == doctest::Approx(ci.upper - ci.point).epsilon(1e-14));
  CHECK(normal_ci(est, 0.999999).length() < 1e-4);
  double prev = 0.0;
  for (double alpha : {0.5, 0.2, 0.1, 0.05, 0.01}) {
    const double len = normal_ci(est, alpha).length();
    CHECK(len > prev);
    prev = len;
  }
}

TEST_CASE("likelihood intervals bracket the point estimate") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto data = simulated(HeavyTailModel::frechet(1.0), 40, 25, 1, 100 + seed);
    const double p = 1e-3;
    const LogQuantileProfile profile(data, p);
    const double c = chi2_critical(0.05);
    const auto el = profile.interval(0.05, CiMethod::EL);
    const auto ael = profile.interval(0.05, CiMethod::AEL);
    for (const auto* ci : {&el, &ael}) {
      CHECK(ci->contains(ci->point));
      CHECK(ci->lower < ci->upper);
      CHECK_FALSE(ci->diagnostics.bracket_failure);
      const auto method = ci->method;
      CHECK(profile.statistic(ci->lower + 1e-4, method) < c);
      CHECK(profile.statistic(ci->upper - 1e-4, method) < c);
      CHECK(profile.statistic(ci->lower - 1e-4, method) >= c);
      CHECK(profile.statistic(ci->upper + 1e-4, method) >= c);
    }
    CHECK(ael.lower <= el.lower + 1e-6);
    CHECK(ael.upper >= el.upper - 1e-6);
  }
}

TEST_CASE("interval membership agrees with the statistic at y") {
  const auto data = simulated(HeavyTailModel::burr(0.5, 1.0), 30, 33, 1, 42);
  const double p = 1e-3;
  const LogQuantileProfile profile(data, p);
  const double c = chi2_critical(0.05);
  for (const auto method : {CiMethod::EL, CiMethod::AEL}) {
    const auto ci = profile.interval(0.05, method);
    for (double y = ci.lower - 2.0; y <= ci.upper + 2.0; y += 0.01) {
      // Exclude a thin band around the endpoints, which are only located to 1e-6.
      if (std::abs(y - ci.lower) < 1e-5 || std::abs(y - ci.upper) < 1e-5) continue;
      CHECK(ci.contains(y) == (profile.statistic(y, method) < c));
    }
  }
}

TEST_CASE("interval is location equivariant") {
  const auto data = simulated(HeavyTailModel::frechet(1.0), 30, 30, 1, 7);
  const double p = 1e-3;
  const auto base = likelihood_ci(data, p, 0.05, CiMethod::AEL);
  const auto moved = likelihood_ci(data.shifted(1.5), p, 0.05, CiMethod::AEL);
  CHECK(moved.lower == doctest::Approx(base.lower + 1.5).epsilon(1e-6));
  CHECK(moved.upper == doctest::Approx(base.upper + 1.5).epsilon(1e-6));
}

TEST_CASE("small samples: AEL cannot reach the critical value") {
  const LogQuantileProfile profile(worked_example(), kWorkedP);
  const auto ci = profile.interval(0.05, CiMethod::AEL);
  CHECK(ci.diagnostics.bracket_failure);
  CHECK_FALSE(ci.diagnostics.correction_factor_large);  // 19/12 < 2^{2/3}
  CHECK(profile.interval(0.05, CiMethod::AEL, 2.0).diagnostics.correction_factor_large);
  const auto el = profile.interval(0.05, CiMethod::EL);
  CHECK(el.diagnostics.hull_failure_at_endpoints);
  CHECK(el.contains(3.25));
}

TEST_CASE("profile preconditions") {
  CHECK_THROWS_AS(LogQuantileProfile(zero_a_example(), kZeroAP), Error);
  CHECK_THROWS_AS(LogQuantileProfile(worked_example(), 0.9), Error);
  const auto mixed = BlockData::validate(std::vector<Block>{{100, {2.0, 1.0}}, {200, {3.0, 2.0, 1.0}}});
  CHECK_THROWS_AS(LogQuantileProfile(mixed, 1e-3), Error);
  const auto flat = BlockData::validate(std::vector<Block>{{5, {1.0, 1.0}}, {5, {2.0, 2.0}}});
  CHECK_THROWS_AS(normal_ci(quantile_hat(flat, 1e-2), 0.05), Error);
}
