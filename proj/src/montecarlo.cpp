#include "blockquant/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "blockquant/error.hpp"
#include "blockquant/estimators.hpp"

namespace blockquant {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::string scheme_label(const Scheme& scheme) {
  return std::visit(overloaded{
                        [](const Scheme1& s) { return "scheme1(n=" + std::to_string(s.n) + ")"; },
                        [](const Scheme2& s) {
                          return "scheme2(c=" + format_double(s.c) +
                                 (s.v ? ",v=" + format_double(*s.v) : std::string()) + ")";
                        },
                    },
                    scheme);
}

}  // namespace

std::optional<double> default_scheme2_v(const HeavyTailModel& model) {
  if (model == HeavyTailModel::frechet(1.0)) return 0.5;
  if (model == HeavyTailModel::burr(0.5, 1.0)) return 0.5;
  if (model == HeavyTailModel::burr(1.0, 0.5)) return 0.25;
  return std::nullopt;
}

CellParams scheme_params(const Scheme& scheme, const HeavyTailModel& model, std::size_t k) {
  if (k < 2) throw Error(Errc::DomainError, "k must be at least 2");
  return std::visit(
      overloaded{
          [&](const Scheme1& s) {
            if (s.n < 2 * k) throw Error(Errc::DomainError, "Scheme 1 needs n >= 2k");
            return CellParams{s.n / k, 1.0 / static_cast<double>(s.n), std::nullopt};
          },
          [&](const Scheme2& s) {
            const auto v = s.v ? s.v : default_scheme2_v(model);
            if (!v) throw Error(Errc::UnknownV, "no default v for " + model.spec() + "; set v explicitly");
            // The epsilon keeps exact powers such as 16^{1/4} = 2 from flooring down.
            const double raw = s.c * std::pow(static_cast<double>(k), *v);
            const auto m = static_cast<std::size_t>(std::floor(raw * (1.0 + 1e-12)));
            if (m < 2) throw Error(Errc::DomainError, "Scheme 2 block size below 2");
            return CellParams{m, 1.0 / (static_cast<double>(k) * static_cast<double>(m)), v};
          },
      },
      scheme);
}

RandomStream replicate_stream(std::uint64_t master_seed, std::size_t k, std::size_t replicate) {
  const auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x); };
  const auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  const std::uint64_t kk = k;
  const std::uint64_t rr = replicate;
  std::seed_seq seq{lo(master_seed), hi(master_seed), lo(kk), hi(kk), lo(rr), hi(rr)};
  return RandomStream(seq);
}

ReplicateRecord run_cell(const SimConfig& config, std::size_t k, std::size_t replicate) {
  const auto params = scheme_params(config.scheme, config.model, k);
  auto rng = replicate_stream(config.master_seed, k, replicate);

  std::vector<double> values;
  values.reserve(k * (config.r + 1));
  for (std::size_t i = 0; i < k; ++i) {
    append_top_block_logs(config.model, params.m, config.r, rng, values, config.sampler);
  }
  const auto data = BlockData::homogeneous(params.m, config.r, std::move(values));

  ReplicateRecord record;
  record.true_log_xp = true_log_quantile(config.model, params.p);
  record.estimate = quantile_hat(data, params.p);
  const double y0 = record.true_log_xp;
  const double critical = chi2_critical(config.alpha);

  std::optional<LogQuantileProfile> profile;
  for (const auto method : config.methods) {
    MethodOutcome out;
    out.method = method;
    out.length = std::numeric_limits<double>::quiet_NaN();
    try {
      if (method == CiMethod::Normal) {
        const auto ci = normal_ci(record.estimate, config.alpha);
        out.covered = ci.contains(y0);
        if (config.lengths) out.length = ci.length();
      } else {
        if (!profile) profile.emplace(data, params.p);
        const double stat = profile->statistic(y0, method, config.a_n);
        out.hull_failure = std::isinf(stat);
        out.covered = stat < critical;
        if (config.lengths) out.length = profile->interval(config.alpha, method, config.a_n).length();
      }
      out.ok = true;
    } catch (const Error&) {
      out.ok = false;
      out.covered = false;
    }
    record.outcomes.push_back(out);
  }
  return record;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("BLOCKQUANT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

SimulationReport run_study(const SimConfig& config, const RunOptions& options) {
  if (config.replicates < 1) throw Error(Errc::ConfigError, "replicates must be at least 1");
  if (config.methods.empty()) throw Error(Errc::ConfigError, "no methods requested");
  const std::size_t cells = config.k_grid.size();
  const std::size_t reps = config.replicates;

  std::vector<CellParams> params;
  params.reserve(cells);
  for (const auto k : config.k_grid) params.push_back(scheme_params(config.scheme, config.model, k));

  std::vector<std::vector<ReplicateRecord>> records(cells, std::vector<ReplicateRecord>(reps));
  std::vector<std::atomic<std::size_t>> remaining(cells);
  for (auto& r : remaining) r.store(reps);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> cells_done{0};
  std::mutex progress_mutex;
  const std::size_t tasks = cells * reps;

  auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) break;
      const std::size_t cell = t / reps;
      const std::size_t rep = t % reps;
      records[cell][rep] = run_cell(config, config.k_grid[cell], rep);
      if (remaining[cell].fetch_sub(1) == 1 && options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(++cells_done, cells);
      }
    }
  };

  const std::size_t workers = std::min(options.workers == 0 ? default_workers() : options.workers, tasks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  // Sequential reduction in replicate order keeps results independent of
  // the worker count.
  SimulationReport report;
  report.model = config.model.display_name();
  report.scheme = scheme_label(config.scheme);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      ReportRow row;
      row.k = config.k_grid[cell];
      row.m = params[cell].m;
      row.p = params[cell].p;
      row.method = config.methods[mi];
      row.replicates = reps;
      CompensatedSum length_sum;
      std::size_t length_count = 0;
      for (const auto& rec : records[cell]) {
        const auto& out = rec.outcomes[mi];
        if (out.hull_failure) ++row.hull_failures;
        if (!out.ok) {
          ++row.failures;
          continue;
        }
        if (out.covered) ++row.covered;
        if (std::isfinite(out.length)) {
          length_sum.add(out.length);
          ++length_count;
        }
      }
      row.coverage = static_cast<double>(row.covered) / static_cast<double>(reps);
      row.mc_se_coverage = std::sqrt(row.coverage * (1.0 - row.coverage) / static_cast<double>(reps));
      row.mean_length = length_count > 0 ? length_sum.value() / static_cast<double>(length_count)
                                         : std::numeric_limits<double>::quiet_NaN();
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_report_csv(std::ostream& out, const SimulationReport& report, bool with_model_column) {
  if (with_model_column) out << "model,";
  out << "k,m,p,method,coverage,mean_length,mc_se,hull_failures\n";
  for (const auto& row : report.rows) {
    if (with_model_column) out << '"' << report.model << "\",";
    out << row.k << ',' << row.m << ',' << format_double(row.p) << ',' << method_name(row.method) << ','
        << format_double(row.coverage) << ',' << format_double(row.mean_length) << ','
        << format_double(row.mc_se_coverage) << ',' << row.hull_failures << '\n';
  }
}

namespace {

std::string method_label(CiMethod method) {
  switch (method) {
    case CiMethod::Normal: return "NORM";
    case CiMethod::EL: return "ELM";
    case CiMethod::AEL: return "AELM";
  }
  return "?";
}

}  // namespace

void write_report_table(std::ostream& out, const std::vector<SimulationReport>& reports, bool lengths) {
  if (reports.empty()) return;
  const auto saved_flags = out.flags();
  const auto saved_precision = out.precision();
  constexpr int kCol = 9;

  auto print_block = [&](bool coverage) {
    out << (coverage ? "Coverage probabilities" : "Average interval lengths") << '\n';
    out << std::setw(5) << "k";
    for (const auto& rep : reports) {
      std::size_t methods = 0;
      if (!rep.rows.empty()) {
        const auto k0 = rep.rows.front().k;
        for (const auto& row : rep.rows) methods += row.k == k0 ? 1 : 0;
      }
      const std::string name = rep.model;
      out << " | " << std::setw(static_cast<int>(methods) * kCol - 1) << std::left << name << std::right;
    }
    out << '\n' << std::setw(5) << "";
    for (const auto& rep : reports) {
      out << " |";
      const auto k0 = rep.rows.empty() ? 0 : rep.rows.front().k;
      for (const auto& row : rep.rows) {
        if (row.k == k0) out << ' ' << std::setw(kCol - 1) << method_label(row.method);
      }
    }
    out << '\n';
    const auto& first = reports.front().rows;
    std::vector<std::size_t> ks;
    for (const auto& row : first) {
      if (ks.empty() || ks.back() != row.k) ks.push_back(row.k);
    }
    for (const auto k : ks) {
      out << std::setw(5) << k;
      for (const auto& rep : reports) {
        out << " |";
        for (const auto& row : rep.rows) {
          if (row.k != k) continue;
          out << ' ' << std::setw(kCol - 1) << std::fixed << std::setprecision(coverage ? 4 : 3)
              << (coverage ? row.coverage : row.mean_length);
        }
      }
      out << '\n';
    }
  };

  print_block(true);
  if (lengths) {
    out << '\n';
    print_block(false);
  }
  out.flags(saved_flags);
  out.precision(saved_precision);
}

}  // namespace blockquant
