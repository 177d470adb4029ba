#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "blockquant/distributions.hpp"
#include "blockquant/likelihood.hpp"

namespace blockquant {

/// Fixed total sample size: m = floor(n/k), p = 1/n.
struct Scheme1 {
  std::size_t n = 1000;
};

/// Growing blocks: m = floor(c * k^v), p = 1/(k m). When v is unset it is
/// looked up for the three studied models.
struct Scheme2 {
  std::optional<double> v;
  double c = 50.0;
};

using Scheme = std::variant<Scheme1, Scheme2>;

struct SimConfig {
  Scheme scheme = Scheme1{};
  HeavyTailModel model = HeavyTailModel::frechet(1.0);
  std::vector<std::size_t> k_grid;
  std::size_t r = 1;
  std::size_t replicates = 5000;
  double alpha = 0.05;
  std::vector<CiMethod> methods{CiMethod::AEL, CiMethod::Normal};
  double a_n = kDefaultAn;
  std::uint64_t master_seed = 20240601;
  /// Build full intervals to report mean lengths; coverage alone only needs
  /// the statistic at the true value.
  bool lengths = true;
  SamplerKind sampler = SamplerKind::Beta;
};

struct CellParams {
  std::size_t m = 0;
  double p = 0.0;
  std::optional<double> v_used;
};

/// Block size and tail probability for one k. Throws UnknownV for Scheme2
/// with an unlisted model and no explicit v, DomainError for k < 2.
CellParams scheme_params(const Scheme& scheme, const HeavyTailModel& model, std::size_t k);

/// Exponent v used by Scheme 2 for the three studied models.
std::optional<double> default_scheme2_v(const HeavyTailModel& model);

/// Independent random stream for (master_seed, k, replicate).
RandomStream replicate_stream(std::uint64_t master_seed, std::size_t k, std::size_t replicate);

struct MethodOutcome {
  CiMethod method = CiMethod::Normal;
  /// False when the replicate could not be evaluated (e.g. gamma_hat = 0).
  bool ok = false;
  bool covered = false;
  /// Statistic at the true value was infinite (EL only).
  bool hull_failure = false;
  /// NaN unless lengths were requested and the interval was built.
  double length = 0.0;
};

struct ReplicateRecord {
  double true_log_xp = 0.0;
  QuantileEstimate estimate;
  std::vector<MethodOutcome> outcomes;  // config.methods order
};

/// Simulates one replicate of one k cell.
ReplicateRecord run_cell(const SimConfig& config, std::size_t k, std::size_t replicate);

struct ReportRow {
  std::size_t k = 0;
  std::size_t m = 0;
  double p = 0.0;
  CiMethod method = CiMethod::Normal;
  std::size_t covered = 0;
  std::size_t replicates = 0;
  double coverage = 0.0;
  double mean_length = 0.0;
  double mc_se_coverage = 0.0;
  std::size_t hull_failures = 0;
  std::size_t failures = 0;
};

struct SimulationReport {
  std::string model;  // display name
  std::string scheme;
  std::vector<ReportRow> rows;  // k-major, methods in config order
};

struct RunOptions {
  /// 0 selects the default worker count.
  std::size_t workers = 0;
  /// Called after each finished k cell with (cells done, cells total).
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Default worker count: BLOCKQUANT_WORKERS when set, else the hardware
/// concurrency.
std::size_t default_workers();

/// Runs every (k, method) cell. Output is independent of the worker count.
SimulationReport run_study(const SimConfig& config, const RunOptions& options = {});

/// `k,m,p,method,coverage,mean_length,mc_se,hull_failures`
void write_report_csv(std::ostream& out, const SimulationReport& report, bool with_model_column = false);

/// Coverage (4 decimals) and mean length (3 decimals) tables, one row per k,
/// one column pair per report.
void write_report_table(std::ostream& out, const std::vector<SimulationReport>& reports, bool lengths);

/// Key-value study configuration. The `model` key may list several models
/// separated by ';', producing one SimConfig each.
std::vector<SimConfig> parse_study_config(std::istream& in);

/// Grid syntax: `10,20,50` or `start:stop:step`.
std::vector<std::size_t> parse_k_grid(const std::string& text);

}  // namespace blockquant
