#include "blockquant/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "blockquant/block_data.hpp"
#include "blockquant/error.hpp"
#include "blockquant/estimators.hpp"
#include "blockquant/likelihood.hpp"
#include "blockquant/montecarlo.hpp"
#include "blockquant/reference_tables.hpp"

namespace blockquant::cli {
namespace {

using nlohmann::json;

constexpr double kCoverageTolerance = 0.015;
constexpr double kLengthRelativeTolerance = 0.03;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double parse_fraction(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    const double num = std::stod(text.substr(0, slash));
    const double den = std::stod(text.substr(slash + 1));
    return num / den;
  } catch (const std::exception&) {
    throw Error(Errc::ParseError, "bad value for " + what + ": '" + text + "'");
  }
}

struct DataOptions {
  std::string input;
  std::optional<std::size_t> k;
  std::optional<std::size_t> r;
};

BlockData load_data(const DataOptions& opts) {
  std::ifstream in(opts.input);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + opts.input + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::istringstream first_scan(text);
  std::string line;
  bool block_format = false;
  while (std::getline(first_scan, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    block_format = line.compare(pos, 8, "block_id") == 0;
    break;
  }
  std::istringstream stream(text);
  if (block_format) return read_block_csv(stream);
  if (!opts.k || !opts.r) {
    throw Error(Errc::ParseError, "'" + opts.input + "' is a raw sample; --k and --r are required to form blocks");
  }
  return blockify(read_raw_sample(stream), *opts.k, *opts.r);
}

QuantileEstimate estimate_for(const BlockData& data, double p) {
  return data.is_homogeneous() ? quantile_hat(data, p) : quantile_hat_star(data, p);
}

json estimate_json(const QuantileEstimate& est) {
  json j;
  j["gamma_hat"] = number(est.gamma_hat);
  j["log_xp_hat"] = number(est.log_xp_hat);
  j["xp_hat"] = number(std::exp(est.log_xp_hat));
  j["a_coeff"] = number(est.a_coeff);
  j["total_ranks"] = est.total_ranks;
  j["se_log_xp"] = number(est.se_log_xp);
  j["heterogeneous"] = est.heterogeneous;
  j["warnings"] = json::array();
  if (est.non_negative_a) j["warnings"].push_back("NonNegativeACoeff");
  return j;
}

void warn_non_negative(const QuantileEstimate& est, bool strict, std::ostream& err) {
  if (!est.non_negative_a) return;
  if (strict) throw Error(Errc::NonNegativeACoeff, "a = " + format_double(est.a_coeff) + " >= 0");
  err << "warning: a(m,r,p) = " << format_double(est.a_coeff)
      << " >= 0; p is not in the tail for these block sizes\n";
}

std::vector<std::string> diagnostic_names(const CiDiagnostics& d) {
  std::vector<std::string> names;
  if (d.hull_failure_at_endpoints) names.emplace_back("HullFailureAtEndpoints");
  if (d.bracket_expanded) names.emplace_back("BracketExpanded");
  if (d.bracket_failure) names.emplace_back("BracketFailure");
  if (d.negative_lower) names.emplace_back("NegativeLowerBound");
  if (d.correction_factor_large) names.emplace_back("CorrectionFactorLarge");
  return names;
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

// ---- estimate ---------------------------------------------------------------

struct EstimateArgs {
  DataOptions data;
  double p = 0.0;
  std::string format = "json";
  bool strict = false;
};

int cmd_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err) {
  const auto data = load_data(args.data);
  const auto est = estimate_for(data, args.p);
  warn_non_negative(est, args.strict, err);
  if (args.format == "json") {
    out << estimate_json(est).dump(2) << '\n';
  } else if (args.format == "csv") {
    out << "gamma_hat,log_xp_hat,xp_hat,a_coeff,total_ranks,se_log_xp,heterogeneous\n"
        << format_double(est.gamma_hat) << ',' << format_double(est.log_xp_hat) << ','
        << format_double(std::exp(est.log_xp_hat)) << ',' << format_double(est.a_coeff) << ','
        << est.total_ranks << ',' << format_double(est.se_log_xp) << ','
        << (est.heterogeneous ? "true" : "false") << '\n';
  } else {
    out << "blocks          " << data.size() << (est.heterogeneous ? " (heterogeneous)" : "") << '\n'
        << "gamma_hat       " << format_double(est.gamma_hat) << '\n'
        << "log_xp_hat      " << format_double(est.log_xp_hat) << '\n'
        << "xp_hat          " << format_double(std::exp(est.log_xp_hat)) << '\n'
        << "a_coeff         " << format_double(est.a_coeff) << '\n'
        << "total_ranks     " << est.total_ranks << '\n'
        << "se_log_xp       " << format_double(est.se_log_xp) << '\n';
  }
  return kExitOk;
}

// ---- ci ---------------------------------------------------------------------

struct CiArgs {
  EstimateArgs base;
  double alpha = 0.05;
  std::string method = "all";
  std::string an = "19/12";
};

int cmd_ci(const CiArgs& args, std::ostream& out, std::ostream& err) {
  const auto data = load_data(args.base.data);
  const double a_n = parse_fraction(args.an, "--an");
  const auto est = estimate_for(data, args.base.p);
  warn_non_negative(est, args.base.strict, err);
  chi2_critical(args.alpha);  // validates alpha before any work

  std::vector<CiMethod> methods;
  if (args.method == "all") {
    methods = {CiMethod::Normal, CiMethod::EL, CiMethod::AEL};
    if (est.heterogeneous) {
      err << "note: likelihood intervals need a common (m, r); reporting the normal interval only\n";
      methods = {CiMethod::Normal};
    }
  } else {
    methods = {parse_method(args.method)};
  }

  std::vector<ConfidenceInterval> intervals;
  std::optional<LogQuantileProfile> profile;
  for (const auto method : methods) {
    if (method == CiMethod::Normal) {
      intervals.push_back(normal_ci(est, args.alpha));
    } else {
      if (!profile) profile.emplace(data, args.base.p);
      intervals.push_back(profile->interval(args.alpha, method, a_n));
    }
  }

  if (args.base.format == "json") {
    json j;
    j["point"] = number(est.log_xp_hat);
    j["level"] = 1.0 - args.alpha;
    j["heterogeneous"] = est.heterogeneous;
    j["intervals"] = json::array();
    for (const auto& ci : intervals) {
      j["intervals"].push_back({{"method", method_name(ci.method)},
                                {"lower", number(ci.lower)},
                                {"upper", number(ci.upper)},
                                {"length", number(ci.length())},
                                {"diagnostics", diagnostic_names(ci.diagnostics)}});
    }
    out << j.dump(2) << '\n';
  } else if (args.base.format == "csv") {
    out << "method,level,point,lower,upper,diagnostics\n";
    for (const auto& ci : intervals) {
      out << method_name(ci.method) << ',' << format_double(ci.level) << ',' << format_double(ci.point) << ','
          << format_double(ci.lower) << ',' << format_double(ci.upper) << ','
          << join(diagnostic_names(ci.diagnostics), ";") << '\n';
    }
  } else {
    out << "log x_p estimate: " << std::fixed << std::setprecision(6) << est.log_xp_hat << '\n';
    for (const auto& ci : intervals) {
      out << std::left << std::setw(7) << method_name(ci.method) << std::right << std::setprecision(0)
          << std::fixed << ci.level * 100 << "%  " << std::setprecision(6) << '(' << ci.lower << ", " << ci.upper
          << ')';
      const auto flags = diagnostic_names(ci.diagnostics);
      if (!flags.empty()) out << "  [" << join(flags, ", ") << ']';
      out << '\n';
    }
  }
  return kExitOk;
}

// ---- simulate ---------------------------------------------------------------

struct RunArgs {
  std::optional<std::uint64_t> seed;
  std::size_t workers = 0;
  std::optional<std::size_t> replicates;
  std::string format;
  std::string output;
};

RunOptions progress_options(std::size_t workers, const std::string& label, std::ostream& err) {
  RunOptions opts;
  opts.workers = workers;
  opts.progress = [&err, label](std::size_t done, std::size_t total) {
    err << label << ": " << done << '/' << total << " cells\n" << std::flush;
  };
  return opts;
}

struct SimulateArgs {
  RunArgs run;
  std::string config;
  std::string table;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  std::ifstream in(args.config);
  if (!in) throw Error(Errc::ConfigError, "cannot open '" + args.config + "'");
  auto configs = parse_study_config(in);
  std::vector<SimulationReport> reports;
  for (auto& cfg : configs) {
    if (args.run.seed) cfg.master_seed = *args.run.seed;
    if (args.run.replicates) cfg.replicates = *args.run.replicates;
    reports.push_back(run_study(cfg, progress_options(args.run.workers, cfg.model.display_name(), err)));
  }
  const bool multi = reports.size() > 1;
  const bool lengths = configs.front().lengths;

  auto write_csv = [&](std::ostream& os) {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      std::ostringstream one;
      write_report_csv(one, reports[i], multi);
      std::string text = one.str();
      if (i > 0) text.erase(0, text.find('\n') + 1);  // single header
      os << text;
    }
  };
  if (!args.run.output.empty()) {
    std::ofstream f(args.run.output);
    if (!f) throw Error(Errc::ConfigError, "cannot write '" + args.run.output + "'");
    write_csv(f);
  }
  if (!args.table.empty()) {
    std::ofstream f(args.table);
    if (!f) throw Error(Errc::ConfigError, "cannot write '" + args.table + "'");
    write_report_table(f, reports, lengths);
  }

  if (args.run.format == "text") {
    write_report_table(out, reports, lengths);
  } else if (args.run.format == "json") {
    json j = json::array();
    for (const auto& rep : reports) {
      for (const auto& row : rep.rows) {
        j.push_back({{"model", rep.model},
                     {"k", row.k},
                     {"m", row.m},
                     {"p", row.p},
                     {"method", method_name(row.method)},
                     {"coverage", row.coverage},
                     {"mean_length", number(row.mean_length)},
                     {"mc_se", row.mc_se_coverage},
                     {"hull_failures", row.hull_failures},
                     {"failures", row.failures}});
      }
    }
    out << j.dump(2) << '\n';
  } else {
    write_csv(out);
  }
  return kExitOk;
}

// ---- tables -----------------------------------------------------------------

struct TablesArgs {
  RunArgs run;
  std::string k_grid = "10:100:5";
};

int cmd_tables(const TablesArgs& args, std::ostream& out, std::ostream& err) {
  const std::array models{HeavyTailModel::frechet(1.0), HeavyTailModel::burr(0.5, 1.0),
                          HeavyTailModel::burr(1.0, 0.5)};
  const auto grid = parse_k_grid(args.k_grid);

  struct Entry {
    int table;
    std::string model;
    CiMethod method;
    std::size_t k;
    double reproduced;
    std::optional<double> reference;
    bool flagged;
  };
  std::vector<Entry> entries;

  for (int scheme = 1; scheme <= 2; ++scheme) {
    for (const auto& model : models) {
      SimConfig cfg;
      cfg.scheme = scheme == 1 ? Scheme(Scheme1{}) : Scheme(Scheme2{});
      cfg.model = model;
      cfg.k_grid = grid;
      cfg.methods = {CiMethod::AEL, CiMethod::Normal};
      cfg.replicates = args.run.replicates.value_or(5000);
      if (args.run.seed) cfg.master_seed = *args.run.seed;
      const auto label = "scheme " + std::to_string(scheme) + ", " + model.display_name();
      const auto report = run_study(cfg, progress_options(args.run.workers, label, err));
      for (const auto& row : report.rows) {
        for (const bool coverage : {true, false}) {
          Entry e;
          e.table = (scheme == 1 ? 1 : 3) + (coverage ? 0 : 1);
          e.model = model.display_name();
          e.method = row.method;
          e.k = row.k;
          e.reproduced = coverage ? row.coverage : row.mean_length;
          e.reference = reference_value(scheme, coverage, model, row.method, row.k);
          e.flagged = false;
          if (e.reference) {
            const double diff = e.reproduced - *e.reference;
            e.flagged = coverage ? std::abs(diff) > kCoverageTolerance
                                 : std::abs(diff) > kLengthRelativeTolerance * *e.reference;
          }
          entries.push_back(e);
        }
      }
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.table < b.table; });

  std::ostringstream body;
  if (args.run.format == "csv") {
    body << "table,model,method,k,reproduced,reference,diff,flagged\n";
    for (const auto& e : entries) {
      body << e.table << ",\"" << e.model << "\"," << (e.method == CiMethod::AEL ? "AELM" : "NORM") << ',' << e.k
           << ',' << format_double(e.reproduced) << ','
           << (e.reference ? format_double(*e.reference) : std::string()) << ','
           << (e.reference ? format_double(e.reproduced - *e.reference) : std::string()) << ','
           << (e.flagged ? "true" : "false") << '\n';
    }
  } else if (args.run.format == "json") {
    json j = json::array();
    for (const auto& e : entries) {
      j.push_back({{"table", e.table},
                   {"model", e.model},
                   {"method", e.method == CiMethod::AEL ? "AELM" : "NORM"},
                   {"k", e.k},
                   {"reproduced", number(e.reproduced)},
                   {"reference", e.reference ? json(*e.reference) : json(nullptr)},
                   {"diff", e.reference ? number(e.reproduced - *e.reference) : json(nullptr)},
                   {"flagged", e.flagged}});
    }
    body << j.dump(2) << '\n';
  } else {
    std::size_t flagged = 0;
    for (int table = 1; table <= 4; ++table) {
      const bool coverage = table % 2 == 1;
      body << "Table " << table << ": " << (coverage ? "coverage probability" : "average interval length")
           << ", scheme " << (table <= 2 ? 1 : 2) << "  (reproduced / reference / diff, * = outside tolerance)\n";
      for (const auto& model : models) {
        body << "  " << model.display_name() << '\n';
        for (const auto k : grid) {
          body << "    k=" << std::setw(3) << k;
          for (const auto method : {CiMethod::AEL, CiMethod::Normal}) {
            for (const auto& e : entries) {
              if (e.table != table || e.model != model.display_name() || e.k != k || e.method != method) continue;
              const int prec = coverage ? 4 : 3;
              body << "   " << (method == CiMethod::AEL ? "AELM " : "NORM ") << std::fixed << std::setprecision(prec)
                   << e.reproduced << " / ";
              if (e.reference) {
                body << *e.reference << " / " << std::showpos << (e.reproduced - *e.reference) << std::noshowpos
                     << (e.flagged ? '*' : ' ');
              } else {
                body << "   -   /    -    ";
              }
              flagged += e.flagged ? 1 : 0;
            }
          }
          body << '\n';
        }
      }
      body << '\n';
    }
    body << "entries outside tolerance (coverage +/-" << kCoverageTolerance << ", length +/-"
         << kLengthRelativeTolerance * 100 << "%): " << flagged << '\n';
  }

  if (!args.run.output.empty()) {
    std::ofstream f(args.run.output);
    if (!f) throw Error(Errc::ConfigError, "cannot write '" + args.run.output + "'");
    f << body.str();
  }
  out << body.str();
  return kExitOk;
}

void add_data_options(CLI::App* cmd, EstimateArgs& args) {
  cmd->add_option("--input", args.data.input, "Block CSV (block_id,m,rank,log_value) or raw sample file")
      ->required();
  cmd->add_option("--p", args.p, "Upper tail probability of the target quantile")->required();
  cmd->add_option("--k", args.data.k, "Number of blocks when --input is a raw sample");
  cmd->add_option("--r", args.data.r, "Order statistics per block beyond the first (raw sample)");
  cmd->add_flag("--strict", args.strict, "Treat a(m,r,p) >= 0 as an error");
}

void add_run_options(CLI::App* cmd, RunArgs& args, const std::string& default_format) {
  args.format = default_format;
  cmd->add_option("--seed", args.seed, "Master seed");
  cmd->add_option("--workers", args.workers, "Worker threads (default: $BLOCKQUANT_WORKERS or all cores)");
  cmd->add_option("--replicates", args.replicates, "Override the replicate count");
  cmd->add_option("--format", args.format, "Output format")
      ->check(CLI::IsMember({"csv", "text", "json"}))
      ->capture_default_str();
  cmd->add_option("--output", args.output, "Also write the primary output to this file");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"High-quantile inference for heavy-tailed block data", "blockquant"};
  app.require_subcommand(1);

  EstimateArgs estimate_args;
  auto* estimate = app.add_subcommand("estimate", "Point estimates of gamma and log x_p");
  add_data_options(estimate, estimate_args);
  estimate->add_option("--format", estimate_args.format)->check(CLI::IsMember({"json", "csv", "text"}));

  CiArgs ci_args;
  auto* ci = app.add_subcommand("ci", "Confidence intervals for log x_p");
  add_data_options(ci, ci_args.base);
  ci->add_option("--format", ci_args.base.format)->check(CLI::IsMember({"json", "csv", "text"}));
  ci->add_option("--alpha", ci_args.alpha, "1 - confidence level")->capture_default_str();
  ci->add_option("--method", ci_args.method, "normal|el|ael|all")
      ->check(CLI::IsMember({"normal", "el", "ael", "all"}))
      ->capture_default_str();
  ci->add_option("--an", ci_args.an, "Pseudo-point weight for AEL")->capture_default_str();

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Run a coverage study from a configuration file");
  simulate->add_option("--config", sim_args.config, "Study configuration file")->required();
  simulate->add_option("--table", sim_args.table, "Write the formatted text table to this file");
  add_run_options(simulate, sim_args.run, "csv");

  TablesArgs tables_args;
  auto* tables = app.add_subcommand("tables", "Reproduce the four reference tables and compare");
  tables->add_option("--k-grid", tables_args.k_grid, "k values: list or start:stop:step")->capture_default_str();
  add_run_options(tables, tables_args.run, "text");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(estimate_args, out, err);
    if (ci->parsed()) return cmd_ci(ci_args, out, err);
    if (simulate->parsed()) return cmd_simulate(sim_args, out, err);
    if (tables->parsed()) return cmd_tables(tables_args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e.code()) ? kExitInputError : kExitDomainError;
  }
  return kExitInputError;
}

}  // namespace blockquant::cli
