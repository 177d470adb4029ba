#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <string>

#include "blockquant/error.hpp"
#include "blockquant/montecarlo.hpp"

namespace blockquant {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_as(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(Errc::ConfigError, "bad value for '" + key + "': '" + text + "'");
  }
  return value;
}

// Accepts decimals and simple fractions such as 19/12.
double parse_real(const std::string& key, const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_as<double>(key, text);
  const double num = parse_as<double>(key, trim(text.substr(0, slash)));
  const double den = parse_as<double>(key, trim(text.substr(slash + 1)));
  if (den == 0.0) throw Error(Errc::ConfigError, "zero denominator for '" + key + "'");
  return num / den;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw Error(Errc::ConfigError, "bad boolean for '" + key + "': '" + text + "'");
}

}  // namespace

std::vector<std::size_t> parse_k_grid(const std::string& raw) {
  const std::string text = trim(raw);
  std::vector<std::size_t> grid;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw Error(Errc::ConfigError, "k_grid range must be start:stop:step");
    const auto start = parse_as<std::size_t>("k_grid", parts[0]);
    const auto stop = parse_as<std::size_t>("k_grid", parts[1]);
    const auto step = parse_as<std::size_t>("k_grid", parts[2]);
    if (step == 0 || stop < start) throw Error(Errc::ConfigError, "empty k_grid range");
    for (auto k = start; k <= stop; k += step) grid.push_back(k);
  } else {
    for (const auto& item : split(text, ',')) grid.push_back(parse_as<std::size_t>("k_grid", item));
  }
  for (const auto k : grid) {
    if (k < 2) throw Error(Errc::ConfigError, "k_grid entries must be at least 2");
  }
  if (grid.empty()) throw Error(Errc::ConfigError, "empty k_grid");
  return grid;
}

std::vector<SimConfig> parse_study_config(std::istream& in) {
  static const std::set<std::string> known{"scheme", "model",  "k_grid", "r",       "replicates",
                                           "alpha",  "methods", "a_n",   "master_seed", "v",
                                           "c",      "n",      "lengths", "sampler"};
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!known.contains(key)) {
      throw Error(Errc::ConfigError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
      throw Error(Errc::ConfigError, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }

  for (const char* required : {"scheme", "model"}) {
    if (!kv.contains(required)) throw Error(Errc::ConfigError, std::string("missing key '") + required + "'");
  }

  SimConfig base;
  const auto& scheme = kv.at("scheme");
  if (scheme == "1" || scheme == "scheme1") {
    Scheme1 s;
    if (kv.contains("n")) s.n = parse_as<std::size_t>("n", kv.at("n"));
    if (kv.contains("v") || kv.contains("c")) throw Error(Errc::ConfigError, "v and c apply to scheme 2 only");
    base.scheme = s;
  } else if (scheme == "2" || scheme == "scheme2") {
    Scheme2 s;
    if (kv.contains("v")) {
      s.v = parse_real("v", kv.at("v"));
      if (!(*s.v > 0.0 && *s.v < 1.0)) throw Error(Errc::ConfigError, "v must lie in (0, 1)");
    }
    if (kv.contains("c")) s.c = parse_real("c", kv.at("c"));
    if (kv.contains("n")) throw Error(Errc::ConfigError, "n applies to scheme 1 only");
    base.scheme = s;
  } else {
    throw Error(Errc::ConfigError, "scheme must be 1 or 2");
  }

  base.k_grid = parse_k_grid(kv.contains("k_grid") ? kv.at("k_grid") : "10:100:5");
  if (kv.contains("r")) base.r = parse_as<std::size_t>("r", kv.at("r"));
  if (base.r < 1) throw Error(Errc::ConfigError, "r must be at least 1");
  if (kv.contains("replicates")) base.replicates = parse_as<std::size_t>("replicates", kv.at("replicates"));
  if (base.replicates < 1) throw Error(Errc::ConfigError, "replicates must be at least 1");
  if (kv.contains("alpha")) base.alpha = parse_real("alpha", kv.at("alpha"));
  if (!(base.alpha > 0.0 && base.alpha < 1.0)) throw Error(Errc::ConfigError, "alpha must lie in (0, 1)");
  if (kv.contains("a_n")) base.a_n = parse_real("a_n", kv.at("a_n"));
  if (!(base.a_n > 0.0)) throw Error(Errc::ConfigError, "a_n must be positive");
  if (kv.contains("master_seed")) base.master_seed = parse_as<std::uint64_t>("master_seed", kv.at("master_seed"));
  if (kv.contains("lengths")) base.lengths = parse_bool("lengths", kv.at("lengths"));
  if (kv.contains("sampler")) {
    const auto& s = kv.at("sampler");
    if (s == "beta") {
      base.sampler = SamplerKind::Beta;
    } else if (s == "harmonic") {
      base.sampler = SamplerKind::HarmonicSum;
    } else {
      throw Error(Errc::ConfigError, "sampler must be beta or harmonic");
    }
  }
  if (kv.contains("methods")) {
    base.methods.clear();
    for (const auto& name : split(kv.at("methods"), ',')) base.methods.push_back(parse_method(name));
    if (base.methods.empty()) throw Error(Errc::ConfigError, "no methods");
  }

  std::vector<SimConfig> configs;
  for (const auto& spec : split(kv.at("model"), ';')) {
    if (spec.empty()) continue;
    SimConfig cfg = base;
    cfg.model = HeavyTailModel::parse(spec);
    for (const auto k : cfg.k_grid) scheme_params(cfg.scheme, cfg.model, k);  // surfaces UnknownV early
    configs.push_back(std::move(cfg));
  }
  if (configs.empty()) throw Error(Errc::ConfigError, "no model given");
  return configs;
}

}  // namespace blockquant
