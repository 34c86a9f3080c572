#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "mlmc.hpp"
#include "model_syntax.hpp"

namespace levycouple {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_int(const std::string& key, const std::string& v) {
  T out{};
  const std::string t = trim(v);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : v) {
    if (c == ',' || c == ' ') {
      if (!trim(cur).empty()) parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) parts.push_back(trim(cur));
  return parts;
}

std::string join_sizes(const std::vector<std::size_t>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_number(xs[i]);
  return s;
}

}  // namespace

std::vector<std::string> config_keys() {
  return {"model", "eps1", "eps2", "k", "ks", "q", "reps", "endpoint_samples", "seed", "out",
          "threads", "base", "functional", "level_min", "level_max", "level_samples", "p",
          "deltas", "n_min", "n_max"};
}

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& value) {
  std::string key = trim(raw_key);
  for (auto& c : key)
    if (c == '-') c = '_';
  const std::string v = trim(value);
  if (key == "model") cfg.model = v;
  else if (key == "eps1") cfg.eps1 = parse_double(key, v);
  else if (key == "eps2") cfg.eps2 = parse_double(key, v);
  else if (key == "k") cfg.k = parse_int<std::size_t>(key, v);
  else if (key == "ks") {
    cfg.ks.clear();
    for (const auto& p : split_list(v)) cfg.ks.push_back(parse_int<std::size_t>(key, p));
  } else if (key == "q") cfg.q = parse_int<int>(key, v);
  else if (key == "reps") cfg.reps = parse_int<std::size_t>(key, v);
  else if (key == "endpoint_samples") cfg.endpoint_samples = parse_int<std::size_t>(key, v);
  else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(key, v);
  else if (key == "out") cfg.out = v;
  else if (key == "threads") cfg.threads = parse_int<unsigned>(key, v);
  else if (key == "base") cfg.base = v;
  else if (key == "functional") cfg.functional = v;
  else if (key == "level_min") cfg.level_min = parse_int<int>(key, v);
  else if (key == "level_max") cfg.level_max = parse_int<int>(key, v);
  else if (key == "level_samples") cfg.level_samples = parse_int<std::size_t>(key, v);
  else if (key == "p") cfg.p = parse_double(key, v);
  else if (key == "deltas") {
    cfg.deltas.clear();
    for (const auto& p : split_list(v)) cfg.deltas.push_back(parse_double(key, p));
  } else if (key == "n_min") cfg.n_min = parse_int<int>(key, v);
  else if (key == "n_max") cfg.n_max = parse_int<int>(key, v);
  else throw ConfigError("unknown config key '" + raw_key + "'");
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig cfg) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), std::move(cfg));
}

std::string effective_model(const ExperimentConfig& cfg) {
  if (cfg.eps1 || cfg.eps2) {
    if (!(cfg.eps1 && cfg.eps2)) throw ConfigError("eps1 and eps2 must be given together");
    return "exp-stable(" + format_number(*cfg.eps1) + "," + format_number(*cfg.eps2) + ")";
  }
  return cfg.model;
}

std::vector<std::size_t> effective_ks(const ExperimentConfig& cfg) {
  return cfg.ks.empty() ? std::vector<std::size_t>{cfg.k} : cfg.ks;
}

void validate(const ExperimentConfig& cfg) {
  if (!cfg.seed) throw ConfigError("a seed is required (--seed or seed = ...)");
  try {
    LevyModel m(parse_model(effective_model(cfg)));
    LevyModel b(parse_model(cfg.base));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.q < 1 || cfg.q > 20) throw ConfigError("q must lie in [1, 20]");
  const std::size_t cells = std::size_t{1} << cfg.q;
  std::size_t product = 1;
  for (std::size_t k : effective_ks(cfg)) {
    if (k == 0) throw ConfigError("level sizes must be positive");
    product *= k;
    if (product > cells || cells % product != 0)
      throw ConfigError("product of level sizes must divide 2^q");
  }
  if (cfg.reps < 2) throw ConfigError("reps must be >= 2");
  if (cfg.endpoint_samples < 1) throw ConfigError("endpoint_samples must be >= 1");
  if (!parse_functional(cfg.functional)) throw ConfigError("unknown functional '" + cfg.functional + "'");
  if (cfg.level_min < 0 || cfg.level_max < cfg.level_min || cfg.level_max > 14)
    throw ConfigError("levels must satisfy 0 <= level_min <= level_max <= 14");
  if (cfg.level_samples < 2) throw ConfigError("level_samples must be >= 2");
  if (!(cfg.p > 0.0)) throw ConfigError("p must be positive");
  for (double d : cfg.deltas)
    if (!(d > 0.0)) throw ConfigError("deltas must be positive");
  if (cfg.n_min < 0 || cfg.n_max < cfg.n_min || cfg.n_max > 20)
    throw ConfigError("limit-regime levels must satisfy 0 <= n_min <= n_max <= 20");
}

std::string config_echo(const ExperimentConfig& cfg) {
  std::ostringstream o;
  o << "model=" << effective_model(cfg) << " ks=" << join_sizes(effective_ks(cfg)) << " q=" << cfg.q
    << " reps=" << cfg.reps << " endpoint_samples=" << cfg.endpoint_samples
    << " seed=" << (cfg.seed ? std::to_string(*cfg.seed) : "none") << " base=" << cfg.base
    << " functional=" << cfg.functional << " level_min=" << cfg.level_min
    << " level_max=" << cfg.level_max << " level_samples=" << cfg.level_samples
    << " p=" << format_number(cfg.p) << " deltas=" << join_doubles(cfg.deltas)
    << " n_min=" << cfg.n_min << " n_max=" << cfg.n_max;
  return o.str();
}

}  // namespace levycouple
