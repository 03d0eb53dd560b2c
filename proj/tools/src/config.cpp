#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "io.hpp"
#include "plshoot/error.hpp"

namespace plshoot::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc{} || ptr != end || v.empty()) throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc{} || ptr != end || v.empty()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "N",        "p",        "m",         "s",         "table",     "lambda",          "lambda_grid",
      "k",        "omega",    "theta_growth", "r_max",  "rel_tol",   "abs_tol",         "event_tol",
      "double_zero_tol", "refine", "seed",  "out_dir"};
  return keys;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "N") cfg.N = to_double(key, v);
  else if (key == "p") cfg.p = to_double(key, v);
  else if (key == "m") cfg.m = to_double(key, v);
  else if (key == "s") cfg.s = to_double(key, v);
  else if (key == "table") cfg.table = v;
  else if (key == "lambda") cfg.lambda = to_double(key, v);
  else if (key == "lambda_grid") cfg.lambda_grid = parse_grid(v);
  else if (key == "k") {
    const long long k = to_integer(key, v);
    if (k < 0 || k > 100000) throw ConfigError("k: must lie in [0, 100000]");
    cfg.k = static_cast<int>(k);
  } else if (key == "omega") cfg.omega = to_double(key, v);
  else if (key == "theta_growth") cfg.theta_growth = to_double(key, v);
  else if (key == "r_max") cfg.r_max = to_double(key, v);
  else if (key == "rel_tol") cfg.tol.rel_tol = to_double(key, v);
  else if (key == "abs_tol") cfg.tol.abs_tol = to_double(key, v);
  else if (key == "event_tol") cfg.tol.event_tol = to_double(key, v);
  else if (key == "double_zero_tol") cfg.tol.double_zero_tol = to_double(key, v);
  else if (key == "refine") cfg.refine = to_bool(key, v);
  else if (key == "seed") {
    const long long s = to_integer(key, v);
    if (s < 0) throw ConfigError("seed: must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "out_dir") cfg.out_dir = v;
  else throw ConfigError("unknown configuration key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in, const std::string& origin) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << origin << ":" << lineno << ": expected key = value";
      throw ConfigError(os.str());
    }
    std::string key = trim(line.substr(0, eq));
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      std::ostringstream os;
      os << origin << ":" << lineno << ": unknown configuration key '" << key << "'";
      throw ConfigError(os.str());
    }
    out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_key_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return read_key_values(in, path);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(trim(item));
    if (parts.size() != 3) throw ConfigError("lambda_grid: expected lo:hi:n");
    const double lo = to_double("lambda_grid", parts[0]);
    const double hi = to_double("lambda_grid", parts[1]);
    const long long n = to_integer("lambda_grid", parts[2]);
    if (n < 2 || n > 1000000) throw ConfigError("lambda_grid: n must lie in [2, 1000000]");
    if (!(hi > lo)) throw ConfigError("lambda_grid: hi must exceed lo");
    for (long long i = 0; i < n; ++i) {
      out.push_back(i == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_double("lambda_grid", trim(item)));
  if (out.empty()) throw ConfigError("lambda_grid: empty");
  return out;
}

std::string canonical(const RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["N"] = fmt(cfg.N);
  kv["p"] = fmt(cfg.p);
  if (cfg.m) kv["m"] = fmt(*cfg.m);
  if (cfg.s) kv["s"] = fmt(*cfg.s);
  if (cfg.table) kv["table"] = *cfg.table;
  if (cfg.lambda) kv["lambda"] = fmt(*cfg.lambda);
  if (!cfg.lambda_grid.empty()) {
    std::string g;
    for (double x : cfg.lambda_grid) g += (g.empty() ? "" : ",") + fmt(x);
    kv["lambda_grid"] = g;
  }
  if (cfg.k) kv["k"] = std::to_string(*cfg.k);
  kv["omega"] = fmt(cfg.omega);
  kv["theta_growth"] = fmt(cfg.theta_growth);
  if (cfg.r_max) kv["r_max"] = fmt(*cfg.r_max);
  kv["rel_tol"] = fmt(cfg.tol.rel_tol);
  kv["abs_tol"] = fmt(cfg.tol.abs_tol);
  kv["event_tol"] = fmt(cfg.tol.event_tol);
  kv["double_zero_tol"] = fmt(cfg.tol.double_zero_tol);
  kv["refine"] = cfg.refine ? "true" : "false";
  kv["seed"] = std::to_string(cfg.seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

Nonlinearity build_nonlinearity(const RunConfig& cfg) {
  const bool power = cfg.m || cfg.s;
  if (power && cfg.table) throw ConfigError("give either m and s or a table, not both");
  if (cfg.table) return load_tabulated_csv(std::filesystem::path(*cfg.table));
  if (!cfg.m || !cfg.s) throw ConfigError("the nonlinearity needs both m and s (or a table)");
  return make_power_family(*cfg.m, *cfg.s, cfg.p, cfg.N);
}

}  // namespace plshoot::cli
