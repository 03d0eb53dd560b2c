#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plshoot/ivp.hpp"
#include "plshoot/model.hpp"

namespace plshoot::cli {

struct RunConfig {
  double N = 3.0;
  double p = 2.0;
  std::optional<double> m;
  std::optional<double> s;
  std::optional<std::string> table;
  std::optional<double> lambda;
  std::vector<double> lambda_grid;
  std::optional<int> k;
  double omega = 1.0 / 16.0;
  double theta_growth = 0.904;
  std::optional<double> r_max;
  Tolerances tol;
  bool refine = false;
  std::uint64_t seed = 0;
  std::string out_dir;
};

/// Keys accepted in config files; flags use the same names with '-'.
const std::vector<std::string>& known_keys();

/// Throws ConfigError on an unknown key or an unparsable value.
void apply(RunConfig& cfg, const std::string& key, const std::string& value);

/// key = value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in, const std::string& origin);
std::vector<std::pair<std::string, std::string>> read_key_values_file(const std::string& path);

/// "a,b,c" or "lo:hi:n" (n evenly spaced points, both ends included).
std::vector<double> parse_grid(const std::string& text);

/// Sorted key=value lines of every setting that affects results. The output
/// directory is left out.
std::string canonical(const RunConfig& cfg);
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t h);

/// Power family from m and s, or the table. Throws ConfigError if neither or
/// both are given.
Nonlinearity build_nonlinearity(const RunConfig& cfg);

}  // namespace plshoot::cli
