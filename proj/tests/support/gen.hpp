#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace plshoot::testing {

/// Seeded draws for property tests. Same seed, same sequence.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  /// log-uniform on [a, b], a > 0.
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  template <class T, std::size_t K>
  const T& pick(const T (&xs)[K]) {
    return xs[static_cast<std::size_t>(integer(0, static_cast<int>(K) - 1))];
  }

 private:
  std::mt19937_64 rng_;
};

/// Label for a failing case so it can be replayed.
inline std::string case_label(std::uint64_t seed, int index) {
  std::ostringstream os;
  os << "seed " << seed << ", case " << index;
  return os.str();
}

}  // namespace plshoot::testing
