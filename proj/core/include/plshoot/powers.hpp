#pragma once

#include <cmath>

#include "plshoot/error.hpp"

namespace plshoot {

/// Signed power sign(s)|s|^e, with 0 mapped to 0 for every e > 0.
inline double signed_pow(double s, double e) {
  if (s == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(s), e), s);
}

/// phi_p(s) = |s|^{p-2} s.
inline double phi(double s, double p) { return signed_pow(s, p - 1.0); }

/// Phi_p(s) = |s|^p / p, the primitive of phi_p vanishing at 0.
inline double Phi(double s, double p) { return std::pow(std::abs(s), p) / p; }

/// A p-Laplacian exponent together with its Hoelder conjugate.
class PExponent {
 public:
  explicit PExponent(double p) : p_(p) {
    if (!std::isfinite(p) || !(p > 1.0)) {
      throw DomainError("exponent p must be finite and > 1");
    }
    q_ = p / (p - 1.0);
  }

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

 private:
  double p_;
  double q_ = 0.0;
};

}  // namespace plshoot
