#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "pepkit/error.hpp"

namespace pepkit {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// The class F_{mu,L} of mu-strongly convex functions with L-Lipschitz
// gradient. L may be +infinity (no smoothness).
class FunctionClass {
 public:
  FunctionClass(double mu, double L) : mu_(mu), L_(L) {
    if (!(mu >= 0.0) || !std::isfinite(mu))
      throw InvalidArgument("mu must be finite and nonnegative");
    if (!(L > mu)) throw InvalidArgument("L must exceed mu");
  }

  double mu() const { return mu_; }
  double L() const { return L_; }
  bool smooth() const { return std::isfinite(L_); }
  double kappa() const { return smooth() ? mu_ / L_ : 0.0; }

  std::string to_string() const {
    return "F(mu=" + std::to_string(mu_) +
           ", L=" + (smooth() ? std::to_string(L_) : std::string("inf")) + ")";
  }

 private:
  double mu_;
  double L_;
};

}  // namespace pepkit
