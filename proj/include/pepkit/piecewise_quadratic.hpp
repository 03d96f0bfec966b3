#pragma once

#include <string>

#include "pepkit/data_set.hpp"

namespace pepkit {

enum class Family { kF1, kF2, kF1Tau };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

// f(x) = mu/2 x^2 + a |x| + b for |x| >= tau, L/2 x^2 otherwise, with
// a = (L - mu) tau and b = -(L - mu)/2 tau^2. tau = +inf gives L/2 x^2.
class PiecewiseQuadratic1D {
 public:
  PiecewiseQuadratic1D(double mu, double L, double tau, Family family = Family::kF1Tau);

  double mu() const { return mu_; }
  double L() const { return L_; }
  double tau() const { return tau_; }
  double a() const;
  double b() const;
  Family family() const { return family_; }
  bool pure_quadratic() const;

  double value(double x) const;
  double derivative(double x) const;
  FunctionValue evaluate(const Vector& x) const;

 private:
  double mu_, L_, tau_;
  Family family_;
};

}  // namespace pepkit
