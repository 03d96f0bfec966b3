#include "pepkit/piecewise_quadratic.hpp"

#include <cmath>

#include "pepkit/error.hpp"
#include "pepkit/function_class.hpp"

namespace pepkit {

std::string to_string(Family f) {
  switch (f) {
    case Family::kF1: return "f1";
    case Family::kF2: return "f2";
    case Family::kF1Tau: return "f1tau";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  if (s == "f1") return Family::kF1;
  if (s == "f2") return Family::kF2;
  if (s == "f1tau") return Family::kF1Tau;
  throw InvalidArgument("unknown function family '" + s + "'");
}

PiecewiseQuadratic1D::PiecewiseQuadratic1D(double mu, double L, double tau, Family family)
    : mu_(mu), L_(L), tau_(tau), family_(family) {
  (void)FunctionClass(mu, L);  // validates 0 <= mu < L
  if (!std::isfinite(L)) throw InvalidArgument("piecewise quadratic needs a finite L");
  if (!(tau >= 0.0)) throw InvalidArgument("tau must be nonnegative, got " + std::to_string(tau));
}

bool PiecewiseQuadratic1D::pure_quadratic() const { return std::isinf(tau_); }
double PiecewiseQuadratic1D::a() const { return pure_quadratic() ? 0.0 : (L_ - mu_) * tau_; }
double PiecewiseQuadratic1D::b() const {
  return pure_quadratic() ? 0.0 : -0.5 * (L_ - mu_) * tau_ * tau_;
}

double PiecewiseQuadratic1D::value(double x) const {
  if (std::abs(x) < tau_) return 0.5 * L_ * x * x;
  return 0.5 * mu_ * x * x + a() * std::abs(x) + b();
}

double PiecewiseQuadratic1D::derivative(double x) const {
  if (std::abs(x) < tau_) return L_ * x;
  return mu_ * x + (x >= 0.0 ? a() : -a());
}

FunctionValue PiecewiseQuadratic1D::evaluate(const Vector& x) const {
  if (x.size() != 1) throw InvalidArgument("piecewise quadratic is one-dimensional");
  return {value(x(0)), Vector::Constant(1, derivative(x(0)))};
}

}  // namespace pepkit
