#pragma once

#include <vector>

#include "pepkit/data_set.hpp"
#include "pepkit/function_class.hpp"

namespace pepkit {

inline constexpr double kDefaultInterpolationTol = 1e-9;

struct PairViolation {
  std::size_t i = 0;
  std::size_t j = 0;
  double slack = 0.0;
};

struct InterpolabilityReport {
  bool interpolable = true;
  double min_slack = 0.0;  // over all ordered pairs, unscaled
  std::vector<PairViolation> violations;
};

// Left minus right side of the F_{mu,L} interpolation inequality for the
// ordered pair (i, j). Nonnegative when the inequality holds.
double interpolation_slack(const DataTriple& ti, const DataTriple& tj,
                           const FunctionClass& cls);

// Convex (F_{0,inf}) inequality f_i >= f_j + g_j'(x_i - x_j), as slack.
double convex_slack(const DataTriple& ti, const DataTriple& tj);

// Checks every ordered pair i != j. A pair fails when its slack is below
// -tol * max(1, |f_i|, |f_j|, |g_i|^2/L, |g_j|^2/L).
InterpolabilityReport check_interpolable(
    const DataSet& set, const FunctionClass& cls,
    double tol = kDefaultInterpolationTol);

// (x, g, f) -> (x, g - mu x, f - mu/2 |x|^2). mu may be negative.
DataSet curvature_subtract(const DataSet& set, double mu);

// (x, g, f) -> (g, x, x'g - f).
DataSet conjugate_transform(const DataSet& set);

// Maps an F_{mu,L} data set (finite L) to a set that is convex-interpolable
// exactly when the input is F_{mu,L}-interpolable: subtract mu, conjugate,
// subtract 1/(L - mu), conjugate.
DataSet to_convex_form(const DataSet& set, const FunctionClass& cls);

// Discretized textbook conditions, kept only to show they are too weak.
// (C1f): convexity inequalities plus |g_i - g_j| <= L |x_i - x_j|.
bool naive_conditions_c1f(const DataSet& set, double L, double tol = 1e-12);
// (C2f): convexity inequalities plus the quadratic upper bound.
bool naive_conditions_c2f(const DataSet& set, double L, double tol = 1e-12);

// (g_i - g_j)'(x_i - x_j) >= (|g_i - g_j|^2 / L + mu |x_i - x_j|^2) / (1 + mu/L),
// as slack; implied by the two inequalities of a pair.
double two_cycle_slack(const DataTriple& ti, const DataTriple& tj,
                       const FunctionClass& cls);

}  // namespace pepkit
