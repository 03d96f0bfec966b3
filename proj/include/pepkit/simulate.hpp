#pragma once

#include <functional>
#include <vector>

#include "pepkit/criterion.hpp"
#include "pepkit/data_set.hpp"
#include "pepkit/step_matrix.hpp"

namespace pepkit {

using Oracle = std::function<FunctionValue(const Vector&)>;

struct Trajectory {
  std::vector<Vector> x;  // x_0..x_N
  std::vector<Vector> g;
  std::vector<double> f;
};

// Runs x_i = x_0 - sum_k h_{i,k}/L g_k, evaluating the oracle at every iterate.
Trajectory simulate(const StepMatrix& H, const Oracle& fn, const Vector& x0, double L);

// Criterion value of a trajectory relative to the optimum (x_star, f_star).
double evaluate_criterion(const Trajectory& t, const PerformanceCriterion& crit,
                          const Vector& x_star, double f_star);

}  // namespace pepkit
