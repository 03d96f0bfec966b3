#pragma once

#include <string>

#include "pepkit/data_set.hpp"
#include "pepkit/step_matrix.hpp"

namespace pepkit {

enum class CriterionKind {
  kFinalObjective,    // f(x_N) - f_*
  kFinalGradNormSq,   // |g_N|^2
  kFinalDistanceSq,   // |x_N - x_*|^2
  kMinGradNormSq,     // min_i |g_i|^2
  kLinear,            // b'f + Tr(C G)
};

std::string to_string(CriterionKind k);
// Accepts obj, grad, dist, mingrad, linear.
CriterionKind criterion_from_string(const std::string& s);

// Coordinates with respect to P = [g_0 ... g_N x_0] (x_* = 0). Index -1
// denotes the optimal point.
inline constexpr int kStar = -1;
Vector selector_u(int N, int i);
Vector selector_h(const StepMatrix& H, double L, int i);

// Linear objective b'f + Tr(C G) over f = (f_0..f_N) and G in S^{N+2}.
// MinGradNormSq carries no b, C: it is handled with an auxiliary variable.
struct PerformanceCriterion {
  CriterionKind kind = CriterionKind::kFinalObjective;
  Vector b;
  Matrix C;

  static PerformanceCriterion make(CriterionKind kind, const StepMatrix& H, double L);
  static PerformanceCriterion linear(Vector b, Matrix C);
};

}  // namespace pepkit
