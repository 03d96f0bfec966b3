#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pepkit/conic_program.hpp"
#include "pepkit/criterion.hpp"
#include "pepkit/function_class.hpp"
#include "pepkit/step_matrix.hpp"

namespace pepkit {

// Interpolation inequality between points i and j (kStar for the optimum):
//   f_j - f_i + Tr(G A) <= 0.
struct InterpolationConstraint {
  int i = 0;
  int j = 0;
  Matrix A;
};

// Keeps the ordered pair (i, j) when it returns true.
using PairFilter = std::function<bool(int i, int j)>;

// (i, i+1) and (*, i) pairs only.
bool adjacent_pair(int i, int j);

struct PepProblem {
  FunctionClass cls{0.0, 1.0};
  StepMatrix H;
  double R = 1.0;
  PerformanceCriterion criterion;
  std::vector<InterpolationConstraint> constraints;
  Matrix A_R;
  bool restricted = false;  // built with a pair filter

  int N() const { return H.N(); }
  int order() const { return H.N() + 2; }
  bool min_gradient() const { return criterion.kind == CriterionKind::kMinGradNormSq; }

  nlohmann::json to_json() const;
  static PepProblem from_json(const nlohmann::json& j);
};

// A_ij of the Gram formulation for the class (mu, L), L finite.
Matrix interpolation_matrix(const StepMatrix& H, const FunctionClass& cls, int i, int j);

PepProblem assemble(const FunctionClass& cls, const StepMatrix& H, double R,
                    const PerformanceCriterion& criterion, const PairFilter& filter = {});
PepProblem assemble(const FunctionClass& cls, const StepMatrix& H, double R, CriterionKind kind,
                    const PairFilter& filter = {});

// Rows: one per interpolation constraint (same order), the radius row, then
// t - G_ii <= 0 for MinGradNormSq. Free scalars: f_0..f_N (then t).
ConicProgram to_conic(const PepProblem& prob);

enum class PepStatus { kOptimal, kInfeasible, kUnbounded, kNumericalTrouble };
std::string to_string(PepStatus s);

struct PepSolution {
  PepStatus status = PepStatus::kNumericalTrouble;
  double value = 0.0;       // criterion at (G, f), t for MinGradNormSq
  double dual_value = 0.0;  // bound proved by the multipliers
  Matrix G;
  Vector f;  // f_0..f_N
  double t = 0.0;
  Vector lambda;  // aligned with prob.constraints
  double tau = 0.0;
  Vector nu;  // MinGradNormSq multipliers, one per iterate
  Matrix S;
  double max_violation = 0.0;  // largest constraint excess at (G, f)
  double min_eig_G = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  std::string backend;
  std::string message;

  bool optimal() const { return status == PepStatus::kOptimal; }
};

struct SolveOptions {
  SdpOptions sdp;
  std::string backend;  // empty: PEPKIT_SOLVER or the default
};

PepSolution solve(const PepProblem& prob, const SolveOptions& options = {});

// Criterion value at (G, f[, t]).
double criterion_value(const PepProblem& prob, const Matrix& G, const Vector& f, double t = 0.0);

// Homogeneity: a value computed with L = R = 1 (same kappa) scaled to (L, R).
double rescale(double unit_value, CriterionKind kind, double L, double R);

}  // namespace pepkit
