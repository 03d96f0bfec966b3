#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pepkit/interpolant.hpp"
#include "pepkit/pep.hpp"
#include "pepkit/piecewise_quadratic.hpp"
#include "pepkit/simulate.hpp"

namespace pepkit {

struct Factorization {
  Matrix P;  // r x (N+2), columns [g_0 ... g_N x_0]
  int rank = 0;
  Vector eigenvalues;  // all eigenvalues of G, decreasing
};

// Eigenvalue factorization keeping eigenvalues above rank_tol * lambda_max.
// Each retained eigenvector has its first nonzero entry positive. Throws
// InvalidArgument when G has an eigenvalue below -psd_tol * max(1, lambda_max).
Factorization factorize(const Matrix& G, double rank_tol = 1e-6, double psd_tol = 1e-6);

int numerical_rank(const Matrix& G, double rank_tol = 1e-6);

// Among optimal solutions, one maximizing Tr(G): G is restricted to the
// null space of the dual slack S, and Tr(G) is maximized subject to the
// original constraints and criterion >= value - eps. Optimal faces of PEPs
// are often segments whose endpoints are low-rank; an interior-point method
// returns their relative interior. Returns sol unchanged when S is
// nonsingular or the refinement fails. A more accurate dual
// slack (e.g. from a certificate) may be passed to define the null space.
PepSolution max_trace_solution(const PepProblem& prob, const PepSolution& sol,
                               const SolveOptions& options = {}, const Matrix* S = nullptr);

struct WorstCaseInstance {
  FunctionClass cls{0.0, 1.0};
  int rank = 0;
  Matrix P;
  std::vector<Vector> x;  // x_0..x_N from the selector vectors
  DataSet triples{1};     // ids "0".."N" and "*"
  std::optional<InterpolantFunction> function;
  double sdp_value = 0.0;
  double achieved_value = 0.0;  // simulated on the interpolant
  double min_slack = 0.0;
  Trajectory trajectory;

  nlohmann::json to_json() const;
  std::string trajectory_csv() const;
};

// Triples from the factor, interpolant through them, and the criterion
// re-measured by running the method on the interpolant from x_0. Throws
// SolverError when the triples are not interpolable within interp_tol.
WorstCaseInstance rebuild(const PepProblem& prob, const Factorization& fac, const Vector& f,
                          double sdp_value, double interp_tol = 1e-7);

// Full pipeline: max_trace_solution (null space taken from the preferred
// certificate's S), factorize, rebuild. When truncation at
// rank_tol loses interpolability or value, smaller tolerances are tried.
WorstCaseInstance reconstruct(const PepProblem& prob, const PepSolution& sol,
                              const SolveOptions& options = {}, double rank_tol = 1e-6);

struct Recognized1D {
  Family family = Family::kF1Tau;
  double tau = 0.0;  // +inf for the pure quadratic
  double a = 0.0;
  double b = 0.0;
  double mu = 0.0;
  double L = 1.0;
  double residual = 0.0;

  PiecewiseQuadratic1D function() const { return {mu, L, tau, family}; }
  nlohmann::json to_json() const;
};

// Fits the two-piece model (L/2 x^2 inside |x| < tau, mu/2 x^2 + a|x| + b
// outside) to the triples of a rank-1 instance. Empty when rank != 1 or the
// relative residual exceeds tol.
std::optional<Recognized1D> recognize_1d(const WorstCaseInstance& inst, double tol = 1e-5);

}  // namespace pepkit
