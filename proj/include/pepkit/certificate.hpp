#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pepkit/pep.hpp"

namespace pepkit {

struct PairMultiplier {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

// Multipliers proving criterion <= tau R^2 through
//   S = tau A_R - C + sum lambda_ij A_ij (- sum nu_i e_i e_i') >= 0.
struct DualCertificate {
  std::vector<PairMultiplier> lambda;  // aligned with the problem's constraints
  double tau = 0.0;
  Vector nu;  // MinGradNormSq only
  Matrix S;
  double bound = 0.0;
  bool adjacent_support = false;  // lambda vanishes off (i,i+1), (*,i)
  bool from_restricted = false;   // taken from the adjacent-pair program

  nlohmann::json to_json() const;
};

struct VerificationReport {
  double min_lambda = 0.0;
  double tau = 0.0;
  double min_nu = 0.0;
  double min_eig_S = 0.0;
  double stationarity = 0.0;     // f-space (and t) residual, infinity norm
  double complementarity = 0.0;  // Tr(S G) when a primal point is given
  double primal_value = 0.0;
  double gap = 0.0;              // bound - primal value
  double bound = 0.0;
  bool valid = false;
  std::string worst;  // description of the largest violation

  nlohmann::json to_json() const;
};

// S rebuilt from the multipliers.
Matrix slack_matrix(const PepProblem& prob, const std::vector<PairMultiplier>& lambda, double tau,
                    const Vector& nu);

// Checks sign constraints, stationarity and S >= 0 with tolerance tol
// relative to max(1, bound). With a primal solution also reports Tr(S G)
// and the gap.
VerificationReport verify(const DualCertificate& cert, const PepProblem& prob, double tol = 1e-6,
                          const PepSolution* primal = nullptr);

// Certificate from a solved problem; S recomputed from the multipliers.
// Throws SolverError with the worst residual when verification fails.
DualCertificate extract(const PepProblem& prob, const PepSolution& sol, double tol = 1e-6);

// Solves the program restricted to adjacent pairs and, when its bound
// matches the full solution's bound within rel_tol, returns that sparser
// certificate expressed over the full constraint list. Falls back to
// extract(prob, full).
DualCertificate preferred_certificate(const PepProblem& prob, const PepSolution& full,
                                      const SolveOptions& options = {}, double rel_tol = 1e-7);

// Human-readable identity: criterion = bound - sum lambda_ij (slack_ij)
// - tau (R^2 - |x_0 - x_*|^2) - Tr(S G). Multipliers below drop_tol are omitted.
std::string render_proof(const DualCertificate& cert, const PepProblem& prob,
                         double drop_tol = 1e-8);

}  // namespace pepkit
