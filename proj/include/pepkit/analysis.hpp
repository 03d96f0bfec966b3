#pragma once

#include <string>
#include <utility>

#include "pepkit/criterion.hpp"
#include "pepkit/piecewise_quadratic.hpp"
#include "pepkit/step_matrix.hpp"

namespace pepkit {

// Conjectured exact worst cases of the gradient method with constant
// normalized step h on F_{mu,L}, kappa = mu/L. Values are for L = R = 1.
// Formulas need kappa*h < 1; pass allow_large_step to evaluate them anyway.
//
// f(x_N) - f_* <= 1/2 max(kappa/((kappa-1) + (1-kappa h)^{-2N}), (1-h)^{2N})
double conj_gm_obj(int N, double h, double kappa, bool allow_large_step = false);
// |g_N| <= max(kappa/((kappa-1) + (1-kappa h)^{-N}), |1-h|^N)
double conj_gm_grad(int N, double h, double kappa, bool allow_large_step = false);

// Radius of the inner quadratic piece of the worst-case function f_{1,tau}.
double worst_tau(int N, double h, double kappa, CriterionKind kind, double R = 1.0,
                 bool allow_large_step = false);

struct FastMethodConjecture {
  double value = 0.0;        // from the coefficient sums
  double closed_form = 0.0;  // OGM only, NaN otherwise
};

// f(y_N) - f_* (primary) or f(x_N) - f_* (secondary) for fgm / ogm, L = R = 1.
FastMethodConjecture conj_fgm_ogm(int N, const std::string& method, Sequence sequence);

// Step size minimizing the conjectured worst case (kind obj or grad).
double hopt(int N, double kappa, CriterionKind kind = CriterionKind::kFinalObjective);
std::pair<double, double> hopt_bounds(int N, double kappa,
                                      CriterionKind kind = CriterionKind::kFinalObjective);

struct ApproxStep {
  double value = 0.0;
  bool fallback = false;  // kappa = 0: midpoint of hopt_bounds
};
ApproxStep approx_hopt(int N, double kappa, CriterionKind kind = CriterionKind::kFinalObjective);

// Classical analytic guarantees for L = R = 1:
//   gm   obj  h=1, kappa=0          1/(2(N+1))
//   gm   obj  h=2/(1+kappa)         1/2 ((1-kappa)/(1+kappa))^{2N}
//   gm   grad/dist h=2/(1+kappa)    ((1-kappa)/(1+kappa))^N
//   fgm  obj  primary / secondary   2/(N+1)^2, 2/(N+2)^2
//   fgm  grad (last iterate)        2/(N+1)
//   ogm  obj  primary / secondary   1/((N+1)^2+2), 1/((N+1)(N+1+sqrt 2))
//   mfgm mingrad                    8/N^{3/2}
// Gradient and distance entries are norms, not squares. Unsupported
// combinations throw InvalidArgument.
double baseline(const std::string& method, CriterionKind kind, int N, double h = 1.0,
                double kappa = 0.0, Sequence sequence = Sequence::kSecondary);

struct FamilyParams {
  int N = 1;
  double h = 1.0;
  double mu = 0.0;
  double L = 1.0;
  double R = 1.0;
  CriterionKind kind = CriterionKind::kFinalObjective;
};

// f1 (mu = 0), f2 = L/2 x^2 or f1tau with the conjectured tau.
PiecewiseQuadratic1D family_builder(Family family, const FamilyParams& p);

}  // namespace pepkit
