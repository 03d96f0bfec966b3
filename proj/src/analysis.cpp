#include "pepkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pepkit/error.hpp"
#include "pepkit/function_class.hpp"

namespace pepkit {

namespace {

void check_common(int N, double kappa) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  if (!(kappa >= 0.0 && kappa < 1.0)) throw InvalidArgument("kappa must lie in [0, 1)");
}

void check_step(double h, double kappa, bool allow) {
  if (!std::isfinite(h)) throw InvalidArgument("step size must be finite");
  if (!allow && kappa * h >= 1.0)
    throw InvalidArgument("kappa*h >= 1: conjecture formula not defined in this range");
}

// kappa / ((kappa - 1) + (1 - kappa h)^{-M}); the kappa -> 0 limit is 1/(1 + M h).
double affine_branch(int M, double h, double kappa) {
  if (kappa == 0.0) return 1.0 / (1.0 + M * h);
  const double base = 1.0 - kappa * h;
  double den;
  if (base > 0.0)
    den = kappa + std::expm1(-M * std::log1p(-kappa * h));
  else
    den = (kappa - 1.0) + std::pow(base, -M);
  return kappa / den;
}

double quad_branch(int M, double h) { return std::pow(std::abs(1.0 - h), M); }

int exponent(int N, CriterionKind kind) {
  switch (kind) {
    case CriterionKind::kFinalObjective: return 2 * N;
    case CriterionKind::kFinalGradNormSq: return N;
    default: throw InvalidArgument("only obj and grad criteria have a step size conjecture");
  }
}

double row_sum(const StepMatrix& H, int i) {
  double s = 0.0;
  for (int k = 0; k < i; ++k) s += H(i, k);
  return s;
}

}  // namespace

double conj_gm_obj(int N, double h, double kappa, bool allow_large_step) {
  check_common(N, kappa);
  check_step(h, kappa, allow_large_step);
  return 0.5 * std::max(affine_branch(2 * N, h, kappa), quad_branch(2 * N, h));
}

double conj_gm_grad(int N, double h, double kappa, bool allow_large_step) {
  check_common(N, kappa);
  check_step(h, kappa, allow_large_step);
  return std::max(affine_branch(N, h, kappa), quad_branch(N, h));
}

double worst_tau(int N, double h, double kappa, CriterionKind kind, double R,
                 bool allow_large_step) {
  check_common(N, kappa);
  check_step(h, kappa, allow_large_step);
  return R * affine_branch(exponent(N, kind), h, kappa);
}

FastMethodConjecture conj_fgm_ogm(int N, const std::string& method, Sequence sequence) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  StepMatrix H;
  if (method == "fgm")
    H = fgm(N, Sequence::kSecondary);
  else if (method == "ogm")
    H = ogm(N, Sequence::kSecondary);
  else
    throw InvalidArgument("conjecture only covers fgm and ogm, got '" + method + "'");

  FastMethodConjecture out;
  out.closed_form = std::numeric_limits<double>::quiet_NaN();
  if (sequence == Sequence::kPrimary) {
    const double s = N >= 2 ? row_sum(H, N - 1) : 0.0;
    out.value = 0.5 / (2.0 * s + 3.0);
    if (method == "ogm") {
      const double th = fgm_theta(N)[N - 1];
      out.closed_form = 1.0 / (4.0 * th * th + 2.0);
    }
  } else {
    out.value = 0.5 / (2.0 * row_sum(H, N) + 1.0);
    if (method == "ogm") {
      const double th = ogm_theta(N)[N];
      out.closed_form = 1.0 / (2.0 * th * th);
    }
  }
  return out;
}

double hopt(int N, double kappa, CriterionKind kind) {
  check_common(N, kappa);
  const int M = exponent(N, kind);
  auto gap = [&](double h) { return affine_branch(M, h, kappa) - quad_branch(M, h); };
  double lo = 1.0;
  double hi = std::min(2.0 - 1e-12, 2.0 / (1.0 + kappa));
  double glo = gap(lo), ghi = gap(hi);
  if (!(glo > 0.0) || !(ghi < 0.0))
    throw SolverError("step size bisection: bracket does not change sign");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = gap(mid);
    if (g > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> hopt_bounds(int N, double kappa, CriterionKind kind) {
  check_common(N, kappa);
  const int M = exponent(N, kind);
  if (kappa == 0.0) {
    // obj: 1+(1+4N)^{-1/2N} .. 1+(1+2N)^{-1/2N}; grad: 1+(1+2N)^{-1/N} .. 1+(1+N)^{-1/N}
    const double p = -1.0 / M;
    return {1.0 + std::pow(1.0 + 2.0 * M, p), 1.0 + std::pow(1.0 + M, p)};
  }
  const double r = (1.0 + kappa) / (1.0 - kappa);
  const double lower_base = (kappa - 1.0) / kappa + std::pow(r, M) / kappa;
  const double upper_base = (kappa - 1.0) / kappa + std::pow(1.0 - kappa, -M) / kappa;
  const double lower = 1.0 + std::pow(lower_base, -1.0 / M);
  const double upper = std::min(1.0 + std::pow(upper_base, -1.0 / M), 2.0 / (1.0 + kappa));
  return {lower, upper};
}

ApproxStep approx_hopt(int N, double kappa, CriterionKind kind) {
  check_common(N, kappa);
  const int M = exponent(N, kind);
  if (kappa == 0.0) {
    const auto [lo, hi] = hopt_bounds(N, kappa, kind);
    return {0.5 * (lo + hi), true};
  }
  const double e = 1.0 / M;
  return {(1.0 + std::pow(kappa, e)) / (1.0 + std::pow(kappa, 1.0 + e)), false};
}

double baseline(const std::string& method, CriterionKind kind, int N, double h, double kappa,
                Sequence sequence) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  if (!(kappa >= 0.0 && kappa < 1.0)) throw InvalidArgument("kappa must lie in [0, 1)");
  const double q = (1.0 - kappa) / (1.0 + kappa);
  if (method == "gm") {
    if (kind == CriterionKind::kFinalObjective) {
      if (kappa == 0.0 && h == 1.0) return 0.5 / (N + 1.0);
      if (std::abs(h - 2.0 / (1.0 + kappa)) < 1e-12) return 0.5 * std::pow(q, 2 * N);
      throw InvalidArgument("gm objective baseline needs h = 1 with kappa = 0, or h = 2/(1+kappa)");
    }
    if (kind == CriterionKind::kFinalGradNormSq || kind == CriterionKind::kFinalDistanceSq) {
      if (std::abs(h - 2.0 / (1.0 + kappa)) < 1e-12) return std::pow(q, N);
      throw InvalidArgument("gm gradient/distance baseline needs h = 2/(1+kappa)");
    }
  } else if (method == "fgm" && kappa == 0.0) {
    if (kind == CriterionKind::kFinalObjective)
      return sequence == Sequence::kPrimary ? 2.0 / ((N + 1.0) * (N + 1.0))
                                            : 2.0 / ((N + 2.0) * (N + 2.0));
    if (kind == CriterionKind::kFinalGradNormSq) return 2.0 / (N + 1.0);
  } else if (method == "ogm" && kappa == 0.0 && kind == CriterionKind::kFinalObjective) {
    return sequence == Sequence::kPrimary ? 1.0 / ((N + 1.0) * (N + 1.0) + 2.0)
                                          : 1.0 / ((N + 1.0) * (N + 1.0 + std::sqrt(2.0)));
  } else if (method == "mfgm" && kappa == 0.0 && kind == CriterionKind::kMinGradNormSq) {
    return 8.0 / std::pow(static_cast<double>(N), 1.5);
  }
  throw InvalidArgument("no analytic baseline for method '" + method + "' with criterion " +
                        to_string(kind));
}

PiecewiseQuadratic1D family_builder(Family family, const FamilyParams& p) {
  const FunctionClass cls(p.mu, p.L);
  if (!cls.smooth()) throw InvalidArgument("worst-case families need a finite L");
  if (family == Family::kF2) return PiecewiseQuadratic1D(p.mu, p.L, kInfinity, Family::kF2);
  if (family == Family::kF1 && p.mu != 0.0) throw InvalidArgument("f1 is defined for mu = 0");
  const double tau = worst_tau(p.N, p.h, cls.kappa(), p.kind, p.R);
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw InvalidArgument("conjectured tau is not a nonnegative number (" + std::to_string(tau) +
                          ")");
  return PiecewiseQuadratic1D(p.mu, p.L, tau, family);
}

}  // namespace pepkit
