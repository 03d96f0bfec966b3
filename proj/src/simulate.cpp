#include "pepkit/simulate.hpp"

#include <algorithm>

#include "pepkit/error.hpp"

namespace pepkit {

std::string to_string(CriterionKind k) {
  switch (k) {
    case CriterionKind::kFinalObjective: return "obj";
    case CriterionKind::kFinalGradNormSq: return "grad";
    case CriterionKind::kFinalDistanceSq: return "dist";
    case CriterionKind::kMinGradNormSq: return "mingrad";
    case CriterionKind::kLinear: return "linear";
  }
  return "unknown";
}

CriterionKind criterion_from_string(const std::string& s) {
  if (s == "obj") return CriterionKind::kFinalObjective;
  if (s == "grad") return CriterionKind::kFinalGradNormSq;
  if (s == "dist") return CriterionKind::kFinalDistanceSq;
  if (s == "mingrad") return CriterionKind::kMinGradNormSq;
  if (s == "linear") return CriterionKind::kLinear;
  throw InvalidArgument("unknown criterion '" + s + "'");
}

Vector selector_u(int N, int i) {
  Vector u = Vector::Zero(N + 2);
  if (i != kStar) u(i) = 1.0;
  return u;
}

Vector selector_h(const StepMatrix& H, double L, int i) {
  const int N = H.N();
  Vector h = Vector::Zero(N + 2);
  if (i == kStar) return h;
  for (int k = 0; k < i; ++k) h(k) = -H(i, k) / L;
  h(N + 1) = 1.0;
  return h;
}

PerformanceCriterion PerformanceCriterion::make(CriterionKind kind, const StepMatrix& H,
                                                double L) {
  const int N = H.N();
  PerformanceCriterion c;
  c.kind = kind;
  c.b = Vector::Zero(N + 1);
  c.C = Matrix::Zero(N + 2, N + 2);
  switch (kind) {
    case CriterionKind::kFinalObjective: c.b(N) = 1.0; break;
    case CriterionKind::kFinalGradNormSq: {
      const Vector u = selector_u(N, N);
      c.C = u * u.transpose();
      break;
    }
    case CriterionKind::kFinalDistanceSq: {
      const Vector h = selector_h(H, L, N);
      c.C = h * h.transpose();
      break;
    }
    case CriterionKind::kMinGradNormSq: break;
    case CriterionKind::kLinear:
      throw InvalidArgument("use PerformanceCriterion::linear for a linear criterion");
  }
  return c;
}

PerformanceCriterion PerformanceCriterion::linear(Vector b, Matrix C) {
  if (C.rows() != C.cols() || C.rows() != b.size() + 1)
    throw InvalidArgument("linear criterion needs b in R^{N+1} and C in S^{N+2}");
  PerformanceCriterion c;
  c.kind = CriterionKind::kLinear;
  c.b = std::move(b);
  c.C = 0.5 * (C + C.transpose());
  return c;
}

Trajectory simulate(const StepMatrix& H, const Oracle& fn, const Vector& x0, double L) {
  if (!(L > 0.0)) throw InvalidArgument("L must be positive");
  Trajectory t;
  const int N = H.N();
  for (int i = 0; i <= N; ++i) {
    Vector x = x0;
    for (int k = 0; k < i; ++k) x -= (H(i, k) / L) * t.g[k];
    FunctionValue v = fn(x);
    if (v.gradient.size() != x.size())
      throw InvalidArgument("oracle returned a gradient of the wrong dimension");
    t.x.push_back(std::move(x));
    t.g.push_back(std::move(v.gradient));
    t.f.push_back(v.value);
  }
  return t;
}

double evaluate_criterion(const Trajectory& t, const PerformanceCriterion& crit,
                          const Vector& x_star, double f_star) {
  const std::size_t N = t.x.size() - 1;
  switch (crit.kind) {
    case CriterionKind::kFinalObjective: return t.f[N] - f_star;
    case CriterionKind::kFinalGradNormSq: return t.g[N].squaredNorm();
    case CriterionKind::kFinalDistanceSq: return (t.x[N] - x_star).squaredNorm();
    case CriterionKind::kMinGradNormSq: {
      double m = t.g[0].squaredNorm();
      for (const auto& g : t.g) m = std::min(m, g.squaredNorm());
      return m;
    }
    case CriterionKind::kLinear: {
      const int d = static_cast<int>(x_star.size());
      Matrix P(d, N + 2);
      for (std::size_t i = 0; i <= N; ++i) P.col(i) = t.g[i];
      P.col(N + 1) = t.x[0] - x_star;
      const Matrix G = P.transpose() * P;
      double v = (crit.C.array() * G.array()).sum();
      for (std::size_t i = 0; i <= N; ++i) v += crit.b(i) * (t.f[i] - f_star);
      return v;
    }
  }
  return 0.0;
}

}  // namespace pepkit
