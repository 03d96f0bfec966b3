#include "pepkit/interpolation.hpp"

#include <algorithm>
#include <cmath>

namespace pepkit {

double convex_slack(const DataTriple& ti, const DataTriple& tj) {
  return ti.f - tj.f - tj.g.dot(ti.x - tj.x);
}

double interpolation_slack(const DataTriple& ti, const DataTriple& tj,
                           const FunctionClass& cls) {
  const double mu = cls.mu();
  const double L = cls.L();
  const double lhs = convex_slack(ti, tj);
  const Vector dx = ti.x - tj.x;
  if (!cls.smooth()) return lhs - 0.5 * mu * dx.squaredNorm();
  const Vector dg = ti.g - tj.g;
  if (mu == 0.0) return lhs - dg.squaredNorm() / (2.0 * L);
  // (g_j - g_i)'(x_j - x_i) = dg'dx
  const double rhs = (dg.squaredNorm() / L + mu * dx.squaredNorm() -
                      2.0 * mu / L * dg.dot(dx)) /
                     (2.0 * (1.0 - mu / L));
  return lhs - rhs;
}

namespace {

double pair_scale(const DataTriple& ti, const DataTriple& tj, const FunctionClass& cls) {
  double s = std::max({1.0, std::abs(ti.f), std::abs(tj.f)});
  if (cls.smooth())
    s = std::max({s, ti.g.squaredNorm() / cls.L(), tj.g.squaredNorm() / cls.L()});
  return s;
}

}  // namespace

InterpolabilityReport check_interpolable(const DataSet& set, const FunctionClass& cls,
                                         double tol) {
  if (tol < 0.0) throw InvalidArgument("tolerance must be nonnegative");
  InterpolabilityReport report;
  report.min_slack = kInfinity;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (i == j) continue;
      const double s = interpolation_slack(set[i], set[j], cls);
      report.min_slack = std::min(report.min_slack, s);
      if (!(s >= -tol * pair_scale(set[i], set[j], cls)))
        report.violations.push_back({i, j, s});
    }
  }
  if (set.size() < 2) report.min_slack = 0.0;
  report.interpolable = report.violations.empty();
  return report;
}

DataSet curvature_subtract(const DataSet& set, double mu) {
  DataSet out(set.dimension());
  for (const auto& t : set)
    out.add({t.id, t.x, t.g - mu * t.x, t.f - 0.5 * mu * t.x.squaredNorm()});
  return out;
}

DataSet conjugate_transform(const DataSet& set) {
  DataSet out(set.dimension());
  for (const auto& t : set) out.add({t.id, t.g, t.x, t.x.dot(t.g) - t.f});
  return out;
}

DataSet to_convex_form(const DataSet& set, const FunctionClass& cls) {
  if (!cls.smooth()) return curvature_subtract(set, cls.mu());
  const DataSet b = curvature_subtract(set, cls.mu());
  const DataSet c = conjugate_transform(b);
  const DataSet d = curvature_subtract(c, 1.0 / (cls.L() - cls.mu()));
  return conjugate_transform(d);
}

bool naive_conditions_c1f(const DataSet& set, double L, double tol) {
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (i == j) continue;
      if (convex_slack(set[i], set[j]) < -tol) return false;
      if ((set[i].g - set[j].g).norm() > L * (set[i].x - set[j].x).norm() + tol)
        return false;
    }
  return true;
}

bool naive_conditions_c2f(const DataSet& set, double L, double tol) {
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (i == j) continue;
      if (convex_slack(set[i], set[j]) < -tol) return false;
      const double upper = 0.5 * L * (set[i].x - set[j].x).squaredNorm();
      if (convex_slack(set[i], set[j]) > upper + tol) return false;
    }
  return true;
}

double two_cycle_slack(const DataTriple& ti, const DataTriple& tj,
                       const FunctionClass& cls) {
  const Vector dx = ti.x - tj.x;
  const Vector dg = ti.g - tj.g;
  const double inv_L = cls.smooth() ? 1.0 / cls.L() : 0.0;
  return dg.dot(dx) -
         (inv_L * dg.squaredNorm() + cls.mu() * dx.squaredNorm()) / (1.0 + cls.kappa());
}

}  // namespace pepkit
