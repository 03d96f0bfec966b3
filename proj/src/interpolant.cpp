#include "pepkit/interpolant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pepkit/error.hpp"

namespace pepkit {

namespace {

// Dense primal-dual interior point for
//   minimize c/2 |s|^2 - x's + t   subject to  ell_i's + beta_i <= t,
// followed by an active-set polish. Returns s.
Vector solve_envelope_qp(const Matrix& ell, const Vector& beta, double c, const Vector& x) {
  const int n = static_cast<int>(ell.rows());
  const int d = static_cast<int>(ell.cols());
  const int nz = d + 1;
  // Constraint rows a_i = (ell_i, -1), a_i'z <= -beta_i.
  Matrix A(n, nz);
  A.leftCols(d) = ell;
  A.col(d).setConstant(-1.0);
  const Vector b = -beta;
  Vector q(nz);
  q.head(d) = -x;
  q(d) = 1.0;

  Vector z = Vector::Zero(nz);
  z(d) = beta.maxCoeff() + 1.0;
  Vector w = (b - A * z).cwiseMax(1.0);
  Vector lam = Vector::Constant(n, 1.0 / n);
  const double scale = 1.0 + x.lpNorm<Eigen::Infinity>() + beta.lpNorm<Eigen::Infinity>() +
                       ell.lpNorm<Eigen::Infinity>();

  auto qz = [&](const Vector& v) {
    Vector r = Vector::Zero(nz);
    r.head(d) = c * v.head(d);
    return r;
  };
  auto max_step = [](const Vector& v, const Vector& dv) {
    double a = 1.0;
    for (int i = 0; i < v.size(); ++i)
      if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
    return a;
  };

  // The Newton system degrades once lam/w spans too many magnitudes, so the
  // iterate with the smallest residual is kept.
  bool converged = false;
  double best = kInfinity;
  Vector zb = z, wb = w, lb = lam;
  for (int iter = 0; iter < 100; ++iter) {
    const Vector rd = qz(z) + q + A.transpose() * lam;
    const Vector rp = A * z + w - b;
    const double mu = lam.dot(w) / n;
    const double merit =
        std::max({rd.lpNorm<Eigen::Infinity>(), rp.lpNorm<Eigen::Infinity>(), mu});
    if (merit < best) {
      best = merit;
      zb = z;
      wb = w;
      lb = lam;
    } else if (merit > 1e3 * best) {
      break;
    }
    if (rd.lpNorm<Eigen::Infinity>() < 1e-13 * scale &&
        rp.lpNorm<Eigen::Infinity>() < 1e-13 * scale && mu < 1e-14 * scale) {
      converged = true;
      break;
    }
    if (mu < 1e-20 * scale) break;
    Matrix K = A.transpose() * (lam.cwiseQuotient(w)).asDiagonal() * A;
    K.diagonal().head(d).array() += c;
    Eigen::LDLT<Matrix> ldlt(K);

    auto direction = [&](const Vector& rc, Vector& dz, Vector& dw, Vector& dl) {
      const Vector tmp = (-rc + lam.cwiseProduct(rp)).cwiseQuotient(w);
      dz = ldlt.solve(-rd - A.transpose() * tmp);
      dw = -rp - A * dz;
      dl = (-rc - lam.cwiseProduct(dw)).cwiseQuotient(w);
    };
    Vector dz, dw, dl;
    direction(lam.cwiseProduct(w), dz, dw, dl);
    const double ap = max_step(w, dw), ad = max_step(lam, dl);
    const double mu_aff = (w + ap * dw).dot(lam + ad * dl) / n;
    const double sigma = std::pow(mu_aff / mu, 3);
    const Vector rc =
        lam.cwiseProduct(w) + dw.cwiseProduct(dl) - Vector::Constant(n, sigma * mu);
    direction(rc, dz, dw, dl);
    const double step = std::min(1.0, 0.99 * std::min(max_step(w, dw), max_step(lam, dl)));
    z += step * dz;
    w += step * dw;
    lam += step * dl;
  }
  z = zb;
  w = wb;
  lam = lb;
  if (!z.allFinite()) throw SolverError("hull program diverged");

  if (!converged) {
    const Vector rd = qz(z) + q + A.transpose() * lam;
    if (rd.lpNorm<Eigen::Infinity>() > 1e-8 * scale)
      throw SolverError("hull program did not converge");
  }

  // Polish on the active set: c s - x + sum lam_i ell_i = 0, sum lam_i = 1,
  // ell_i's + beta_i = t on active i. With more than d + 1 active pieces the
  // multipliers are not unique but s is, so candidates are compared through
  // the strongly convex objective F(s) = c/2 |s|^2 - x's + max_i(ell_i's + beta_i).
  auto objective = [&](const Vector& s) {
    return 0.5 * c * s.squaredNorm() - x.dot(s) + (ell * s + beta).maxCoeff();
  };
  Vector s_best = z.head(d);
  std::vector<int> active;
  for (int i = 0; i < n; ++i)
    if (lam(i) > w(i)) active.push_back(i);
  const int na = static_cast<int>(active.size());
  if (na > 0) {
    Matrix K = Matrix::Zero(nz + na, nz + na);
    Vector rhs = Vector::Zero(nz + na);
    K.topLeftCorner(d, d).diagonal().setConstant(c);
    rhs.head(d) = x;
    rhs(d) = 1.0;
    for (int a = 0; a < na; ++a) {
      const int i = active[a];
      K.block(0, nz + a, d, 1) = ell.row(i).transpose();
      K(d, nz + a) = 1.0;
      K.block(nz + a, 0, 1, d) = ell.row(i);
      K(nz + a, d) = -1.0;
      rhs(nz + a) = -beta(i);
    }
    const Vector sol = K.completeOrthogonalDecomposition().solve(rhs);
    if (sol.allFinite()) {
      const Vector sp = sol.head(d);
      if (objective(sp) <= objective(s_best)) s_best = sp;
    }
  }
  return s_best;
}

}  // namespace

InterpolantFunction::InterpolantFunction(const FunctionClass& cls, DataSet pieces)
    : cls_(cls), pieces_(std::move(pieces)) {
  const int n = static_cast<int>(pieces_.size());
  const int d = pieces_.dimension();
  if (n == 0) throw InvalidArgument("an interpolant needs at least one piece");
  ell_.resize(n, d);
  beta_.resize(n);
  if (!cls_.smooth()) {
    strategy_ = Strategy::kPiecewiseLinear;
    for (int i = 0; i < n; ++i) {
      const auto& p = pieces_[i];
      ell_.row(i) = p.g.transpose();
      beta_(i) = p.f - p.g.dot(p.x);
    }
    return;
  }
  c_ = 1.0 / (cls_.L() - cls_.mu());
  for (int i = 0; i < n; ++i) {
    const auto& p = pieces_[i];
    ell_.row(i) = (p.g - c_ * p.x).transpose();
    beta_(i) = p.f - p.g.dot(p.x) + 0.5 * c_ * p.x.squaredNorm();
  }
  if (d != 1) {
    strategy_ = Strategy::kHullProgram;
    return;
  }
  strategy_ = Strategy::kExact1D;
  // Upper envelope of lines ell_i s + beta_i.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (ell_(a, 0) != ell_(b, 0)) return ell_(a, 0) < ell_(b, 0);
    return beta_(a) > beta_(b);
  });
  auto cross = [&](int a, int b) {
    return (beta_(a) - beta_(b)) / (ell_(b, 0) - ell_(a, 0));
  };
  for (int idx : order) {
    if (!envelope_.empty() && ell_(envelope_.back(), 0) == ell_(idx, 0)) continue;
    while (!envelope_.empty()) {
      const int last = envelope_.back();
      const double s = cross(last, idx);
      if (!breaks_.empty() && s <= breaks_.back()) {
        envelope_.pop_back();
        breaks_.pop_back();
        continue;
      }
      breaks_.push_back(s);
      break;
    }
    envelope_.push_back(idx);
  }
}

InterpolantFunction InterpolantFunction::build(const DataSet& set, const FunctionClass& cls,
                                               double tol) {
  if (set.empty()) throw InvalidArgument("cannot interpolate an empty data set");
  const auto report = check_interpolable(set, cls, tol);
  if (!report.interpolable)
    throw InvalidArgument("data set is not interpolable in " + cls.to_string() + " (" +
                          std::to_string(report.violations.size()) + " violated pairs)");
  const DataSet shifted = curvature_subtract(set, cls.mu());
  if (!cls.smooth()) return InterpolantFunction(cls, shifted);
  return InterpolantFunction(cls, conjugate_transform(shifted));
}

InterpolantFunction InterpolantFunction::from_pieces(const FunctionClass& cls,
                                                     const DataSet& pieces) {
  return InterpolantFunction(cls, pieces);
}

std::string InterpolantFunction::strategy_name() const {
  switch (strategy_) {
    case Strategy::kExact1D: return "exact-1d";
    case Strategy::kHullProgram: return "hull-program";
    case Strategy::kPiecewiseLinear: return "piecewise-linear";
  }
  return "unknown";
}

Vector InterpolantFunction::solve_1d(double x) const {
  const int m = static_cast<int>(envelope_.size());
  for (int k = 0; k < m; ++k) {
    const double sk = (x - ell_(envelope_[k], 0)) / c_;
    if (k > 0 && sk < breaks_[k - 1]) return Vector::Constant(1, breaks_[k - 1]);
    if (k == m - 1 || sk <= breaks_[k]) return Vector::Constant(1, sk);
  }
  return Vector::Constant(1, 0.0);  // unreachable
}

Vector InterpolantFunction::solve_hull_program(const Vector& x) const {
  return solve_envelope_qp(ell_, beta_, c_, x);
}

Vector InterpolantFunction::argmax_conjugate(const Vector& x) const {
  return strategy_ == Strategy::kExact1D ? solve_1d(x(0)) : solve_hull_program(x);
}

FunctionValue InterpolantFunction::evaluate(const Vector& x) const {
  if (x.size() != dimension())
    throw InvalidArgument("evaluation point has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(dimension()));
  const double quad = 0.5 * cls_.mu() * x.squaredNorm();
  if (strategy_ == Strategy::kPiecewiseLinear) {
    const Vector vals = ell_ * x + beta_;
    Eigen::Index k = 0;
    const double top = vals.maxCoeff(&k);  // first maximizer
    return {top + quad, ell_.row(k).transpose() + cls_.mu() * x};
  }
  const Vector s = argmax_conjugate(x);
  const double envelope = (ell_ * s + beta_).maxCoeff();
  const double value = x.dot(s) - 0.5 * c_ * s.squaredNorm() - envelope + quad;
  return {value, s + cls_.mu() * x};
}

}  // namespace pepkit
