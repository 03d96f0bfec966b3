#include "pepkit/pep.hpp"

#include <algorithm>
#include <cmath>

#include "pepkit/error.hpp"

namespace pepkit {

bool adjacent_pair(int i, int j) { return (i != kStar && j == i + 1) || (i == kStar); }

Matrix interpolation_matrix(const StepMatrix& H, const FunctionClass& cls, int i, int j) {
  const double mu = cls.mu(), L = cls.L();
  const int N = H.N();
  const Vector ui = selector_u(N, i), uj = selector_u(N, j);
  const Vector hi = selector_h(H, L, i), hj = selector_h(H, L, j);
  const Vector dh = hi - hj, du = ui - uj;
  const double c = 1.0 / (L - mu);
  Matrix A2 = L * c * (uj * dh.transpose() + dh * uj.transpose()) + c * du * du.transpose() -
              mu * c * (ui * dh.transpose() + dh * ui.transpose()) +
              L * mu * c * dh * dh.transpose();
  return 0.5 * A2;
}

PepProblem assemble(const FunctionClass& cls, const StepMatrix& H, double R,
                    const PerformanceCriterion& criterion, const PairFilter& filter) {
  if (!cls.smooth()) throw InvalidArgument("performance estimation needs a finite L");
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("R must be positive and finite");
  if (H.N() < 0) throw InvalidArgument("invalid step matrix");
  const int N = H.N();
  if (criterion.kind != CriterionKind::kMinGradNormSq &&
      (criterion.b.size() != N + 1 || criterion.C.rows() != N + 2))
    throw InvalidArgument("criterion dimensions do not match the method");
  PepProblem p;
  p.cls = cls;
  p.H = H;
  p.R = R;
  p.criterion = criterion;
  p.restricted = static_cast<bool>(filter);
  std::vector<int> points;
  for (int i = 0; i <= N; ++i) points.push_back(i);
  points.push_back(kStar);
  for (int i : points)
    for (int j : points) {
      if (i == j) continue;
      if (filter && !filter(i, j)) continue;
      p.constraints.push_back({i, j, interpolation_matrix(H, cls, i, j)});
    }
  p.A_R = Matrix::Zero(N + 2, N + 2);
  p.A_R(N + 1, N + 1) = 1.0;
  return p;
}

PepProblem assemble(const FunctionClass& cls, const StepMatrix& H, double R, CriterionKind kind,
                    const PairFilter& filter) {
  if (kind == CriterionKind::kLinear)
    throw InvalidArgument("a linear criterion needs explicit b and C");
  return assemble(cls, H, R, PerformanceCriterion::make(kind, H, cls.L()), filter);
}

namespace {

std::string point_name(int i) { return i == kStar ? "*" : std::to_string(i); }

}  // namespace

ConicProgram to_conic(const PepProblem& prob) {
  const int N = prob.N();
  const int n = prob.order();
  ConicProgram cp;
  cp.psd_order = n;
  cp.num_free = N + 1 + (prob.min_gradient() ? 1 : 0);
  cp.objective_free = Vector::Zero(cp.num_free);
  if (prob.min_gradient()) {
    cp.objective_free(N + 1) = 1.0;
  } else {
    cp.objective_free.head(N + 1) = prob.criterion.b;
    cp.objective_psd = sym_entries(prob.criterion.C);
  }
  for (const auto& c : prob.constraints) {
    ConicRow row;
    row.label = "interp " + point_name(c.i) + "," + point_name(c.j);
    if (c.j != kStar) row.free_coeffs.emplace_back(c.j, 1.0);
    if (c.i != kStar) row.free_coeffs.emplace_back(c.i, -1.0);
    row.psd_coeffs = sym_entries(c.A);
    cp.rows.push_back(std::move(row));
  }
  cp.rows.push_back({"radius", {}, sym_entries(prob.A_R), prob.R * prob.R});
  if (prob.min_gradient())
    for (int i = 0; i <= N; ++i)
      cp.rows.push_back({"mingrad " + std::to_string(i), {{N + 1, 1.0}}, {{0, i, i, -1.0}}, 0.0});
  return cp;
}

std::string to_string(PepStatus s) {
  switch (s) {
    case PepStatus::kOptimal: return "optimal";
    case PepStatus::kInfeasible: return "infeasible";
    case PepStatus::kUnbounded: return "unbounded";
    case PepStatus::kNumericalTrouble: return "numerical-trouble";
  }
  return "unknown";
}

double criterion_value(const PepProblem& prob, const Matrix& G, const Vector& f, double t) {
  if (prob.min_gradient()) return t;
  return prob.criterion.b.dot(f) + (prob.criterion.C.array() * G.array()).sum();
}

PepSolution solve(const PepProblem& prob, const SolveOptions& options) {
  const auto backend = make_backend(options.backend);
  const ConicProgram cp = to_conic(prob);
  const ConicSolution cs = solve_conic(cp, options.sdp, backend.get());
  const int N = prob.N();
  const std::size_t nc = prob.constraints.size();

  PepSolution s;
  s.backend = cs.backend;
  s.message = cs.message;
  s.iterations = cs.iterations;
  s.G = cs.G;
  s.f = cs.free.head(N + 1);
  s.t = prob.min_gradient() ? cs.free(N + 1) : 0.0;
  s.S = cs.S;
  s.lambda = cs.multipliers.head(nc);
  s.tau = cs.multipliers(nc);
  if (prob.min_gradient()) s.nu = cs.multipliers.tail(N + 1);
  s.value = criterion_value(prob, s.G, s.f, s.t);
  s.dual_value = s.tau * prob.R * prob.R;
  s.primal_infeasibility = cs.primal_infeasibility;
  s.dual_infeasibility = cs.dual_infeasibility;
  s.relative_gap = cs.relative_gap;

  double viol = 0.0;
  for (std::size_t r = 0; r < cp.rows.size(); ++r) {
    const auto& row = cp.rows[r];
    double lhs = 0.0;
    for (const auto& [k, v] : row.free_coeffs) lhs += v * cs.free(k);
    for (const auto& e : row.psd_coeffs)
      lhs += (e.row == e.col ? 1.0 : 2.0) * e.value * s.G(e.row, e.col);
    viol = std::max(viol, lhs - row.bound);
  }
  s.max_violation = viol;
  s.min_eig_G = Eigen::SelfAdjointEigenSolver<Matrix>(s.G, Eigen::EigenvaluesOnly)
                    .eigenvalues()
                    .minCoeff();

  switch (cs.status) {
    case SdpStatus::kOptimal: s.status = PepStatus::kOptimal; break;
    case SdpStatus::kDualInfeasible: s.status = PepStatus::kInfeasible; break;
    case SdpStatus::kPrimalInfeasible: s.status = PepStatus::kUnbounded; break;
    default: s.status = PepStatus::kNumericalTrouble; break;
  }
  if (s.status == PepStatus::kOptimal) {
    const double scale = std::max(1.0, std::abs(s.value));
    const double report_tol = options.sdp.accept_tol;
    if (viol > report_tol * scale || s.min_eig_G < -report_tol * scale ||
        std::abs(s.value - cs.dual_value) > report_tol * scale) {
      s.status = PepStatus::kNumericalTrouble;
      s.message += (s.message.empty() ? "" : "; ") + std::string("residuals above tolerance");
    }
  }
  return s;
}

double rescale(double unit_value, CriterionKind kind, double L, double R) {
  switch (kind) {
    case CriterionKind::kFinalObjective: return unit_value * L * R * R;
    case CriterionKind::kFinalGradNormSq:
    case CriterionKind::kMinGradNormSq: return unit_value * L * L * R * R;
    case CriterionKind::kFinalDistanceSq: return unit_value * R * R;
    case CriterionKind::kLinear: break;
  }
  throw InvalidArgument("no homogeneity relation for a linear criterion");
}

nlohmann::json PepProblem::to_json() const {
  nlohmann::json j;
  j["class"] = {{"mu", cls.mu()}, {"L", cls.L()}};
  j["method"] = H.to_json();
  j["R"] = R;
  j["criterion"] = {{"kind", pepkit::to_string(criterion.kind)}};
  if (criterion.kind == CriterionKind::kLinear) {
    j["criterion"]["b"] = vector_to_json(criterion.b);
    nlohmann::json C = nlohmann::json::array();
    for (int r = 0; r < criterion.C.rows(); ++r) C.push_back(vector_to_json(criterion.C.row(r).transpose()));
    j["criterion"]["C"] = C;
  }
  j["pairs"] = restricted ? "adjacent" : "all";
  return j;
}

PepProblem PepProblem::from_json(const nlohmann::json& j) {
  try {
    const FunctionClass cls(j.at("class").at("mu").get<double>(), j.at("class").at("L").get<double>());
    const StepMatrix H = StepMatrix::from_json(j.at("method"));
    const double R = j.at("R").get<double>();
    const CriterionKind kind = criterion_from_string(j.at("criterion").at("kind").get<std::string>());
    PerformanceCriterion crit;
    if (kind == CriterionKind::kLinear) {
      const Vector b = vector_from_json(j["criterion"].at("b"));
      const auto& rows = j["criterion"].at("C");
      Matrix C(rows.size(), rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) C.row(r) = vector_from_json(rows[r]).transpose();
      crit = PerformanceCriterion::linear(b, C);
    } else {
      crit = PerformanceCriterion::make(kind, H, cls.L());
    }
    const std::string pairs = j.value("pairs", std::string("all"));
    if (pairs != "all" && pairs != "adjacent") throw InvalidArgument("unknown pair set '" + pairs + "'");
    return assemble(cls, H, R, crit, pairs == "adjacent" ? PairFilter(adjacent_pair) : PairFilter());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed problem: ") + e.what());
  }
}

}  // namespace pepkit
