#include "pepkit/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pepkit/error.hpp"

namespace pepkit {

namespace {

std::string point_name(int i) { return i == kStar ? "*" : std::to_string(i); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

nlohmann::json matrix_json(const Matrix& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < M.rows(); ++r) rows.push_back(vector_to_json(M.row(r).transpose()));
  return rows;
}

}  // namespace

nlohmann::json DualCertificate::to_json() const {
  nlohmann::json lam = nlohmann::json::array();
  for (const auto& l : lambda)
    lam.push_back({{"i", point_name(l.i)}, {"j", point_name(l.j)}, {"value", l.value}});
  nlohmann::json j = {{"lambda", lam},
                      {"tau", tau},
                      {"S", matrix_json(S)},
                      {"bound", bound},
                      {"adjacent_support", adjacent_support},
                      {"from_restricted", from_restricted}};
  if (nu.size() > 0) j["nu"] = vector_to_json(nu);
  return j;
}

nlohmann::json VerificationReport::to_json() const {
  return {{"valid", valid},
          {"min_lambda", min_lambda},
          {"tau", tau},
          {"min_nu", min_nu},
          {"min_eig_S", min_eig_S},
          {"stationarity", stationarity},
          {"complementarity", complementarity},
          {"bound", bound},
          {"primal_value", primal_value},
          {"gap", gap},
          {"worst", worst}};
}

Matrix slack_matrix(const PepProblem& prob, const std::vector<PairMultiplier>& lambda, double tau,
                    const Vector& nu) {
  if (lambda.size() != prob.constraints.size())
    throw InvalidArgument("one multiplier per interpolation constraint expected");
  Matrix S = tau * prob.A_R;
  if (!prob.min_gradient()) S -= prob.criterion.C;
  for (std::size_t r = 0; r < lambda.size(); ++r) S += lambda[r].value * prob.constraints[r].A;
  for (int i = 0; i < nu.size(); ++i) S(i, i) -= nu(i);
  return 0.5 * (S + S.transpose());
}

VerificationReport verify(const DualCertificate& cert, const PepProblem& prob, double tol,
                          const PepSolution* primal) {
  VerificationReport rep;
  const int N = prob.N();
  const double scale = std::max(1.0, std::abs(cert.bound));
  const double atol = tol * scale;
  double worst = 0.0;
  auto note = [&](double excess, const std::string& what) {
    if (excess > worst) {
      worst = excess;
      rep.worst = what + " (" + num(excess) + ")";
    }
  };

  rep.min_lambda = 0.0;
  for (const auto& l : cert.lambda) {
    rep.min_lambda = std::min(rep.min_lambda, l.value);
    note(-l.value, "negative lambda_" + point_name(l.i) + point_name(l.j));
  }
  rep.tau = cert.tau;
  note(-cert.tau, "negative tau");
  rep.min_nu = cert.nu.size() ? cert.nu.minCoeff() : 0.0;
  note(-rep.min_nu, "negative nu");

  Vector r = prob.min_gradient() ? Vector(Vector::Zero(N + 1)) : prob.criterion.b;
  for (std::size_t k = 0; k < cert.lambda.size(); ++k) {
    const auto& l = cert.lambda[k];
    if (l.j != kStar) r(l.j) -= l.value;
    if (l.i != kStar) r(l.i) += l.value;
  }
  rep.stationarity = r.lpNorm<Eigen::Infinity>();
  if (prob.min_gradient()) rep.stationarity = std::max(rep.stationarity, std::abs(1.0 - cert.nu.sum()));
  note(rep.stationarity, "stationarity residual");

  const Matrix S = slack_matrix(prob, cert.lambda, cert.tau, cert.nu);
  rep.min_eig_S =
      Eigen::SelfAdjointEigenSolver<Matrix>(S, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  note(-rep.min_eig_S, "slack matrix eigenvalue");

  rep.bound = cert.tau * prob.R * prob.R;
  note(std::abs(rep.bound - cert.bound), "bound differs from tau R^2");

  if (primal) {
    rep.primal_value = primal->value;
    rep.gap = rep.bound - primal->value;
    rep.complementarity = (S.array() * primal->G.array()).sum();
    note(-rep.gap, "bound below primal value");
  }
  rep.valid = worst <= atol;
  if (rep.valid && rep.worst.empty()) rep.worst = "none";
  return rep;
}

DualCertificate extract(const PepProblem& prob, const PepSolution& sol, double tol) {
  if (sol.lambda.size() != static_cast<Eigen::Index>(prob.constraints.size()))
    throw InvalidArgument("solution does not belong to this problem");
  DualCertificate c;
  for (std::size_t r = 0; r < prob.constraints.size(); ++r)
    c.lambda.push_back({prob.constraints[r].i, prob.constraints[r].j, sol.lambda(r)});
  c.tau = sol.tau;
  c.nu = sol.nu;
  c.S = slack_matrix(prob, c.lambda, c.tau, c.nu);
  c.bound = c.tau * prob.R * prob.R;
  c.from_restricted = prob.restricted;
  double biggest = 0.0;
  for (const auto& l : c.lambda) biggest = std::max(biggest, std::abs(l.value));
  c.adjacent_support = true;
  for (const auto& l : c.lambda)
    if (!adjacent_pair(l.i, l.j) && std::abs(l.value) > 1e-8 * std::max(1.0, biggest))
      c.adjacent_support = false;
  const auto rep = verify(c, prob, tol, &sol);
  if (!rep.valid) throw SolverError("certificate verification failed: " + rep.worst);
  return c;
}

DualCertificate preferred_certificate(const PepProblem& prob, const PepSolution& full,
                                      const SolveOptions& options, double rel_tol) {
  DualCertificate base = extract(prob, full);
  if (prob.restricted || base.adjacent_support) return base;
  const PepProblem sub = assemble(prob.cls, prob.H, prob.R, prob.criterion, adjacent_pair);
  PepSolution s;
  try {
    s = solve(sub, options);
  } catch (const SolverError&) {
    return base;
  }
  if (!s.optimal()) return base;
  const double limit = full.dual_value + rel_tol * std::abs(full.dual_value) + 1e-12;
  if (!(s.dual_value <= limit)) return base;

  DualCertificate c;
  for (const auto& con : prob.constraints) {
    double v = 0.0;
    for (std::size_t r = 0; r < sub.constraints.size(); ++r)
      if (sub.constraints[r].i == con.i && sub.constraints[r].j == con.j) v = s.lambda(r);
    c.lambda.push_back({con.i, con.j, v});
  }
  c.tau = s.tau;
  c.nu = s.nu;
  c.S = slack_matrix(prob, c.lambda, c.tau, c.nu);
  c.bound = c.tau * prob.R * prob.R;
  c.adjacent_support = true;
  c.from_restricted = true;
  if (!verify(c, prob, 1e-6, &full).valid) return base;
  return c;
}

namespace {

std::string criterion_text(const PepProblem& prob) {
  const std::string N = std::to_string(prob.N());
  switch (prob.criterion.kind) {
    case CriterionKind::kFinalObjective: return "f(x_" + N + ") - f_*";
    case CriterionKind::kFinalGradNormSq: return "|g_" + N + "|^2";
    case CriterionKind::kFinalDistanceSq: return "|x_" + N + " - x_*|^2";
    case CriterionKind::kMinGradNormSq: return "min_i |g_i|^2";
    case CriterionKind::kLinear: return "b'f + Tr(C G)";
  }
  return "criterion";
}

std::string interpolation_bracket(const PepProblem& prob, int i, int j) {
  const std::string si = point_name(i), sj = point_name(j);
  const std::string fi = i == kStar ? "f_*" : "f_" + si;
  const std::string fj = j == kStar ? "f_*" : "f_" + sj;
  const double mu = prob.cls.mu(), L = prob.cls.L(), k = mu / L;
  std::string out = fj + " - " + fi + " + <g_" + sj + ", x_" + si + " - x_" + sj + ">";
  out += " + " + num(1.0 / (2.0 * L * (1.0 - k))) + " |g_" + si + " - g_" + sj + "|^2";
  if (mu > 0.0) {
    out += " + " + num(mu / (2.0 * (1.0 - k))) + " |x_" + si + " - x_" + sj + "|^2";
    out += " - " + num(mu / (L * (1.0 - k))) + " <g_" + sj + " - g_" + si + ", x_" + sj +
           " - x_" + si + ">";
  }
  return "[" + out + "]";
}

std::string column_name(int N, int p) {
  return p == N + 1 ? "(x_0 - x_*)" : "g_" + std::to_string(p);
}

std::string linear_combination(const Vector& a, int N) {
  std::string out;
  for (int p = 0; p < a.size(); ++p) {
    if (std::abs(a(p)) < 1e-12) continue;
    const double v = a(p);
    const bool first = out.empty();
    if (!first) out += v < 0 ? " - " : " + ";
    else if (v < 0) out += "-";
    const double m = std::abs(v);
    if (num(m) != "1") out += num(m) + " ";
    out += column_name(N, p);
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::string render_proof(const DualCertificate& cert, const PepProblem& prob, double drop_tol) {
  std::ostringstream os;
  const int N = prob.N();
  const std::string crit = criterion_text(prob);
  os << "Claim: for every f in F(mu=" << num(prob.cls.mu()) << ", L=" << num(prob.cls.L())
     << ") and |x_0 - x_*| <= R = " << num(prob.R) << ",\n"
     << "  " << crit << " <= " << num(cert.tau) << " |x_0 - x_*|^2 <= " << num(cert.bound)
     << "\nfor the method '" << prob.H.label() << "' with N = " << N << ".\n\n";

  std::string lhs = crit;
  if (prob.min_gradient()) {
    std::string comb;
    for (int i = 0; i < cert.nu.size(); ++i) {
      if (cert.nu(i) <= drop_tol) continue;
      comb += (comb.empty() ? "" : " + ") + num(cert.nu(i)) + " |g_" + std::to_string(i) + "|^2";
    }
    os << "Since the weights " << "nu_i sum to one, " << crit << " <= " << comb << ", and\n";
    lhs = comb;
  }
  os << "Identity (using x_i = x_0 - sum_k h_{i,k}/L g_k and g_* = 0):\n";
  os << "  " << lhs << " =\n";
  bool first = true;
  int used = 0;
  for (const auto& l : cert.lambda) {
    if (l.value <= drop_tol) continue;
    os << "    " << (first ? "  " : "+ ") << num(l.value) << " * "
       << interpolation_bracket(prob, l.i, l.j) << "\n";
    first = false;
    ++used;
  }
  if (cert.tau > drop_tol)
    os << "    " << (first ? "  " : "+ ") << num(cert.tau) << " * |x_0 - x_*|^2\n";

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (cert.S + cert.S.transpose()));
  const double smax = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  for (int k = static_cast<int>(es.eigenvalues().size()) - 1; k >= 0; --k) {
    const double sigma = es.eigenvalues()(k);
    if (sigma <= drop_tol * smax) continue;
    Vector u = es.eigenvectors().col(k);
    Eigen::Index arg = 0;
    const double m = u.cwiseAbs().maxCoeff(&arg);
    u /= m;
    const double last = u(u.size() - 1);
    if (last < -1e-12 || (std::abs(last) <= 1e-12 && u(arg) < 0)) u = -u;
    os << "    - " << num(sigma * m * m) << " * |" << linear_combination(u, N) << "|^2\n";
  }
  os << "\nEach bracket is <= 0 (interpolation inequality of the class), "
     << "so dropping the " << used << " weighted brackets and the squares gives\n"
     << "  " << crit << " <= " << num(cert.tau) << " |x_0 - x_*|^2 <= " << num(cert.bound)
     << ".\n";
  return os.str();
}

}  // namespace pepkit
