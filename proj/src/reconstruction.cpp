#include "pepkit/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "pepkit/certificate.hpp"
#include "pepkit/error.hpp"

namespace pepkit {

Factorization factorize(const Matrix& G, double rank_tol, double psd_tol) {
  if (G.rows() != G.cols()) throw InvalidArgument("Gram matrix must be square");
  const int n = static_cast<int>(G.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (G + G.transpose()));
  const Vector ev = es.eigenvalues().reverse();
  const Matrix U = es.eigenvectors().rowwise().reverse();
  const double top = n > 0 ? std::max(0.0, ev(0)) : 0.0;
  if (n > 0 && ev(n - 1) < -psd_tol * std::max(1.0, top))
    throw InvalidArgument("Gram matrix is indefinite (eigenvalue " + std::to_string(ev(n - 1)) +
                          ")");
  Factorization fac;
  fac.eigenvalues = ev;
  int r = 0;
  while (r < n && ev(r) > rank_tol * top && ev(r) > 0.0) ++r;
  fac.rank = r;
  fac.P = Matrix::Zero(r, n);
  for (int k = 0; k < r; ++k) {
    Vector u = U.col(k);
    for (int p = 0; p < n; ++p)
      if (std::abs(u(p)) > 1e-12) {
        if (u(p) < 0) u = -u;
        break;
      }
    fac.P.row(k) = std::sqrt(ev(k)) * u.transpose();
  }
  return fac;
}

int numerical_rank(const Matrix& G, double rank_tol) {
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (G + G.transpose()),
                                                          Eigen::EigenvaluesOnly)
                        .eigenvalues();
  const double top = ev.size() ? std::max(0.0, ev.maxCoeff()) : 0.0;
  int r = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > rank_tol * top && ev(i) > 0.0) ++r;
  return r;
}

PepSolution max_trace_solution(const PepProblem& prob, const PepSolution& sol,
                               const SolveOptions& options, const Matrix* S) {
  const int n = prob.order();
  const Matrix& Sd = S ? *S : sol.S;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (Sd + Sd.transpose()));
  const double smax = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<int> null_idx;
  for (int k = 0; k < n; ++k)
    if (es.eigenvalues()(k) <= 1e-6 * smax) null_idx.push_back(k);
  const int r = static_cast<int>(null_idx.size());
  if (r == 0) return sol;
  Matrix V(n, r);
  for (int k = 0; k < r; ++k) V.col(k) = es.eigenvectors().col(null_idx[k]);

  const ConicProgram cp = to_conic(prob);
  ConicProgram red;
  red.psd_order = r;
  red.num_free = cp.num_free;
  red.objective_free = Vector::Zero(cp.num_free);
  for (int k = 0; k < r; ++k) red.objective_psd.push_back({0, k, k, 1.0});
  for (const auto& row : cp.rows) {
    ConicRow rr = row;
    rr.psd_coeffs = sym_entries(V.transpose() * sym_matrix(n, row.psd_coeffs) * V);
    red.rows.push_back(std::move(rr));
  }
  const double w = sol.value;
  const double eps = 1e-9 * std::max(1.0, std::abs(w));
  ConicRow value_row;
  value_row.label = "value";
  for (int k = 0; k < cp.num_free; ++k)
    if (cp.objective_free(k) != 0.0) value_row.free_coeffs.emplace_back(k, -cp.objective_free(k));
  value_row.psd_coeffs = sym_entries(-(V.transpose() * sym_matrix(n, cp.objective_psd) * V));
  value_row.bound = -(w - eps);
  red.rows.push_back(std::move(value_row));

  ConicSolution cs;
  try {
    const auto backend = make_backend(options.backend);
    cs = solve_conic(red, options.sdp, backend.get());
  } catch (const std::exception&) {
    return sol;
  }
  if (cs.status != SdpStatus::kOptimal) return sol;

  PepSolution out = sol;
  out.G = V * cs.G * V.transpose();
  out.G = 0.5 * (out.G + out.G.transpose());
  const int N = prob.N();
  out.f = cs.free.head(N + 1);
  out.t = prob.min_gradient() ? cs.free(N + 1) : 0.0;
  out.value = criterion_value(prob, out.G, out.f, out.t);
  double viol = 0.0;
  for (const auto& row : cp.rows) {
    double lhs = 0.0;
    for (const auto& [k, v] : row.free_coeffs) lhs += v * cs.free(k);
    for (const auto& e : row.psd_coeffs)
      lhs += (e.row == e.col ? 1.0 : 2.0) * e.value * out.G(e.row, e.col);
    viol = std::max(viol, lhs - row.bound);
  }
  out.max_violation = viol;
  out.min_eig_G = Eigen::SelfAdjointEigenSolver<Matrix>(out.G, Eigen::EigenvaluesOnly)
                      .eigenvalues()
                      .minCoeff();
  const double scale = std::max(1.0, std::abs(w));
  if (out.value < w - 1e-7 * scale || viol > 1e-7 * scale) return sol;
  return out;
}

WorstCaseInstance rebuild(const PepProblem& prob, const Factorization& fac, const Vector& f,
                          double sdp_value, double interp_tol) {
  const int N = prob.N();
  if (fac.P.cols() != N + 2) throw InvalidArgument("factor does not match the problem");
  if (f.size() != N + 1) throw InvalidArgument("function values do not match the problem");
  WorstCaseInstance inst;
  inst.cls = prob.cls;
  inst.rank = fac.rank;
  const int d = std::max(1, fac.rank);
  inst.P = Matrix::Zero(d, N + 2);
  if (fac.rank > 0) inst.P = fac.P;
  inst.sdp_value = sdp_value;
  inst.triples = DataSet(d);
  for (int i = 0; i <= N; ++i) {
    inst.x.push_back(inst.P * selector_h(prob.H, prob.cls.L(), i));
    inst.triples.add({std::to_string(i), inst.x.back(), inst.P.col(i), f(i)});
  }
  inst.triples.add({"*", Vector::Zero(d), Vector::Zero(d), 0.0});

  const auto report = check_interpolable(inst.triples, prob.cls, interp_tol);
  inst.min_slack = report.min_slack;
  if (!report.interpolable)
    throw SolverError("reconstructed triples are not interpolable (min slack " +
                      std::to_string(report.min_slack) + "); try a looser rank tolerance");
  inst.function = InterpolantFunction::build(inst.triples, prob.cls, interp_tol);
  const InterpolantFunction& fn = *inst.function;
  const DataSet& data = inst.triples;
  // The interpolant passes through the triples, so at those points their
  // values are exact; the hull program is least accurate there when many
  // pieces are active at once, and its errors would compound along the run.
  const auto oracle = [&fn, &data](const Vector& x) -> FunctionValue {
    for (const auto& t : data)
      if ((x - t.x).norm() <= 1e-12 * std::max(1.0, t.x.norm())) return {t.f, t.g};
    return fn.evaluate(x);
  };
  inst.trajectory = simulate(prob.H, oracle, inst.x[0], prob.cls.L());
  inst.achieved_value = evaluate_criterion(inst.trajectory, prob.criterion, Vector::Zero(d), 0.0);
  return inst;
}

WorstCaseInstance reconstruct(const PepProblem& prob, const PepSolution& sol,
                              const SolveOptions& options, double rank_tol) {
  // Also run when G is numerically rank one: it removes the O(sqrt(mu))
  // components outside null(S) that interior-point iterates carry.
  Matrix S = sol.S;
  try {
    S = preferred_certificate(prob, sol, options).S;
  } catch (const SolverError&) {
  }
  const PepSolution chosen = max_trace_solution(prob, sol, options, &S);
  // Truncating small eigenvalues can discard mass the criterion depends on.
  // Keep more of the spectrum until the instance reproduces the SDP value.
  const double scale = std::max(1.0, std::abs(sol.value));
  std::optional<WorstCaseInstance> best;
  double best_err = kInfinity;
  int last_rank = -1;
  for (double tol : {rank_tol, 1e-9, 1e-12, 0.0}) {
    if (tol > rank_tol) continue;
    const Factorization fac = factorize(chosen.G, tol);
    if (fac.rank == last_rank) continue;
    last_rank = fac.rank;
    try {
      WorstCaseInstance w = rebuild(prob, fac, chosen.f, sol.value);
      const double err = std::max(std::abs(w.achieved_value - sol.value), -w.min_slack) / scale;
      if (err < best_err) {
        best_err = err;
        best = std::move(w);
      }
      if (err <= 1e-8) break;
    } catch (const SolverError&) {
      if (tol == 0.0 && !best) throw;
    }
  }
  return *best;
}

nlohmann::json WorstCaseInstance::to_json() const {
  nlohmann::json P_rows = nlohmann::json::array();
  for (int r = 0; r < P.rows(); ++r) P_rows.push_back(vector_to_json(P.row(r).transpose()));
  nlohmann::json j = {{"rank", rank},
                      {"P", P_rows},
                      {"triples", triples.to_json()},
                      {"sdp_value", sdp_value},
                      {"achieved_value", achieved_value},
                      {"min_slack", min_slack}};
  if (function) j["interpolant"] = function->strategy_name();
  return j;
}

std::string WorstCaseInstance::trajectory_csv() const {
  std::ostringstream os;
  os.precision(17);
  const int d = triples.dimension();
  os << "i,f";
  for (int k = 0; k < d; ++k) os << ",x" << k;
  for (int k = 0; k < d; ++k) os << ",g" << k;
  os << "\n";
  for (std::size_t i = 0; i < trajectory.x.size(); ++i) {
    os << i << "," << trajectory.f[i];
    for (int k = 0; k < d; ++k) os << "," << trajectory.x[i](k);
    for (int k = 0; k < d; ++k) os << "," << trajectory.g[i](k);
    os << "\n";
  }
  return os.str();
}

nlohmann::json Recognized1D::to_json() const {
  nlohmann::json j = {{"family", to_string(family)}, {"mu", mu}, {"L", L}, {"residual", residual}};
  if (std::isfinite(tau)) {
    j["tau"] = tau;
    j["a"] = a;
    j["b"] = b;
  } else {
    j["tau"] = nullptr;
  }
  return j;
}

std::optional<Recognized1D> recognize_1d(const WorstCaseInstance& inst, double tol) {
  if (inst.rank != 1 || inst.triples.dimension() != 1) return std::nullopt;
  const double mu = inst.cls.mu(), L = inst.cls.L();
  double fscale = 0.0, gscale = 0.0;
  for (const auto& t : inst.triples) {
    fscale = std::max(fscale, std::abs(t.f));
    gscale = std::max(gscale, std::abs(t.g(0)));
  }
  if (fscale == 0.0 && gscale == 0.0) return std::nullopt;
  fscale = std::max(fscale, 1e-300);
  gscale = std::max(gscale, 1e-300);

  std::vector<double> taus;
  for (const auto& t : inst.triples) {
    const double x = t.x(0), g = t.g(0);
    if (x == 0.0 || std::abs(g - L * x) <= tol * gscale) continue;
    taus.push_back((x > 0 ? 1.0 : -1.0) * (g - mu * x) / (L - mu));
  }
  Recognized1D rec;
  rec.mu = mu;
  rec.L = L;
  if (taus.empty()) {
    rec.family = Family::kF2;
    rec.tau = kInfinity;
  } else {
    std::sort(taus.begin(), taus.end());
    rec.tau = taus[taus.size() / 2];
    if (!(rec.tau >= 0.0)) return std::nullopt;
    rec.family = mu == 0.0 ? Family::kF1 : Family::kF1Tau;
  }
  const PiecewiseQuadratic1D model(mu, L, rec.tau, rec.family);
  rec.a = model.a();
  rec.b = model.b();
  double res = 0.0;
  for (const auto& t : inst.triples) {
    res = std::max(res, std::abs(model.value(t.x(0)) - t.f) / fscale);
    res = std::max(res, std::abs(model.derivative(t.x(0)) - t.g(0)) / gscale);
  }
  rec.residual = res;
  if (res > tol) return std::nullopt;
  return rec;
}

}  // namespace pepkit
