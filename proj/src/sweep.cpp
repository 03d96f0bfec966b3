#include "pepkit/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "pepkit/analysis.hpp"
#include "pepkit/error.hpp"

namespace pepkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double inv(double v) { return std::isfinite(v) && v != 0.0 ? 1.0 / v : kNaN; }
double rel_err(double computed, double reference) {
  return std::abs(computed - reference) / std::abs(reference);
}

// Runs body(0..n-1) on up to `jobs` threads; the first exception is rethrown.
void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  if (jobs <= 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<int> range(int a, int b, int step = 1) {
  std::vector<int> v;
  for (int i = a; i <= b; i += step) v.push_back(i);
  return v;
}

Table table1(const SweepConfig& c) {
  const auto Ns = c.N.empty() ? std::vector<int>{1, 2, 5, 10} : c.N;
  Table t{{"N", "h_opt", "conjecture", "conjecture_inv", "sdp", "sdp_inv", "rel_error"}, {}};
  t.rows.resize(Ns.size());
  parallel_for(static_cast<int>(Ns.size()), c.jobs, [&](int k) {
    const int N = Ns[k];
    const double h = hopt(N, 0.0);
    const double conj = conj_gm_obj(N, h, 0.0);
    const double sdp = unit_worst_case(gm(N, h), 0.0, CriterionKind::kFinalObjective, c.options);
    t.rows[k] = {double(N), h, conj, inv(conj), sdp, inv(sdp), rel_err(sdp, conj)};
  });
  return t;
}

Table table3(const SweepConfig& c) {
  const auto kappas = c.kappa.empty() ? std::vector<double>{0.0, 0.01, 0.1, 0.25} : c.kappa;
  const auto Ns = c.N.empty() ? range(1, 10) : c.N;
  std::vector<double> hs = c.h;
  if (hs.empty())
    for (int k = 1; k <= 7; ++k) hs.push_back(0.25 * k);

  struct Job {
    int kappa_index;
    int N;
    double h;
    double conj;
  };
  std::vector<Job> jobs;
  for (int q = 0; q < static_cast<int>(kappas.size()); ++q)
    for (int N : Ns)
      for (double h : hs) {
        if (kappas[q] * h >= 1.0) continue;
        const double conj = conj_gm_obj(N, h, kappas[q]);
        if (conj >= 1e-6) jobs.push_back({q, N, h, conj});
      }
  std::vector<double> err(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), c.jobs, [&](int k) {
    const Job& j = jobs[k];
    const double sdp =
        unit_worst_case(gm(j.N, j.h), kappas[j.kappa_index], CriterionKind::kFinalObjective,
                        c.options);
    err[k] = rel_err(sdp, j.conj);
  });
  Table t{{"kappa", "instances", "max_rel_error"}, {}};
  for (int q = 0; q < static_cast<int>(kappas.size()); ++q) {
    int count = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < jobs.size(); ++k)
      if (jobs[k].kappa_index == q) {
        ++count;
        worst = std::max(worst, err[k]);
      }
    t.rows.push_back({kappas[q], double(count), count ? worst : kNaN});
  }
  return t;
}

Table gradient_table(const SweepConfig& c, std::vector<int> Ns) {
  Table t{{"N", "fgm_analytic", "fgm_last", "fgm_best", "mfgm_analytic", "mfgm_best",
           "fgm_analytic_inv", "fgm_last_inv", "fgm_best_inv", "mfgm_analytic_inv",
           "mfgm_best_inv"},
          {}};
  t.rows.resize(Ns.size());
  parallel_for(static_cast<int>(Ns.size()), c.jobs, [&](int k) {
    const int N = Ns[k];
    const StepMatrix H = fgm(N, Sequence::kPrimary);
    const double fa = baseline("fgm", CriterionKind::kFinalGradNormSq, N);
    const double fl =
        std::sqrt(unit_worst_case(H, 0.0, CriterionKind::kFinalGradNormSq, c.options));
    const double fb = std::sqrt(unit_worst_case(H, 0.0, CriterionKind::kMinGradNormSq, c.options));
    double ma = kNaN, mb = kNaN;
    if (N % 2 == 0) {
      ma = baseline("mfgm", CriterionKind::kMinGradNormSq, N);
      mb = std::sqrt(unit_worst_case(mfgm(N), 0.0, CriterionKind::kMinGradNormSq, c.options));
    }
    t.rows[k] = {double(N), fa, fl, fb, ma, mb, inv(fa), inv(fl), inv(fb), inv(ma), inv(mb)};
  });
  return t;
}

Table figure4(const SweepConfig& c) {
  const auto Ns = c.N.empty() ? range(1, 30) : c.N;
  if (c.method != "fgm" && c.method != "ogm")
    throw InvalidArgument("figure4 sweeps fgm or ogm, got '" + c.method + "'");
  Table t{{"N", "conj_primary", "sdp_primary", "rel_error_primary", "baseline_primary",
           "conj_secondary", "sdp_secondary", "rel_error_secondary", "baseline_secondary"},
          {}};
  t.rows.resize(Ns.size());
  parallel_for(static_cast<int>(Ns.size()), c.jobs, [&](int k) {
    const int N = Ns[k];
    std::vector<double> row{double(N)};
    for (Sequence s : {Sequence::kPrimary, Sequence::kSecondary}) {
      const StepMatrix H = c.method == "fgm" ? fgm(N, s) : ogm(N, s);
      const double conj = conj_fgm_ogm(N, c.method, s).value;
      const double sdp = unit_worst_case(H, 0.0, CriterionKind::kFinalObjective, c.options);
      const double base = baseline(c.method, CriterionKind::kFinalObjective, N, 1.0, 0.0, s);
      row.insert(row.end(), {conj, sdp, rel_err(sdp, conj), base});
    }
    t.rows[k] = row;
  });
  return t;
}

std::string cell(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string Table::to_csv() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < columns.size(); ++k) os << (k ? "," : "") << columns[k];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << cell(row[k]);
    os << "\n";
  }
  return os.str();
}

nlohmann::json Table::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t k = 0; k < columns.size() && k < row.size(); ++k)
      r[columns[k]] = std::isnan(row[k]) ? nlohmann::json(nullptr) : nlohmann::json(row[k]);
    out.push_back(r);
  }
  return out;
}

double unit_worst_case(const StepMatrix& H, double kappa, CriterionKind kind,
                       const SolveOptions& options) {
  const PepProblem prob = assemble(FunctionClass(kappa, 1.0), H, 1.0, kind);
  const PepSolution sol = solve(prob, options);
  if (!sol.optimal())
    throw SolverError("worst case for " + H.label() + " N=" + std::to_string(H.N()) + ": " +
                      to_string(sol.status) + (sol.message.empty() ? "" : " (" + sol.message + ")"));
  return sol.value;
}

Table run_sweep(const SweepConfig& config) {
  for (int N : config.N)
    if (N < 1) throw InvalidArgument("sweep values of N must be at least 1");
  for (double k : config.kappa)
    if (!(k >= 0.0 && k < 1.0)) throw InvalidArgument("sweep values of kappa must lie in [0, 1)");
  if (config.kind == "table1") return table1(config);
  if (config.kind == "table3") return table3(config);
  if (config.kind == "table4")
    return gradient_table(config, config.N.empty() ? std::vector<int>{2, 4, 10} : config.N);
  if (config.kind == "figure4") return figure4(config);
  if (config.kind == "figure5")
    return gradient_table(config, config.N.empty() ? range(2, 30, 2) : config.N);
  throw InvalidArgument("unknown sweep kind '" + config.kind + "'");
}

}  // namespace pepkit
