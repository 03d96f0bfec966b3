#include "pepkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pepkit/analysis.hpp"
#include "pepkit/certificate.hpp"
#include "pepkit/error.hpp"
#include "pepkit/interpolation.hpp"
#include "pepkit/reconstruction.hpp"
#include "pepkit/sdpa.hpp"

namespace pepkit {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path);
  if (!o) throw InvalidArgument("cannot write '" + path + "'");
  o << text;
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(what + ": " + e.what());
  }
}

double parse_L(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return kInfinity;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("--L expects a number or 'inf', got '" + s + "'");
  }
}

bool is_norm(CriterionKind k) {
  return k == CriterionKind::kFinalGradNormSq || k == CriterionKind::kMinGradNormSq ||
         k == CriterionKind::kFinalDistanceSq;
}

// Conjectured or analytic value for L = R = 1, in criterion units; null if none applies.
nlohmann::json reference_value(const RunConfig& c, CriterionKind kind, double kappa) {
  if (c.method == "gm" && kappa * c.h < 1.0) {
    if (kind == CriterionKind::kFinalObjective)
      return {{"source", "conjecture"}, {"value", conj_gm_obj(c.N, c.h, kappa)}};
    if (kind == CriterionKind::kFinalGradNormSq) {
      const double g = conj_gm_grad(c.N, c.h, kappa);
      return {{"source", "conjecture"}, {"value", g * g}};
    }
  }
  if ((c.method == "fgm" || c.method == "ogm") && kappa == 0.0 &&
      kind == CriterionKind::kFinalObjective)
    return {{"source", "conjecture"},
            {"value", conj_fgm_ogm(c.N, c.method, sequence_from_string(c.sequence)).value}};
  if (c.method == "mfgm" && kappa == 0.0 && kind == CriterionKind::kMinGradNormSq) {
    const double b = baseline("mfgm", kind, c.N);
    return {{"source", "analytic bound"}, {"value", b * b}};
  }
  return nullptr;
}

nlohmann::json flatten(const nlohmann::json& j, const std::string& prefix = "") {
  nlohmann::json out = nlohmann::json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      const nlohmann::json sub = flatten(*it, key);
      for (auto& [k, v] : sub.items()) out[k] = v;
    } else if (!it->is_array()) {
      out[key] = *it;
    }
  }
  return out;
}

std::string json_to_csv(const nlohmann::json& j) {
  const nlohmann::json flat = flatten(j);
  std::ostringstream head, row;
  bool first = true;
  for (auto& [k, v] : flat.items()) {
    head << (first ? "" : ",") << k;
    row << (first ? "" : ",");
    if (v.is_string()) {
      const std::string t = v.get<std::string>();
      if (t.find_first_of(",\"\n") == std::string::npos) {
        row << t;
      } else {
        row << '"';
        for (char ch : t) row << (ch == '"' ? "\"\"" : std::string(1, ch));
        row << '"';
      }
    }
    else if (!v.is_null())
      row << v.dump();
    first = false;
  }
  return head.str() + "\n" + row.str() + "\n";
}

}  // namespace

void RunConfig::validate() const {
  const std::vector<std::string> methods{"gm", "fgm", "ogm", "mfgm", "custom"};
  if (command == "solve") {
    if (std::find(methods.begin(), methods.end(), method) == methods.end())
      throw InvalidArgument("unknown method '" + method + "'");
    if (method == "custom" && h_file.empty())
      throw InvalidArgument("--method custom needs --H FILE");
    if (method != "custom" && N < 1) throw InvalidArgument("--N must be at least 1");
    if (method == "mfgm" && N % 2 != 0) throw InvalidArgument("mfgm needs an even N");
    if (method == "gm" && !std::isfinite(h)) throw InvalidArgument("--h must be finite");
    (void)sequence_from_string(sequence);
    (void)criterion_from_string(criterion);
    if (criterion == "linear") throw InvalidArgument("criterion 'linear' is library-only");
    if (pairs != "all" && pairs != "adjacent")
      throw InvalidArgument("--pairs must be 'all' or 'adjacent'");
    if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("--R must be positive");
    (void)FunctionClass(mu, L);
    if (!std::isfinite(L)) throw InvalidArgument("performance estimation needs a finite L");
    if (!(tol > 0.0)) throw InvalidArgument("--tol must be positive");
  } else if (command == "interp") {
    if (data.empty()) throw InvalidArgument("--data FILE is required");
    (void)FunctionClass(mu, L);
    if (!(interp_tol >= 0.0)) throw InvalidArgument("--tol must be nonnegative");
  } else if (command == "hopt") {
    if (N < 1) throw InvalidArgument("--N must be at least 1");
    if (!(kappa >= 0.0 && kappa < 1.0)) throw InvalidArgument("--kappa must lie in [0, 1)");
    if (criterion != "obj" && criterion != "grad")
      throw InvalidArgument("hopt supports --criterion obj or grad");
  } else if (command == "sweep") {
    // run_sweep checks the lists
  } else {
    throw InvalidArgument("unknown command '" + command + "'");
  }
  if (format != "json" && format != "csv") throw InvalidArgument("--format must be json or csv");
}

StepMatrix method_from_config(const RunConfig& c) {
  const Sequence seq = sequence_from_string(c.sequence);
  if (c.method == "gm") return gm(c.N, c.h);
  if (c.method == "fgm") return fgm(c.N, seq);
  if (c.method == "ogm") return ogm(c.N, seq);
  if (c.method == "mfgm") return mfgm(c.N);
  if (c.method == "custom") {
    const auto j = parse_json(read_file(c.h_file), c.h_file);
    if (j.is_array()) {
      try {
        return custom(j.get<std::vector<std::vector<double>>>(), "custom", seq);
      } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(c.h_file + ": " + e.what());
      }
    }
    return StepMatrix::from_json(j);
  }
  throw InvalidArgument("unknown method '" + c.method + "'");
}

nlohmann::json cmd_solve(const RunConfig& c) {
  c.validate();
  const StepMatrix H = method_from_config(c);
  const CriterionKind kind = criterion_from_string(c.criterion);
  const double kappa = c.mu / c.L;
  const PairFilter filter = c.pairs == "adjacent" ? PairFilter(adjacent_pair) : PairFilter();

  // Solved with L = R = 1; absolute values follow from homogeneity.
  const PepProblem prob = assemble(FunctionClass(kappa, 1.0), H, 1.0, kind, filter);
  if (!c.export_sdpa.empty()) {
    const PepProblem actual = assemble(FunctionClass(c.mu, c.L), H, c.R, kind, filter);
    write_file(c.export_sdpa, export_sdpa(to_conic(actual)));
  }

  SolveOptions options;
  options.sdp.tol = c.tol;
  const PepSolution sol = solve(prob, options);
  if (!sol.optimal())
    throw SolverError("solver returned " + to_string(sol.status) +
                      (sol.message.empty() ? "" : ": " + sol.message));

  nlohmann::json rep;
  rep["method"] = H.label();
  rep["N"] = H.N();
  if (c.method == "gm") rep["h"] = c.h;
  if (c.method == "fgm" || c.method == "ogm") rep["sequence"] = c.sequence;
  rep["mu"] = c.mu;
  rep["L"] = c.L;
  rep["R"] = c.R;
  rep["kappa"] = kappa;
  rep["criterion"] = to_string(kind);
  rep["pairs"] = c.pairs;
  rep["status"] = to_string(sol.status);
  rep["value_unit"] = sol.value;
  rep["value"] = rescale(sol.value, kind, c.L, c.R);
  rep["dual_value_unit"] = sol.dual_value;
  if (is_norm(kind)) {
    rep["norm_unit"] = std::sqrt(std::max(0.0, sol.value));
    rep["norm"] = std::sqrt(std::max(0.0, rescale(sol.value, kind, c.L, c.R)));
  }
  rep["duality_gap_guarantee"] = H.duality_gap_guarantee();
  rep["iterations"] = sol.iterations;
  rep["backend"] = sol.backend;
  if (!H.flags().empty()) rep["flags"] = H.flags();
  const nlohmann::json ref = reference_value(c, kind, kappa);
  if (!ref.is_null()) {
    rep["reference"] = ref;
    rep["reference"]["rel_error"] =
        std::abs(sol.value - ref["value"].get<double>()) / ref["value"].get<double>();
  }

  const DualCertificate cert = preferred_certificate(prob, sol, options);
  const VerificationReport ver = verify(cert, prob, 1e-6, &sol);
  rep["certificate"] = {{"bound_unit", cert.bound},
                        {"tau_unit", cert.tau},
                        {"valid", ver.valid},
                        {"min_eig_S", ver.min_eig_S},
                        {"stationarity", ver.stationarity},
                        {"adjacent_support", cert.adjacent_support}};
  if (!c.certificate.empty()) {
    nlohmann::json cj = cert.to_json();
    cj["verification"] = ver.to_json();
    cj["units"] = "L = R = 1";
    write_file(c.certificate, cj.dump(2) + "\n");
  }
  if (!c.proof.empty()) write_file(c.proof, "# L = R = 1\n" + render_proof(cert, prob));

  try {
    const WorstCaseInstance inst = reconstruct(prob, sol, options);
    nlohmann::json wc = {{"rank", inst.rank},
                         {"achieved_unit", inst.achieved_value},
                         {"min_slack", inst.min_slack}};
    if (const auto rec = recognize_1d(inst)) {
      wc["family"] = to_string(rec->family);
      wc["tau"] = std::isfinite(rec->tau) ? nlohmann::json(rec->tau * c.R) : nlohmann::json(nullptr);
    }
    rep["worst_case"] = wc;
    if (!c.trajectory.empty()) write_file(c.trajectory, inst.trajectory_csv());
  } catch (const std::exception& e) {
    rep["worst_case"] = {{"error", e.what()}};
  }
  return rep;
}

nlohmann::json cmd_interp(const RunConfig& c) {
  c.validate();
  const DataSet set = DataSet::from_json(parse_json(read_file(c.data), c.data));
  const FunctionClass cls(c.mu, c.L);
  const auto rep = check_interpolable(set, cls, c.interp_tol);
  nlohmann::json v = nlohmann::json::array();
  for (const auto& p : rep.violations)
    v.push_back({{"i", set[p.i].id}, {"j", set[p.j].id}, {"slack", p.slack}});
  return {{"class", cls.to_string()},
          {"points", set.size()},
          {"interpolable", rep.interpolable},
          {"min_slack", set.size() > 1 ? nlohmann::json(rep.min_slack) : nlohmann::json(nullptr)},
          {"violations", v}};
}

nlohmann::json cmd_hopt(const RunConfig& c) {
  c.validate();
  const CriterionKind kind = criterion_from_string(c.criterion);
  const double h = hopt(c.N, c.kappa, kind);
  const auto [lo, hi] = hopt_bounds(c.N, c.kappa, kind);
  const ApproxStep approx = approx_hopt(c.N, c.kappa, kind);
  const double value = kind == CriterionKind::kFinalObjective ? conj_gm_obj(c.N, h, c.kappa)
                                                              : conj_gm_grad(c.N, h, c.kappa);
  return {{"N", c.N},
          {"kappa", c.kappa},
          {"criterion", c.criterion},
          {"h_opt", h},
          {"lower", lo},
          {"upper", hi},
          {"approx", approx.value},
          {"approx_is_bound_midpoint", approx.fallback},
          {"conjecture", value},
          {"conjecture_inv", 1.0 / value}};
}

Table cmd_sweep(const RunConfig& c) {
  c.validate();
  SweepConfig s;
  s.kind = c.sweep_kind;
  s.N = c.sweep_N;
  s.kappa = c.sweep_kappa;
  s.h = c.sweep_h;
  s.method = c.method == "gm" ? "fgm" : c.method;
  s.jobs = c.jobs;
  s.options.sdp.tol = c.tol;
  return run_sweep(s);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string L = "1";
  CLI::App app{"Worst-case performance of fixed-step first-order methods"};
  app.set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "Exact worst case of a method");
  solve_cmd->add_option("--method", c.method, "gm, fgm, ogm, mfgm or custom");
  solve_cmd->add_option("--h", c.h, "normalized step size (gm)");
  solve_cmd->add_option("--N", c.N, "number of iterations");
  solve_cmd->add_option("--H", c.h_file, "JSON step matrix (custom)");
  solve_cmd->add_option("--sequence", c.sequence, "primary or secondary (fgm, ogm)");
  solve_cmd->add_option("--mu", c.mu);
  solve_cmd->add_option("--L", L);
  solve_cmd->add_option("--R", c.R, "bound on |x_0 - x_*|");
  solve_cmd->add_option("--criterion", c.criterion, "obj, grad, dist or mingrad");
  solve_cmd->add_option("--pairs", c.pairs, "all or adjacent");
  solve_cmd->add_option("--tol", c.tol, "solver accuracy");
  solve_cmd->add_option("--export-sdpa", c.export_sdpa, "write the program in SDPA format");
  solve_cmd->add_option("--certificate", c.certificate, "write the dual certificate (JSON)");
  solve_cmd->add_option("--proof", c.proof, "write the weighted-sum proof");
  solve_cmd->add_option("--trajectory", c.trajectory, "write the worst-case run (CSV)");

  auto* interp_cmd = app.add_subcommand("interp", "Check interpolability of a data set");
  interp_cmd->add_option("--data", c.data, "JSON data set")->required();
  interp_cmd->add_option("--mu", c.mu);
  interp_cmd->add_option("--L", L, "number or inf");
  interp_cmd->add_option("--tol", c.interp_tol);

  auto* hopt_cmd = app.add_subcommand("hopt", "Optimal constant step of the gradient method");
  hopt_cmd->add_option("--N", c.N);
  hopt_cmd->add_option("--kappa", c.kappa);
  hopt_cmd->add_option("--criterion", c.criterion, "obj or grad");

  auto* sweep_cmd = app.add_subcommand("sweep", "Comparison tables and figure series");
  sweep_cmd->add_option("--kind", c.sweep_kind, "table1, table3, table4, figure4, figure5");
  sweep_cmd->add_option("--N", c.sweep_N, "comma-separated list")->delimiter(',');
  sweep_cmd->add_option("--kappa", c.sweep_kappa, "comma-separated list")->delimiter(',');
  sweep_cmd->add_option("--h", c.sweep_h, "comma-separated list")->delimiter(',');
  sweep_cmd->add_option("--method", c.method, "fgm or ogm (figure4)");
  sweep_cmd->add_option("--jobs", c.jobs, "worker threads, 0 for all cores");
  sweep_cmd->add_option("--tol", c.tol, "solver accuracy");

  for (auto* sub : {solve_cmd, interp_cmd, hopt_cmd, sweep_cmd}) {
    sub->add_option("--format", c.format, "json or csv");
    sub->add_option("--out", c.out, "output file (default stdout)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidConfig;
  }

  try {
    c.L = parse_L(L);
    std::string text;
    if (solve_cmd->parsed()) {
      c.command = "solve";
      const auto j = cmd_solve(c);
      text = c.format == "csv" ? json_to_csv(j) : j.dump(2) + "\n";
    } else if (interp_cmd->parsed()) {
      c.command = "interp";
      const auto j = cmd_interp(c);
      text = c.format == "csv" ? json_to_csv(j) : j.dump(2) + "\n";
    } else if (hopt_cmd->parsed()) {
      c.command = "hopt";
      const auto j = cmd_hopt(c);
      text = c.format == "csv" ? json_to_csv(j) : j.dump(2) + "\n";
    } else {
      c.command = "sweep";
      if (!sweep_cmd->count("--format")) c.format = "csv";
      const Table t = cmd_sweep(c);
      text = c.format == "csv" ? t.to_csv() : t.to_json().dump(2) + "\n";
    }
    if (c.out.empty())
      out << text;
    else
      write_file(c.out, text);
    return kExitOk;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
}

}  // namespace pepkit
