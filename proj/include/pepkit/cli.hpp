#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pepkit/sweep.hpp"

namespace pepkit {

enum ExitCode { kExitOk = 0, kExitInvalidConfig = 2, kExitSolverFailure = 3 };

struct RunConfig {
  std::string command;

  // method: gm, fgm, ogm, mfgm, or custom (rows read from h_file)
  std::string method = "gm";
  double h = 1.0;
  int N = 1;
  std::string h_file;
  std::string sequence = "secondary";
  double mu = 0.0;
  double L = 1.0;
  double R = 1.0;
  std::string criterion = "obj";
  std::string pairs = "all";  // all or adjacent
  double tol = SdpOptions{}.tol;  // solver target accuracy

  std::string format = "json";
  std::string out;
  std::string export_sdpa;
  std::string certificate;
  std::string proof;
  std::string trajectory;  // CSV of the worst-case run

  // interp
  std::string data;
  double interp_tol = 1e-9;

  // hopt
  double kappa = 0.0;

  // sweep
  std::string sweep_kind = "table1";
  std::vector<int> sweep_N;
  std::vector<double> sweep_kappa;
  std::vector<double> sweep_h;
  int jobs = 0;

  // Checks ranges and names; throws InvalidArgument.
  void validate() const;
};

StepMatrix method_from_config(const RunConfig& c);

// Each returns the report written by the CLI. Solver failures throw SolverError.
nlohmann::json cmd_solve(const RunConfig& c);
nlohmann::json cmd_interp(const RunConfig& c);
nlohmann::json cmd_hopt(const RunConfig& c);
Table cmd_sweep(const RunConfig& c);

// Parses argv, runs the command and returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pepkit
