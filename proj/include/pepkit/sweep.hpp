#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pepkit/pep.hpp"

namespace pepkit {

// Numeric table with named columns; NaN marks a cell that does not apply.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
  nlohmann::json to_json() const;  // array of row objects, NaN as null
};

struct SweepConfig {
  std::string kind = "table1";  // table1, table3, table4, figure4, figure5
  std::vector<int> N;           // empty: per-kind default
  std::vector<double> kappa;
  std::vector<double> h;
  std::string method = "fgm";   // figure4: fgm or ogm
  int jobs = 0;                 // 0: hardware concurrency
  SolveOptions options;
};

// Worst case with L = R = 1 and mu = kappa. Throws SolverError unless optimal.
double unit_worst_case(const StepMatrix& H, double kappa, CriterionKind kind,
                       const SolveOptions& options = {});

// Replicas of the comparison tables and figure series:
//   table1   GM at h_opt, kappa = 0: conjecture vs SDP
//   table3   GM objective, largest relative error over (N, h) per kappa
//   table4   FGM / MFGM gradient norms, last and best iterate, with baselines
//   figure4  FGM (or OGM) objective, both sequences, conjecture vs SDP vs baseline
//   figure5  table4 columns over a longer N range
// Relative errors are |computed - reference| / reference.
Table run_sweep(const SweepConfig& config);

}  // namespace pepkit
