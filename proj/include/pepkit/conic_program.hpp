#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pepkit/block_sdp.hpp"

namespace pepkit {

// One inequality  sum_k a_k v_k + Tr(M G) <= bound  over free scalars v and
// the PSD matrix G. M is given by its upper-triangle entries (block ignored).
struct ConicRow {
  std::string label;
  std::vector<std::pair<int, double>> free_coeffs;
  std::vector<SymEntry> psd_coeffs;
  double bound = 0.0;
};

// maximize  c'v + Tr(C G)  subject to the rows and G PSD of order psd_order.
struct ConicProgram {
  int psd_order = 0;
  int num_free = 0;
  std::vector<ConicRow> rows;
  Vector objective_free;
  std::vector<SymEntry> objective_psd;

  void validate() const;
};

struct ConicSolution {
  SdpStatus status = SdpStatus::kNumericalTrouble;
  Matrix G;
  Vector free;
  Vector multipliers;  // one per row, >= 0
  Matrix S;            // PSD dual block: sum_r y_r M_r - C
  double primal_value = 0.0;  // objective at (v, G)
  double dual_value = 0.0;    // sum_r y_r bound_r
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  std::string backend;
  std::string message;
};

Matrix sym_matrix(int n, const std::vector<SymEntry>& entries);
std::vector<SymEntry> sym_entries(const Matrix& M, double drop_tol = 0.0);

// Variables y = (upper triangle of G row by row, free scalars); block 0 is
// G itself (C = 0, A = -E_pq), block 1 is diagonal with one slack per row.
// Rows are divided by their largest coefficient unless scale is false; the
// factors applied are written to row_scale.
BlockSdp to_block_sdp(const ConicProgram& cp, bool scale = true, Vector* row_scale = nullptr);
// Inverse of to_block_sdp(cp, false) for programs with that layout.
ConicProgram from_block_sdp(const BlockSdp& sdp, int psd_order, int num_free);

ConicSolution solve_conic(const ConicProgram& cp, const SdpOptions& options = {},
                          const SdpBackend* backend = nullptr);

}  // namespace pepkit
