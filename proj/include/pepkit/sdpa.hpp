#pragma once

#include <string>
#include <vector>

#include "pepkit/block_sdp.hpp"
#include "pepkit/conic_program.hpp"

namespace pepkit {

// Contents of a sparse SDPA file (".dat-s"):
//   (P) minimize  c'x          s.t.  sum_i x_i F_i - F_0 >= 0
//   (D) maximize  F_0 . Y      s.t.  F_i . Y = c_i,  Y >= 0
// Matrix index 0 is F_0. Block sizes follow the SDPA convention: negative
// for diagonal blocks. Indices are stored 0-based.
struct SdpaEntry {
  int matrix = 0;
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
  int line = 0;  // source line when parsed
};

struct SdpaProblem {
  int m = 0;
  std::vector<int> blocks;
  Vector c;
  std::vector<SdpaEntry> entries;
  std::vector<std::string> comments;  // without the leading marker
  int blocks_line = 0;                // line of the block structure when parsed
};

std::string write_sdpa(const SdpaProblem& p);
// Throws ParseError carrying the 1-based line number.
SdpaProblem parse_sdpa(const std::string& text);

// (D) of the file as the standard-form primal min -F_0.X, F_i.X = c_i.
BlockSdp sdpa_to_block_sdp(const SdpaProblem& p);

// Conic program as the SDPA dual side. Y = diag(G, p, q, s) with free
// scalars v = p - q and one slack s_r per row:
//   block 1  G            order psd_order
//   block 2  p            diagonal, num_free   (omitted when num_free = 0)
//   block 3  q            diagonal, num_free   (omitted when num_free = 0)
//   block 4  s            diagonal, rows
// Row r becomes F_r . Y = bound_r, the objective is F_0. Sizes and row
// labels are kept in "* pepkit" comment lines.
std::string export_sdpa(const ConicProgram& cp);
ConicProgram import_sdpa(const std::string& text);

}  // namespace pepkit
