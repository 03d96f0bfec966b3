#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pepkit/data_set.hpp"

namespace pepkit {

// Entry of a symmetric block matrix, upper triangle (row <= col), 0-based.
struct SymEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Block-diagonal semidefinite program in the pair
//   (P)  minimize  C.X   subject to  A_k.X = b_k,  X in K,
//   (D)  maximize  b'y   subject to  Z = C - sum_k y_k A_k in K,
// where K is a product of PSD cones (positive block sizes) and nonnegative
// orthants (negative block sizes, diagonal blocks).
struct BlockSdp {
  std::vector<int> blocks;
  Vector b;
  std::vector<SymEntry> C;
  std::vector<std::vector<SymEntry>> A;

  int num_vars() const { return static_cast<int>(b.size()); }
  // Throws InvalidArgument on out-of-range or lower-triangle entries.
  void validate() const;
};

enum class SdpStatus {
  kOptimal,
  kPrimalInfeasible,  // (P) infeasible; (D) unbounded along a ray
  kDualInfeasible,    // (D) infeasible
  kNumericalTrouble,
  kIterationLimit,
};

std::string to_string(SdpStatus s);

struct SdpOptions {
  double tol = 1e-12;         // target for gap and infeasibilities
  double accept_tol = 1e-6;   // largest residual still reported as optimal
  int max_iterations = 150;
  bool verbose = false;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::kNumericalTrouble;
  Vector y;
  // Per block; diagonal blocks are stored as column vectors.
  std::vector<Matrix> X;
  std::vector<Matrix> Z;
  double primal_objective = 0.0;  // C.X
  double dual_objective = 0.0;    // b'y
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  std::string message;
};

// Narrow solver interface; one instance per problem is enough, instances
// share no state.
class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  virtual std::string name() const = 0;
  virtual SdpSolution solve(const BlockSdp& sdp, const SdpOptions& options) const = 0;
};

// Names accepted by make_backend.
std::vector<std::string> available_backends();
// Empty name: PEPKIT_SOLVER if set, otherwise the default interior-point solver.
std::unique_ptr<SdpBackend> make_backend(const std::string& name = "");

// Primal-dual path-following solver (HKM direction, Mehrotra corrector).
SdpSolution solve_block_sdp(const BlockSdp& sdp, const SdpOptions& options = {});

}  // namespace pepkit
