#include "pepkit/conic_program.hpp"

#include <algorithm>
#include <cmath>

#include "pepkit/error.hpp"

namespace pepkit {

void ConicProgram::validate() const {
  if (psd_order < 1) throw InvalidArgument("conic program needs a PSD block");
  if (objective_free.size() != num_free)
    throw InvalidArgument("objective has the wrong number of free coefficients");
  auto check_psd = [&](const std::vector<SymEntry>& es, const std::string& where) {
    for (const auto& e : es)
      if (e.row < 0 || e.col < e.row || e.col >= psd_order)
        throw InvalidArgument(where + ": PSD coefficient out of range");
  };
  check_psd(objective_psd, "objective");
  for (const auto& r : rows) {
    for (const auto& [k, v] : r.free_coeffs)
      if (k < 0 || k >= num_free) throw InvalidArgument(r.label + ": free index out of range");
    check_psd(r.psd_coeffs, r.label);
  }
}

Matrix sym_matrix(int n, const std::vector<SymEntry>& entries) {
  Matrix M = Matrix::Zero(n, n);
  for (const auto& e : entries) {
    M(e.row, e.col) += e.value;
    if (e.row != e.col) M(e.col, e.row) += e.value;
  }
  return M;
}

std::vector<SymEntry> sym_entries(const Matrix& M, double drop_tol) {
  std::vector<SymEntry> out;
  for (int p = 0; p < M.rows(); ++p)
    for (int q = p; q < M.cols(); ++q) {
      const double v = p == q ? M(p, p) : 0.5 * (M(p, q) + M(q, p));
      if (std::abs(v) > drop_tol) out.push_back({0, p, q, v});
    }
  return out;
}

namespace {

int svec_index(int n, int p, int q) {
  // Row-major upper triangle: row p starts after rows 0..p-1.
  return p * n - p * (p - 1) / 2 + (q - p);
}

}  // namespace

BlockSdp to_block_sdp(const ConicProgram& cp, bool scale, Vector* row_scale) {
  cp.validate();
  const int n = cp.psd_order;
  const int nsym = n * (n + 1) / 2;
  const int m = nsym + cp.num_free;
  const int nrows = static_cast<int>(cp.rows.size());
  BlockSdp sdp;
  sdp.blocks = {n};
  if (nrows > 0) sdp.blocks.push_back(-nrows);
  sdp.b = Vector::Zero(m);
  sdp.A.assign(m, {});
  for (const auto& e : cp.objective_psd)
    sdp.b(svec_index(n, e.row, e.col)) += e.row == e.col ? e.value : 2.0 * e.value;
  sdp.b.tail(cp.num_free) = cp.objective_free;
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) sdp.A[svec_index(n, p, q)].push_back({0, p, q, -1.0});

  Vector scales = Vector::Ones(nrows);
  for (int r = 0; r < nrows; ++r) {
    const auto& row = cp.rows[r];
    Vector coeffs = Vector::Zero(m);
    for (const auto& e : row.psd_coeffs)
      coeffs(svec_index(n, e.row, e.col)) += e.row == e.col ? e.value : 2.0 * e.value;
    for (const auto& [k, v] : row.free_coeffs) coeffs(nsym + k) += v;
    if (scale) {
      const double big = coeffs.lpNorm<Eigen::Infinity>();
      if (big > 0.0) scales(r) = 1.0 / big;
    }
    const double s = scales(r);
    if (row.bound != 0.0) sdp.C.push_back({1, r, r, s * row.bound});
    for (int k = 0; k < m; ++k)
      if (coeffs(k) != 0.0) sdp.A[k].push_back({1, r, r, s * coeffs(k)});
  }
  if (row_scale) *row_scale = scales;
  return sdp;
}

ConicProgram from_block_sdp(const BlockSdp& sdp, int psd_order, int num_free) {
  sdp.validate();
  const int n = psd_order;
  const int nsym = n * (n + 1) / 2;
  if (sdp.num_vars() != nsym + num_free || sdp.blocks.empty() || sdp.blocks[0] != n ||
      sdp.blocks.size() > 2 || (sdp.blocks.size() == 2 && sdp.blocks[1] >= 0))
    throw InvalidArgument("block layout does not match a conic program with PSD order " +
                          std::to_string(n) + " and " + std::to_string(num_free) +
                          " free scalars");
  ConicProgram cp;
  cp.psd_order = n;
  cp.num_free = num_free;
  const int nrows = sdp.blocks.size() == 2 ? -sdp.blocks[1] : 0;
  cp.rows.resize(nrows);
  for (int r = 0; r < nrows; ++r) cp.rows[r].label = "row " + std::to_string(r);
  cp.objective_free = sdp.b.tail(num_free);
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      const double v = sdp.b(svec_index(n, p, q));
      if (v != 0.0) cp.objective_psd.push_back({0, p, q, p == q ? v : 0.5 * v});
    }
  for (const auto& e : sdp.C) {
    if (e.block != 1) throw InvalidArgument("C has entries outside the slack block");
    cp.rows[e.row].bound += e.value;
  }
  for (int k = 0; k < sdp.num_vars(); ++k) {
    for (const auto& e : sdp.A[k]) {
      if (e.block == 0) {
        if (k >= nsym || svec_index(n, e.row, e.col) != k || e.value != -1.0)
          throw InvalidArgument("PSD block is not the identity embedding of G");
        continue;
      }
      auto& row = cp.rows[e.row];
      if (k < nsym) {
        int p = 0;
        while (svec_index(n, p, n - 1) < k) ++p;
        const int q = p + (k - svec_index(n, p, p));
        row.psd_coeffs.push_back({0, p, q, p == q ? e.value : 0.5 * e.value});
      } else {
        row.free_coeffs.emplace_back(k - nsym, e.value);
      }
    }
  }
  return cp;
}

ConicSolution solve_conic(const ConicProgram& cp, const SdpOptions& options,
                          const SdpBackend* backend) {
  std::unique_ptr<SdpBackend> owned;
  if (!backend) {
    owned = make_backend();
    backend = owned.get();
  }
  Vector scales;
  const BlockSdp sdp = to_block_sdp(cp, true, &scales);
  const SdpSolution s = backend->solve(sdp, options);

  const int n = cp.psd_order;
  ConicSolution out;
  out.status = s.status;
  out.backend = backend->name();
  out.message = s.message;
  out.iterations = s.iterations;
  out.primal_infeasibility = s.primal_infeasibility;
  out.dual_infeasibility = s.dual_infeasibility;
  out.relative_gap = s.relative_gap;
  out.G = s.Z[0];
  out.free = s.y.tail(cp.num_free);
  out.S = s.X[0];
  out.multipliers = Vector::Zero(cp.rows.size());
  if (!cp.rows.empty()) out.multipliers = scales.cwiseProduct(s.X[1].col(0));
  // Use the symmetric G implied by y rather than the slack Z (they agree
  // up to the dual residual).
  for (int p = 0, k = 0; p < n; ++p)
    for (int q = p; q < n; ++q, ++k) out.G(p, q) = out.G(q, p) = s.y(k);
  out.primal_value = s.dual_objective;
  out.dual_value = s.primal_objective;
  return out;
}

}  // namespace pepkit
