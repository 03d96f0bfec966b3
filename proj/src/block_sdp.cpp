#include "pepkit/block_sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "pepkit/error.hpp"

namespace pepkit {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal: return "optimal";
    case SdpStatus::kPrimalInfeasible: return "primal-infeasible";
    case SdpStatus::kDualInfeasible: return "dual-infeasible";
    case SdpStatus::kNumericalTrouble: return "numerical-trouble";
    case SdpStatus::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

void BlockSdp::validate() const {
  if (blocks.empty()) throw InvalidArgument("program has no blocks");
  for (int s : blocks)
    if (s == 0) throw InvalidArgument("block size 0");
  auto check = [&](const SymEntry& e, const std::string& where) {
    if (e.block < 0 || e.block >= static_cast<int>(blocks.size()))
      throw InvalidArgument(where + ": block index out of range");
    const int n = std::abs(blocks[e.block]);
    if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n)
      throw InvalidArgument(where + ": entry index out of range");
    if (e.row > e.col) throw InvalidArgument(where + ": entry below the diagonal");
    if (blocks[e.block] < 0 && e.row != e.col)
      throw InvalidArgument(where + ": off-diagonal entry in a diagonal block");
    if (!std::isfinite(e.value)) throw InvalidArgument(where + ": non-finite value");
  };
  for (const auto& e : C) check(e, "C");
  if (static_cast<int>(A.size()) != num_vars())
    throw InvalidArgument("number of constraint matrices differs from size of b");
  for (std::size_t k = 0; k < A.size(); ++k)
    for (const auto& e : A[k]) check(e, "A_" + std::to_string(k));
}

namespace {

struct Entry {
  int a;
  int b;
  double v;
};

// A_k restricted to one PSD block, both triangles listed.
struct PsdTerm {
  int k;
  std::vector<Entry> entries;
};

struct Data {
  int m = 0;
  std::vector<int> psd_block;  // original index of each PSD block
  std::vector<int> psd_size;
  std::vector<Matrix> C;
  std::vector<std::vector<PsdTerm>> A;
  std::vector<int> lp_offset;  // per original block, -1 for PSD blocks
  int n_lp = 0;
  Vector c_lp;
  Matrix A_lp;  // n_lp x m
};

Data prepare(const BlockSdp& sdp) {
  Data d;
  d.m = sdp.num_vars();
  std::vector<int> psd_of(sdp.blocks.size(), -1);
  d.lp_offset.assign(sdp.blocks.size(), -1);
  for (std::size_t j = 0; j < sdp.blocks.size(); ++j) {
    if (sdp.blocks[j] > 0) {
      psd_of[j] = static_cast<int>(d.psd_block.size());
      d.psd_block.push_back(static_cast<int>(j));
      d.psd_size.push_back(sdp.blocks[j]);
    } else {
      d.lp_offset[j] = d.n_lp;
      d.n_lp += -sdp.blocks[j];
    }
  }
  const int np = static_cast<int>(d.psd_block.size());
  for (int j = 0; j < np; ++j) d.C.push_back(Matrix::Zero(d.psd_size[j], d.psd_size[j]));
  d.A.resize(np);
  d.c_lp = Vector::Zero(d.n_lp);
  d.A_lp = Matrix::Zero(d.n_lp, d.m);
  for (const auto& e : sdp.C) {
    if (psd_of[e.block] >= 0) {
      Matrix& c = d.C[psd_of[e.block]];
      c(e.row, e.col) += e.value;
      if (e.row != e.col) c(e.col, e.row) += e.value;
    } else {
      d.c_lp(d.lp_offset[e.block] + e.row) += e.value;
    }
  }
  for (int k = 0; k < d.m; ++k) {
    std::vector<std::vector<Entry>> per_block(np);
    for (const auto& e : sdp.A[k]) {
      if (psd_of[e.block] >= 0) {
        auto& list = per_block[psd_of[e.block]];
        list.push_back({e.row, e.col, e.value});
        if (e.row != e.col) list.push_back({e.col, e.row, e.value});
      } else {
        d.A_lp(d.lp_offset[e.block] + e.row, k) += e.value;
      }
    }
    for (int j = 0; j < np; ++j)
      if (!per_block[j].empty()) d.A[j].push_back({k, std::move(per_block[j])});
  }
  return d;
}

struct Iterate {
  std::vector<Matrix> X, Z;
  Vector x, z, y;
};

double inner(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

// A(Q)_k = sum_j A_k^j . Q_j + A_lp' q.
Vector apply_A(const Data& d, const std::vector<Matrix>& Q, const Vector& q) {
  Vector out = d.A_lp.transpose() * q;
  for (std::size_t j = 0; j < d.A.size(); ++j)
    for (const auto& t : d.A[j]) {
      double s = 0.0;
      for (const auto& e : t.entries) s += e.v * Q[j](e.a, e.b);
      out(t.k) += s;
    }
  return out;
}

// sum_k y_k A_k, per block.
void apply_At(const Data& d, const Vector& y, std::vector<Matrix>& out, Vector& out_lp) {
  out.resize(d.A.size());
  for (std::size_t j = 0; j < d.A.size(); ++j) {
    out[j] = Matrix::Zero(d.psd_size[j], d.psd_size[j]);
    for (const auto& t : d.A[j])
      for (const auto& e : t.entries) out[j](e.a, e.b) += y(t.k) * e.v;
  }
  out_lp = d.A_lp * y;
}

// Largest alpha with S + alpha dS in the cone (infinity when unbounded).
double max_step_psd(const Matrix& S, const Matrix& dS) {
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix T = llt.matrixL().solve(dS);
  Matrix U = llt.matrixL().solve(T.transpose());
  U = 0.5 * (U + U.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(U, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step_lp(const Vector& s, const Vector& ds) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.size(); ++i)
    if (ds(i) < 0.0) a = std::min(a, -s(i) / ds(i));
  return a;
}

struct Direction {
  Vector dy;
  std::vector<Matrix> dX, dZ;
  Vector dx, dz;
};

}  // namespace

SdpSolution solve_block_sdp(const BlockSdp& sdp, const SdpOptions& opt) {
  sdp.validate();
  const Data d = prepare(sdp);
  const int m = d.m;
  const int np = static_cast<int>(d.psd_size.size());
  int n_total = d.n_lp;
  for (int s : d.psd_size) n_total += s;

  double nrm_C = d.c_lp.squaredNorm();
  for (const auto& c : d.C) nrm_C += c.squaredNorm();
  nrm_C = std::sqrt(nrm_C);
  const double nrm_b = sdp.b.norm();

  // Starting point in the style of SDPT3's infeasible start.
  Iterate it;
  it.y = Vector::Zero(m);
  for (int j = 0; j < np; ++j) {
    const int n = d.psd_size[j];
    double amax = 0.0, ratio = 0.0;
    for (const auto& t : d.A[j]) {
      double nrm = 0.0;
      for (const auto& e : t.entries) nrm += e.v * e.v;
      nrm = std::sqrt(nrm);
      amax = std::max(amax, nrm);
      ratio = std::max(ratio, (1.0 + std::abs(sdp.b(t.k))) / (1.0 + nrm));
    }
    const double xi = std::max({10.0, std::sqrt(double(n)), n * ratio});
    const double eta = std::max({10.0, std::sqrt(double(n)), amax, d.C[j].norm()});
    it.X.push_back(xi * Matrix::Identity(n, n));
    it.Z.push_back(eta * Matrix::Identity(n, n));
  }
  {
    const int n = d.n_lp;
    double amax = 0.0, ratio = 0.0;
    for (int k = 0; k < m && n > 0; ++k) {
      const double nrm = d.A_lp.col(k).norm();
      amax = std::max(amax, nrm);
      ratio = std::max(ratio, (1.0 + std::abs(sdp.b(k))) / (1.0 + nrm));
    }
    const double xi = std::max({10.0, std::sqrt(double(n)), n * ratio});
    const double eta = std::max({10.0, std::sqrt(double(n)), amax, d.c_lp.norm()});
    it.x = Vector::Constant(n, xi);
    it.z = Vector::Constant(n, eta);
  }

  SdpSolution best;
  double best_measure = std::numeric_limits<double>::infinity();
  Iterate best_it;
  int since_improvement = 0;
  SdpStatus final_status = SdpStatus::kIterationLimit;
  std::string message;
  int iter = 0;

  std::vector<Matrix> AtY, Rd(np), W(np);
  Vector AtY_lp, rd_lp;

  for (;; ++iter) {
    // Residuals and objectives.
    const Vector AX = apply_A(d, it.X, it.x);
    const Vector Rp = sdp.b - AX;
    apply_At(d, it.y, AtY, AtY_lp);
    double rd_norm = 0.0, pobj = d.c_lp.dot(it.x), xz = it.x.dot(it.z);
    for (int j = 0; j < np; ++j) {
      Rd[j] = d.C[j] - it.Z[j] - AtY[j];
      rd_norm += Rd[j].squaredNorm();
      pobj += inner(d.C[j], it.X[j]);
      xz += inner(it.X[j], it.Z[j]);
    }
    rd_lp = d.c_lp - it.z - AtY_lp;
    rd_norm = std::sqrt(rd_norm + rd_lp.squaredNorm());
    const double dobj = sdp.b.dot(it.y);
    const double pinf = Rp.norm() / (1.0 + nrm_b);
    const double dinf = rd_norm / (1.0 + nrm_C);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double mu = xz / n_total;
    const double measure = std::max({pinf, dinf, gap});
    if (opt.verbose)
      std::fprintf(stderr, "%3d pobj %+.10e dobj %+.10e pinf %.2e dinf %.2e gap %.2e\n", iter,
                   pobj, dobj, pinf, dinf, gap);

    if (measure < best_measure) {
      if (measure < 0.5 * best_measure) since_improvement = 0;
      best_measure = measure;
      best_it = it;
      best.primal_objective = pobj;
      best.dual_objective = dobj;
      best.primal_infeasibility = pinf;
      best.dual_infeasibility = dinf;
      best.relative_gap = gap;
      best.iterations = iter;
    } else {
      ++since_improvement;
    }
    if (measure <= opt.tol) {
      final_status = SdpStatus::kOptimal;
      break;
    }
    if (iter >= opt.max_iterations) {
      message = "iteration limit reached";
      break;
    }
    if (best_measure <= opt.accept_tol && since_improvement >= 8) {
      message = "progress stalled";
      break;
    }

    // Infeasibility certificates along diverging iterates.
    if (iter >= 3) {
      if (dobj > 0.0) {
        double ray = (AtY_lp + it.z).squaredNorm();
        for (int j = 0; j < np; ++j) ray += (AtY[j] + it.Z[j]).squaredNorm();
        if (std::sqrt(ray) / dobj < 1e-8 && dobj > 1e3) {
          final_status = SdpStatus::kPrimalInfeasible;
          message = "dual ray found: (D) unbounded";
          best_it = it;
          break;
        }
      }
      if (pobj < 0.0 && AX.norm() / -pobj < 1e-8 && -pobj > 1e3) {
        final_status = SdpStatus::kDualInfeasible;
        message = "primal ray found: (D) infeasible";
        best_it = it;
        break;
      }
    }

    // Z^{-1} per block.
    bool ok = true;
    for (int j = 0; j < np; ++j) {
      Eigen::LLT<Matrix> llt(it.Z[j]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      W[j] = llt.solve(Matrix::Identity(d.psd_size[j], d.psd_size[j]));
      W[j] = 0.5 * (W[j] + W[j].transpose());
    }
    if (!ok) {
      message = "lost positive definiteness";
      break;
    }

    // Schur complement M_kl = A_k . (X A_l Z^{-1}).
    Matrix M = Matrix::Zero(m, m);
    for (int j = 0; j < np; ++j) {
      const int n = d.psd_size[j];
      Matrix B(n, n);
      for (const auto& tl : d.A[j]) {
        B.setZero();
        for (const auto& e : tl.entries) B.noalias() += e.v * it.X[j].col(e.a) * W[j].row(e.b);
        for (const auto& tk : d.A[j]) {
          double s = 0.0;
          for (const auto& e : tk.entries) s += e.v * B(e.b, e.a);
          M(tk.k, tl.k) += s;
        }
      }
    }
    if (d.n_lp > 0) {
      const Vector ratio = it.x.cwiseQuotient(it.z).cwiseSqrt();
      const Matrix U = d.A_lp.transpose() * ratio.asDiagonal();
      M.selfadjointView<Eigen::Lower>().rankUpdate(U);
      M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
    }
    M = 0.5 * (M + M.transpose());

    Eigen::LLT<Matrix> schur(M);
    Eigen::LDLT<Matrix> schur_ldlt;
    bool use_ldlt = false;
    if (schur.info() != Eigen::Success) {
      const double shift = 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
      Matrix Ms = M;
      Ms.diagonal().array() += shift;
      schur.compute(Ms);
      if (schur.info() != Eigen::Success) {
        schur_ldlt.compute(M);
        use_ldlt = true;
      }
    }

    auto direction = [&](double sigma_mu, const Direction* aff) {
      Direction dir;
      std::vector<Matrix> Q(np);
      std::vector<Matrix> corr(np);
      for (int j = 0; j < np; ++j) {
        Q[j] = it.X[j] - sigma_mu * W[j] + it.X[j] * Rd[j] * W[j];
        if (aff) {
          corr[j] = aff->dX[j] * aff->dZ[j] * W[j];
          Q[j] += corr[j];
        }
      }
      Vector corr_lp;
      Vector q = it.x - sigma_mu * it.z.cwiseInverse() + it.x.cwiseProduct(rd_lp).cwiseQuotient(it.z);
      if (aff) {
        corr_lp = aff->dx.cwiseProduct(aff->dz).cwiseQuotient(it.z);
        q += corr_lp;
      }
      const Vector rhs = Rp + apply_A(d, Q, q);
      dir.dy = use_ldlt ? Vector(schur_ldlt.solve(rhs)) : Vector(schur.solve(rhs));
      std::vector<Matrix> Ady;
      Vector Ady_lp;
      apply_At(d, dir.dy, Ady, Ady_lp);
      dir.dZ.resize(np);
      dir.dX.resize(np);
      for (int j = 0; j < np; ++j) {
        dir.dZ[j] = Rd[j] - Ady[j];
        Matrix dX = sigma_mu * W[j] - it.X[j] - it.X[j] * dir.dZ[j] * W[j];
        if (aff) dX -= corr[j];
        dir.dX[j] = 0.5 * (dX + dX.transpose());
      }
      dir.dz = rd_lp - Ady_lp;
      dir.dx = sigma_mu * it.z.cwiseInverse() - it.x - it.x.cwiseProduct(dir.dz).cwiseQuotient(it.z);
      if (aff) dir.dx -= corr_lp;
      return dir;
    };
    auto step_lengths = [&](const Direction& dir, double& ap, double& ad) {
      ap = max_step_lp(it.x, dir.dx);
      ad = max_step_lp(it.z, dir.dz);
      for (int j = 0; j < np; ++j) {
        ap = std::min(ap, max_step_psd(it.X[j], dir.dX[j]));
        ad = std::min(ad, max_step_psd(it.Z[j], dir.dZ[j]));
      }
    };

    const Direction aff = direction(0.0, nullptr);
    double ap, ad;
    step_lengths(aff, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double xz_aff = (it.x + ap * aff.dx).dot(it.z + ad * aff.dz);
    for (int j = 0; j < np; ++j)
      xz_aff += inner(it.X[j] + ap * aff.dX[j], it.Z[j] + ad * aff.dZ[j]);
    const double mu_aff = std::max(0.0, xz_aff / n_total);
    const double expon = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    const double sigma = std::min(1.0, std::pow(mu_aff / mu, expon));
    const double gamma = 0.9 + 0.09 * std::min(ap, ad);

    const Direction dir = direction(sigma * mu, &aff);
    step_lengths(dir, ap, ad);
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (!dir.dy.allFinite()) {
      message = "non-finite search direction";
      break;
    }
    if (std::max(ap, ad) < 1e-10) {
      message = "step length too small";
      break;
    }
    for (int j = 0; j < np; ++j) {
      it.X[j] += ap * dir.dX[j];
      it.Z[j] += ad * dir.dZ[j];
    }
    it.x += ap * dir.dx;
    it.z += ad * dir.dz;
    it.y += ad * dir.dy;
  }

  SdpSolution sol = best;
  if (final_status == SdpStatus::kPrimalInfeasible || final_status == SdpStatus::kDualInfeasible) {
    sol.status = final_status;
    sol.iterations = iter;
  } else if (best_measure <= opt.tol) {
    sol.status = SdpStatus::kOptimal;
  } else if (best_measure <= opt.accept_tol) {
    sol.status = SdpStatus::kOptimal;
    if (message.empty()) message = "reduced accuracy";
    message += " (best residual " + std::to_string(best_measure) + ")";
  } else {
    sol.status = iter >= opt.max_iterations ? SdpStatus::kIterationLimit
                                            : SdpStatus::kNumericalTrouble;
  }
  sol.message = message;
  sol.y = best_it.y;
  sol.X.assign(sdp.blocks.size(), Matrix());
  sol.Z.assign(sdp.blocks.size(), Matrix());
  for (int j = 0; j < np; ++j) {
    sol.X[d.psd_block[j]] = best_it.X[j];
    sol.Z[d.psd_block[j]] = best_it.Z[j];
  }
  for (std::size_t j = 0; j < sdp.blocks.size(); ++j) {
    if (d.lp_offset[j] < 0) continue;
    const int n = -sdp.blocks[j];
    sol.X[j] = best_it.x.segment(d.lp_offset[j], n);
    sol.Z[j] = best_it.z.segment(d.lp_offset[j], n);
  }
  return sol;
}

namespace {

class InteriorPointBackend : public SdpBackend {
 public:
  std::string name() const override { return "ipm"; }
  SdpSolution solve(const BlockSdp& sdp, const SdpOptions& options) const override {
    return solve_block_sdp(sdp, options);
  }
};

}  // namespace

std::vector<std::string> available_backends() { return {"ipm"}; }

std::unique_ptr<SdpBackend> make_backend(const std::string& name) {
  std::string chosen = name;
  if (chosen.empty()) {
    const char* env = std::getenv("PEPKIT_SOLVER");
    chosen = (env && *env) ? env : "ipm";
  }
  if (chosen == "ipm") return std::make_unique<InteriorPointBackend>();
  std::string known;
  for (const auto& b : available_backends()) known += (known.empty() ? "" : ", ") + b;
  throw InvalidArgument("unknown solver backend '" + chosen + "' (available: " + known + ")");
}

}  // namespace pepkit
