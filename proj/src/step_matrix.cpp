#include "pepkit/step_matrix.hpp"

#include <cmath>

#include "pepkit/error.hpp"

namespace pepkit {

std::string to_string(Sequence s) {
  return s == Sequence::kPrimary ? "primary" : "secondary";
}

Sequence sequence_from_string(const std::string& s) {
  if (s == "primary") return Sequence::kPrimary;
  if (s == "secondary") return Sequence::kSecondary;
  throw InvalidArgument("unknown sequence '" + s + "'");
}

StepMatrix::StepMatrix(Matrix h, std::string label, Sequence sequence)
    : h_(std::move(h)), label_(std::move(label)), sequence_(sequence) {
  if (h_.rows() != h_.cols()) throw InvalidArgument("step matrix must be square");
  if (!h_.allFinite()) throw InvalidArgument("step matrix has non-finite entries");
  for (int r = 0; r < h_.rows(); ++r)
    for (int k = r + 1; k < h_.cols(); ++k)
      if (h_(r, k) != 0.0)
        throw InvalidArgument("step matrix is not lower triangular: h_{" +
                              std::to_string(r + 1) + "," + std::to_string(k) + "} != 0");
}

bool StepMatrix::duality_gap_guarantee() const {
  for (int r = 0; r < h_.rows(); ++r)
    if (h_(r, r) == 0.0) return false;
  return true;
}

nlohmann::json StepMatrix::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < N(); ++r) {
    std::vector<double> row;
    for (int k = 0; k <= r; ++k) row.push_back(h_(r, k));
    rows.push_back(row);
  }
  return {{"N", N()}, {"rows", rows}, {"label", label_}, {"sequence", to_string(sequence_)}};
}

StepMatrix StepMatrix::from_json(const nlohmann::json& j) {
  try {
    auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
    const std::string label = j.value("label", std::string("custom"));
    const Sequence seq = sequence_from_string(j.value("sequence", std::string("secondary")));
    StepMatrix m = custom(rows, label, seq);
    if (j.contains("N") && j["N"].get<int>() != m.N())
      throw InvalidArgument("'N' does not match the number of rows");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed step matrix: ") + e.what());
  }
}

std::vector<double> fgm_theta(int N) {
  std::vector<double> th{1.0};
  for (int i = 0; i < N; ++i) th.push_back((1.0 + std::sqrt(4.0 * th[i] * th[i] + 1.0)) / 2.0);
  return th;
}

std::vector<double> ogm_theta(int N) {
  std::vector<double> th = fgm_theta(N);
  if (N >= 1) th[N] = (1.0 + std::sqrt(8.0 * th[N - 1] * th[N - 1] + 1.0)) / 2.0;
  return th;
}

StepMatrix gm(int N, double h) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  if (!std::isfinite(h)) throw InvalidArgument("step size must be finite");
  Matrix H = Matrix::Zero(N, N);
  for (int r = 0; r < N; ++r) H.row(r).head(r + 1).setConstant(h);
  StepMatrix m(H, "gm", Sequence::kSecondary);
  if (!(h > 0.0 && h < 2.0)) m.add_flag("step size outside (0, 2)");
  return m;
}

namespace {

// Rows 0..N of the (N+1) x (N+1) table, row i+1 built from rows i and i-1.
StepMatrix accelerated(int N, Sequence sequence, bool optimized) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  const std::vector<double> th = optimized ? ogm_theta(N) : fgm_theta(N);
  Matrix T = Matrix::Zero(N + 1, N + 1);
  for (int i = 0; i < N; ++i) {
    const double mom = (th[i] - 1.0) / th[i + 1];
    for (int k = 0; k <= i; ++k) {
      if (k <= i - 2)
        T(i + 1, k) = T(i, k) + mom * (T(i, k) - T(i - 1, k));
      else if (k == i - 1)
        T(i + 1, k) = T(i, k) + mom * (T(i, k) - 1.0);
      else
        T(i + 1, k) = (optimized ? 2.0 * th[i] - 1.0 : th[i] - 1.0) / th[i + 1] + 1.0;
    }
  }
  if (sequence == Sequence::kPrimary) {
    T.row(N).setZero();
    T.row(N).head(N - 1) = T.row(N - 1).head(N - 1);
    T(N, N - 1) = 1.0;
  }
  return StepMatrix(T.bottomLeftCorner(N, N), optimized ? "ogm" : "fgm", sequence);
}

}  // namespace

StepMatrix fgm(int N, Sequence sequence) { return accelerated(N, sequence, false); }
StepMatrix ogm(int N, Sequence sequence) { return accelerated(N, sequence, true); }

StepMatrix mfgm(int N) {
  if (N < 2 || N % 2 != 0) throw InvalidArgument("mfgm needs an even N >= 2");
  const int half = N / 2;
  const StepMatrix first = fgm(half, Sequence::kPrimary);
  Matrix H = Matrix::Zero(N, N);
  H.topLeftCorner(half, half) = first.coefficients();
  // Gradient steps start from the last primary iterate y_{N/2}.
  for (int r = half; r < N; ++r) {
    H.row(r).head(half) = first.coefficients().row(half - 1);
    for (int k = half; k <= r; ++k) H(r, k) = 1.0;
  }
  return StepMatrix(H, "mfgm", Sequence::kPrimary);
}

StepMatrix custom(const std::vector<std::vector<double>>& rows, const std::string& label,
                  Sequence sequence) {
  const int N = static_cast<int>(rows.size());  // N = 0: the method that takes no step
  Matrix H = Matrix::Zero(N, N);
  for (int r = 0; r < N; ++r) {
    const auto& row = rows[r];
    if (static_cast<int>(row.size()) != r + 1 && static_cast<int>(row.size()) != N)
      throw InvalidArgument("row " + std::to_string(r + 1) + " has " +
                            std::to_string(row.size()) + " entries, expected " +
                            std::to_string(r + 1) + " or " + std::to_string(N));
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (static_cast<int>(k) > r && row[k] != 0.0)
        throw InvalidArgument("step matrix is not lower triangular at row " +
                              std::to_string(r + 1));
      H(r, static_cast<int>(k)) = row[k];
    }
  }
  return StepMatrix(H, label, sequence);
}

}  // namespace pepkit
