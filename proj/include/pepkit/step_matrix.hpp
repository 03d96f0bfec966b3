#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pepkit/data_set.hpp"

namespace pepkit {

// Primary: the y-iterates of two-sequence methods (function values are
// guaranteed there). Secondary: the x-iterates where gradients are taken.
enum class Sequence { kPrimary, kSecondary };

std::string to_string(Sequence s);
Sequence sequence_from_string(const std::string& s);

// Normalized coefficients of a fixed-step method,
//   x_i = x_0 - sum_{k<i} h_{i,k}/L g_k,  i = 1..N.
// Row i of the stored N x N matrix holds h_{i,0..N-1}; entries k >= i are 0.
class StepMatrix {
 public:
  StepMatrix() = default;
  StepMatrix(Matrix h, std::string label, Sequence sequence = Sequence::kSecondary);

  int N() const { return static_cast<int>(h_.rows()); }
  // h_{i,k} with 1 <= i <= N, 0 <= k < N; zero for k >= i.
  double operator()(int i, int k) const { return h_(i - 1, k); }
  const Matrix& coefficients() const { return h_; }
  const std::string& label() const { return label_; }
  Sequence sequence() const { return sequence_; }

  // True iff h_{i,i-1} != 0 for every i (zero duality gap guarantee).
  bool duality_gap_guarantee() const;
  // Diagnostics that do not prevent use, e.g. GM steps outside (0, 2).
  const std::vector<std::string>& flags() const { return flags_; }
  void add_flag(std::string f) { flags_.push_back(std::move(f)); }

  nlohmann::json to_json() const;
  static StepMatrix from_json(const nlohmann::json& j);

 private:
  Matrix h_;
  std::string label_ = "custom";
  Sequence sequence_ = Sequence::kSecondary;
  std::vector<std::string> flags_;
};

// theta_0 = 1, theta_{i+1} = (1 + sqrt(4 theta_i^2 + 1))/2.
std::vector<double> fgm_theta(int N);
// As fgm_theta, but the last step uses (1 + sqrt(8 theta^2 + 1))/2.
std::vector<double> ogm_theta(int N);

StepMatrix gm(int N, double h);
StepMatrix fgm(int N, Sequence sequence);
StepMatrix ogm(int N, Sequence sequence);
// N/2 primary-sequence FGM steps followed by N/2 gradient steps with h = 1.
StepMatrix mfgm(int N);
// Rows may be compact (row i has i entries) or padded to N entries.
StepMatrix custom(const std::vector<std::vector<double>>& rows,
                  const std::string& label = "custom",
                  Sequence sequence = Sequence::kSecondary);

}  // namespace pepkit
