#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pepkit/criterion.hpp"
#include "pepkit/error.hpp"
#include "pepkit/simulate.hpp"
#include "pepkit/step_matrix.hpp"
#include "test_support.hpp"

using namespace pepkit;

namespace {

// Runs H on 1/2 x'Qx.
std::vector<Vector> run_on_quadratic(const StepMatrix& H, const Matrix& Q, const Vector& x0,
                                     double L) {
  const auto t = simulate(
      H, [&Q](const Vector& x) { return FunctionValue{0.5 * x.dot(Q * x), Q * x}; }, x0, L);
  return t.x;
}

Matrix random_psd(std::mt19937_64& rng, int d, double L) {
  Matrix A(d, d);
  for (int i = 0; i < d; ++i) A.col(i) = test_support::random_vector(rng, d);
  Eigen::SelfAdjointEigenSolver<Matrix> es(A * A.transpose());
  Vector ev = es.eigenvalues();
  ev = ev / ev.maxCoeff() * L;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

TEST(StepMatrix, GradientMethodRows) {
  const StepMatrix H = gm(3, 1.5);
  EXPECT_EQ(H.N(), 3);
  for (int i = 1; i <= 3; ++i)
    for (int k = 0; k < 3; ++k) EXPECT_EQ(H(i, k), k < i ? 1.5 : 0.0);
  EXPECT_TRUE(H.flags().empty());
  EXPECT_TRUE(H.duality_gap_guarantee());
  EXPECT_FALSE(gm(2, 2.5).flags().empty());
  EXPECT_FALSE(gm(2, 0.0).duality_gap_guarantee());
}

TEST(StepMatrix, RejectsMalformedInput) {
  EXPECT_THROW(gm(0, 1.0), InvalidArgument);
  EXPECT_THROW(custom({{1.0, 2.0}, {1.0, 1.0}}), InvalidArgument);
  EXPECT_THROW(custom({{1.0}, {1.0, 1.0, 1.0}}), InvalidArgument);
  EXPECT_THROW(StepMatrix(Matrix::Zero(2, 3), "x"), InvalidArgument);
  EXPECT_THROW(mfgm(3), InvalidArgument);
}

TEST(StepMatrix, CompactAndPaddedRowsAgree) {
  const StepMatrix a = custom({{1.0}, {0.5, 1.2}});
  const StepMatrix b = custom({{1.0, 0.0}, {0.5, 1.2}});
  EXPECT_EQ((a.coefficients() - b.coefficients()).norm(), 0.0);
}

TEST(StepMatrix, JsonRoundTrip) {
  const StepMatrix H = ogm(4, Sequence::kPrimary);
  const StepMatrix back = StepMatrix::from_json(nlohmann::json::parse(H.to_json().dump()));
  EXPECT_EQ((back.coefficients() - H.coefficients()).norm(), 0.0);
  EXPECT_EQ(back.label(), "ogm");
  EXPECT_EQ(back.sequence(), Sequence::kPrimary);
}

TEST(StepMatrix, ThetaSequences) {
  const auto th = fgm_theta(2);
  EXPECT_DOUBLE_EQ(th[0], 1.0);
  EXPECT_NEAR(th[1], (1.0 + std::sqrt(5.0)) / 2.0, 1e-15);
  const auto to = ogm_theta(1);
  EXPECT_NEAR(to[1], 2.0, 1e-15);  // (1 + sqrt(9)) / 2
}

TEST(StepMatrix, SmallCases) {
  // FGM N=1: x_1 = y_1 = x_0 - g_0/L; OGM N=1 secondary: h = 1.5.
  EXPECT_NEAR(fgm(1, Sequence::kSecondary)(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(fgm(1, Sequence::kPrimary)(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(ogm(1, Sequence::kSecondary)(1, 0), 1.5, 1e-15);
}

// The coefficient tables reproduce the two-sequence recurrences.
TEST(StepMatrix, AcceleratedMatchesRecurrence) {
  std::mt19937_64 rng(1);
  const double L = 2.0;
  for (bool optimized : {false, true})
    for (bool primary : {false, true})
      for (int N : {1, 2, 5, 9}) {
        const Matrix Q = random_psd(rng, 3, L);
        const Vector x0 = test_support::random_vector(rng, 3);
        const Sequence seq = primary ? Sequence::kPrimary : Sequence::kSecondary;
        const StepMatrix H = optimized ? ogm(N, seq) : fgm(N, seq);
        const auto got = run_on_quadratic(H, Q, x0, L);
        const auto want = test_support::accelerated_run(Q, x0, N, L, optimized, primary);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i)
          EXPECT_LT((got[i] - want[i]).norm(), 1e-11 * (1.0 + want[i].norm()))
              << (optimized ? "ogm" : "fgm") << " N=" << N << " i=" << i;
      }
}

TEST(StepMatrix, ModifiedFastGradient) {
  std::mt19937_64 rng(2);
  const int N = 6, half = 3;
  const double L = 1.0;
  const Matrix Q = random_psd(rng, 2, L);
  const Vector x0 = test_support::random_vector(rng, 2);
  const auto xs = run_on_quadratic(mfgm(N), Q, x0, L);
  const auto fast = test_support::accelerated_run(Q, x0, half, L, false, true);
  for (int i = 0; i <= half; ++i) EXPECT_LT((xs[i] - fast[i]).norm(), 1e-12);
  for (int i = half + 1; i <= N; ++i)
    EXPECT_LT((xs[i] - (xs[i - 1] - Q * xs[i - 1] / L)).norm(), 1e-12) << i;
}

TEST(Simulate, GradientMethodContractsQuadratic) {
  const StepMatrix H = gm(4, 0.5);
  const Matrix Q = Matrix::Identity(1, 1);
  const auto xs = run_on_quadratic(H, Q, Vector::Constant(1, 1.0), 1.0);
  for (int i = 0; i <= 4; ++i) EXPECT_NEAR(xs[i](0), std::pow(0.5, i), 1e-15);
}

TEST(Simulate, SelectorsReproduceIterates) {
  std::mt19937_64 rng(3);
  const StepMatrix H = fgm(4, Sequence::kSecondary);
  const double L = 3.0;
  const Matrix Q = random_psd(rng, 2, L);
  const Vector x0 = test_support::random_vector(rng, 2);
  const auto t = simulate(
      H, [&Q](const Vector& x) { return FunctionValue{0.5 * x.dot(Q * x), Q * x}; }, x0, L);
  Matrix P(2, H.N() + 2);
  for (int i = 0; i <= H.N(); ++i) P.col(i) = t.g[i];
  P.col(H.N() + 1) = x0;
  for (int i = 0; i <= H.N(); ++i) {
    EXPECT_LT((P * selector_h(H, L, i) - t.x[i]).norm(), 1e-12);
    EXPECT_LT((P * selector_u(H.N(), i) - t.g[i]).norm(), 1e-15);
  }
  EXPECT_EQ(selector_h(H, L, kStar).norm(), 0.0);
}

TEST(Criterion, EvaluatesTrajectories) {
  const StepMatrix H = gm(2, 1.0);
  const auto t = simulate(
      H, [](const Vector& x) { return FunctionValue{0.5 * 4.0 * x.squaredNorm(), 4.0 * x}; },
      Vector::Constant(1, 1.0), 8.0);
  // x: 1, 0.5, 0.25; g: 4, 2, 1; f: 2, 0.5, 0.125
  const auto obj = PerformanceCriterion::make(CriterionKind::kFinalObjective, H, 8.0);
  const auto grad = PerformanceCriterion::make(CriterionKind::kFinalGradNormSq, H, 8.0);
  const auto dist = PerformanceCriterion::make(CriterionKind::kFinalDistanceSq, H, 8.0);
  const auto ming = PerformanceCriterion::make(CriterionKind::kMinGradNormSq, H, 8.0);
  const Vector zero = Vector::Zero(1);
  EXPECT_NEAR(evaluate_criterion(t, obj, zero, 0.0), 0.125, 1e-15);
  EXPECT_NEAR(evaluate_criterion(t, grad, zero, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(evaluate_criterion(t, dist, zero, 0.0), 0.0625, 1e-15);
  EXPECT_NEAR(evaluate_criterion(t, ming, zero, 0.0), 1.0, 1e-15);
  EXPECT_EQ(criterion_from_string("mingrad"), CriterionKind::kMinGradNormSq);
  EXPECT_THROW(criterion_from_string("best"), InvalidArgument);
}

TEST(Simulate, ZeroStepMethodStaysPut) {
  const StepMatrix H = custom({});
  EXPECT_EQ(H.N(), 0);
  const auto t = simulate(
      H, [](const Vector& x) { return FunctionValue{x.squaredNorm(), 2.0 * x}; },
      Vector::Constant(2, 1.0), 1.0);
  ASSERT_EQ(t.x.size(), 1u);
  EXPECT_DOUBLE_EQ(t.f[0], 2.0);
}
