#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "pepkit/analysis.hpp"
#include "pepkit/error.hpp"
#include "pepkit/interpolation.hpp"
#include "pepkit/pep.hpp"
#include "pepkit/sdpa.hpp"

using namespace pepkit;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Assemble, ConstraintCounts) {
  const FunctionClass cls(0.0, 1.0);
  const PepProblem p = assemble(cls, gm(1, 1.5), 1.0, CriterionKind::kFinalObjective);
  EXPECT_EQ(p.constraints.size(), 6u);  // ordered pairs of {0, 1, *}
  const ConicProgram cp = to_conic(p);
  EXPECT_EQ(cp.rows.size(), 7u);
  EXPECT_EQ(cp.rows.back().label, "radius");
  EXPECT_EQ(cp.num_free, 2);

  const PepProblem m = assemble(cls, gm(3, 1.0), 1.0, CriterionKind::kMinGradNormSq);
  const ConicProgram cm = to_conic(m);
  EXPECT_EQ(m.constraints.size(), 20u);
  EXPECT_EQ(cm.rows.size(), 20u + 1u + 4u);
  EXPECT_EQ(cm.num_free, 5);

  const PepProblem a = assemble(cls, gm(3, 1.0), 1.0, CriterionKind::kFinalObjective,
                                adjacent_pair);
  EXPECT_EQ(a.constraints.size(), 3u + 4u);
  EXPECT_TRUE(a.restricted);
}

TEST(Assemble, RejectsBadInput) {
  EXPECT_THROW(assemble(FunctionClass(0.0, kInfinity), gm(1, 1.0), 1.0,
                        CriterionKind::kFinalObjective),
               InvalidArgument);
  EXPECT_THROW(assemble(FunctionClass(0.0, 1.0), gm(1, 1.0), 0.0, CriterionKind::kFinalObjective),
               InvalidArgument);
  EXPECT_THROW(FunctionClass(1.0, 1.0), InvalidArgument);
}

// The constraint matrices encode the class inequality at the iterates.
TEST(Assemble, ConstraintMatchesSlack) {
  const FunctionClass cls(0.2, 1.7);
  const StepMatrix H = fgm(2, Sequence::kSecondary);
  const PepProblem p = assemble(cls, H, 1.0, CriterionKind::kFinalObjective);
  // Any Gram matrix and values: f_j - f_i + Tr(G A_ij) equals minus the slack of (i, j)
  // for triples built from P = [g_0 g_1 g_2 x_0].
  Matrix P(3, 4);
  P << 0.3, -1.0, 0.2, 0.7, 1.1, 0.4, -0.5, -0.2, 0.0, 0.9, 0.6, 1.3;
  const Vector f = (Vector(3) << 1.2, 0.5, 0.3).finished();
  const Matrix G = P.transpose() * P;
  auto triple = [&](int i) {
    if (i == kStar) return DataTriple{"*", Vector::Zero(3), Vector::Zero(3), 0.0};
    return DataTriple{std::to_string(i), P * selector_h(H, cls.L(), i), P * selector_u(2, i), f(i)};
  };
  for (const auto& c : p.constraints) {
    const double fi = c.i == kStar ? 0.0 : f(c.i), fj = c.j == kStar ? 0.0 : f(c.j);
    const double lhs = fj - fi + (G.array() * c.A.array()).sum();
    EXPECT_NEAR(lhs, -interpolation_slack(triple(c.i), triple(c.j), cls), 1e-12)
        << c.i << "," << c.j;
  }
}

TEST(Solve, GradientMethodOneStep) {
  const PepProblem p =
      assemble(FunctionClass(0.0, 1.0), gm(1, 1.5), 1.0, CriterionKind::kFinalObjective);
  const PepSolution s = solve(p);
  ASSERT_TRUE(s.optimal()) << s.message;
  EXPECT_NEAR(s.value, 0.125, 1e-8);
  EXPECT_NEAR(s.dual_value, 0.125, 1e-8);
  EXPECT_LT(s.max_violation, 1e-8);
}

TEST(Solve, StrongDualityAcrossMethods) {
  for (const auto& [H, mu] : std::vector<std::pair<StepMatrix, double>>{
           {gm(3, 1.2), 0.0}, {gm(2, 0.8), 0.1}, {fgm(3, Sequence::kPrimary), 0.0},
           {ogm(2, Sequence::kSecondary), 0.0}}) {
    for (auto kind : {CriterionKind::kFinalObjective, CriterionKind::kFinalGradNormSq,
                      CriterionKind::kFinalDistanceSq}) {
      const PepSolution s = solve(assemble(FunctionClass(mu, 1.0), H, 1.0, kind));
      ASSERT_TRUE(s.optimal()) << H.label() << " " << to_string(kind);
      EXPECT_NEAR(s.value, s.dual_value, 1e-7 * std::max(1.0, s.value));
    }
  }
}

TEST(Solve, HomogeneityInLAndR) {
  const StepMatrix H = gm(2, 1.0);
  const double unit =
      solve(assemble(FunctionClass(0.1, 1.0), H, 1.0, CriterionKind::kFinalObjective)).value;
  const double big =
      solve(assemble(FunctionClass(0.3, 3.0), H, 2.0, CriterionKind::kFinalObjective)).value;
  EXPECT_NEAR(rescale(unit, CriterionKind::kFinalObjective, 3.0, 2.0), big, 1e-6 * big);
}

TEST(Solve, ConjectureOnSmallGrid) {
  for (int N : {1, 2, 3})
    for (double h : {0.5, 1.0, 1.5})
      for (double kappa : {0.0, 0.1}) {
        const PepSolution s = solve(
            assemble(FunctionClass(kappa, 1.0), gm(N, h), 1.0, CriterionKind::kFinalObjective));
        ASSERT_TRUE(s.optimal());
        const double c = conj_gm_obj(N, h, kappa);
        EXPECT_NEAR(s.value, c, 1e-6 * c) << N << " " << h << " " << kappa;
      }
}

TEST(Solve, MinGradientNotAboveLastGradient) {
  const FunctionClass cls(0.0, 1.0);
  const StepMatrix H = gm(3, 1.0);
  const double last = solve(assemble(cls, H, 1.0, CriterionKind::kFinalGradNormSq)).value;
  const PepSolution best = solve(assemble(cls, H, 1.0, CriterionKind::kMinGradNormSq));
  ASSERT_TRUE(best.optimal());
  EXPECT_LE(best.value, last + 1e-8);
  EXPECT_EQ(best.nu.size(), 4);
}

TEST(BlockSdp, SmallProblem) {
  // min x11 + x22 s.t. x12 = 1, X psd: optimum 2 at X = [1 1; 1 1].
  BlockSdp sdp;
  sdp.blocks = {2};
  sdp.b = Vector::Constant(1, 1.0);
  sdp.C = {{0, 0, 0, 1.0}, {0, 1, 1, 1.0}};
  sdp.A = {{{0, 0, 1, 0.5}}};
  const SdpSolution s = solve_block_sdp(sdp);
  ASSERT_EQ(s.status, SdpStatus::kOptimal) << s.message;
  EXPECT_NEAR(s.primal_objective, 2.0, 1e-8);
  EXPECT_NEAR(s.dual_objective, 2.0, 1e-8);
}

TEST(BlockSdp, DetectsInfeasibility) {
  // x = -1 with x >= 0.
  BlockSdp p;
  p.blocks = {-1};
  p.b = Vector::Constant(1, -1.0);
  p.C = {{0, 0, 0, 1.0}};
  p.A = {{{0, 0, 0, 1.0}}};
  EXPECT_EQ(solve_block_sdp(p).status, SdpStatus::kPrimalInfeasible);

  // min -x1 s.t. x1 - x2 = 0: unbounded, so the dual is infeasible.
  BlockSdp d;
  d.blocks = {-2};
  d.b = Vector::Constant(1, 0.0);
  d.C = {{0, 0, 0, -1.0}};
  d.A = {{{0, 0, 0, 1.0}, {0, 1, 1, -1.0}}};
  EXPECT_EQ(solve_block_sdp(d).status, SdpStatus::kDualInfeasible);
}

TEST(BlockSdp, ValidateRejectsLowerTriangle) {
  BlockSdp p;
  p.blocks = {2};
  p.b = Vector::Constant(1, 1.0);
  p.A = {{{0, 1, 0, 1.0}}};
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(Sdpa, RoundTripPreservesProgram) {
  const PepProblem p = assemble(FunctionClass(0.1, 1.0), gm(2, 1.3), 1.0,
                                CriterionKind::kMinGradNormSq);
  const ConicProgram cp = to_conic(p);
  const std::string text = export_sdpa(cp);
  const ConicProgram back = import_sdpa(text);
  ASSERT_EQ(back.rows.size(), cp.rows.size());
  EXPECT_EQ(back.psd_order, cp.psd_order);
  EXPECT_EQ(back.num_free, cp.num_free);
  for (std::size_t r = 0; r < cp.rows.size(); ++r) {
    EXPECT_EQ(back.rows[r].label, cp.rows[r].label);
    EXPECT_EQ(back.rows[r].bound, cp.rows[r].bound);
    const Matrix a = sym_matrix(cp.psd_order, cp.rows[r].psd_coeffs);
    const Matrix b = sym_matrix(cp.psd_order, back.rows[r].psd_coeffs);
    EXPECT_EQ((a - b).norm(), 0.0) << r;
  }
  const ConicSolution s1 = solve_conic(cp), s2 = solve_conic(back);
  EXPECT_NEAR(s1.primal_value, s2.primal_value, 1e-9);
  // Parsing and writing again is a fixed point.
  EXPECT_EQ(write_sdpa(parse_sdpa(text)), text);
}

TEST(Sdpa, ToyFileSolves) {
  const SdpaProblem p = parse_sdpa(read_file(std::string(PEPKIT_TEST_DATA) + "/toy.dat-s"));
  EXPECT_EQ(p.m, 1);
  ASSERT_EQ(p.blocks.size(), 2u);
  EXPECT_EQ(p.blocks[1], -1);
  const SdpSolution s = solve_block_sdp(sdpa_to_block_sdp(p));
  ASSERT_EQ(s.status, SdpStatus::kOptimal);
  // max -(Y11 + Y22) with Y12 = 1: optimum -2.
  EXPECT_NEAR(-s.primal_objective, -2.0, 1e-8);
}

TEST(Sdpa, ParseErrorsCarryLineNumbers) {
  const auto line_of = [](const std::string& text) {
    try {
      parse_sdpa(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("\"c\n1\n1\n2\n1.0\n0 1 1 1 x\n"), 6);      // bad value
  EXPECT_EQ(line_of("1\n1\n2\n1.0\n0 2 1 1 1.0\n"), 5);          // block out of range
  EXPECT_EQ(line_of("1\n1\n2\n1.0\n0 1 3 1 1.0\n"), 5);          // index out of range
  EXPECT_EQ(line_of("1\n1\n-2\n1.0\n1 1 1 2 1.0\n"), 5);         // off-diagonal in diagonal block
  EXPECT_EQ(line_of("1\n1\n2\n"), 4);                            // missing c
  EXPECT_EQ(line_of("x\n"), 1);
}

TEST(Sdpa, ImportRejectsForeignLayout) {
  const std::string toy = read_file(std::string(PEPKIT_TEST_DATA) + "/toy.dat-s");
  EXPECT_THROW(import_sdpa(toy), ParseError);
}

TEST(Solve, ZeroStepMethod) {
  const PepProblem p = assemble(FunctionClass(0.0, 1.0), custom({}), 2.0,
                                CriterionKind::kFinalObjective);
  EXPECT_EQ(p.constraints.size(), 2u);
  EXPECT_EQ(to_conic(p).rows.size(), 3u);
  const PepSolution s = solve(p);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value, 0.5 * 4.0, 1e-8);  // L R^2 / 2
}
