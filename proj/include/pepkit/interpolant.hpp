#pragma once

#include <string>

#include "pepkit/data_set.hpp"
#include "pepkit/function_class.hpp"
#include "pepkit/interpolation.hpp"

namespace pepkit {

// An explicit member of F_{mu,L}. For finite L it is
//   f(x) = sup_s [x's - max_i h_i(s)] + mu/2 |x|^2,
//   h_i(s) = ft_i + gt_i'(s - xt_i) + |s - xt_i|^2 / (2 (L - mu)),
// i.e. the conjugate of a maximum of quadratics plus the mu-quadratic, where
// (xt_i, gt_i, ft_i) are conjugate-space pieces. For L = inf it is a maximum
// of affine functions plus mu/2 |x|^2.
class InterpolantFunction {
 public:
  enum class Strategy { kExact1D, kHullProgram, kPiecewiseLinear };

  // Builds a function through the given data. Throws InvalidArgument when the
  // set is not F_{mu,L}-interpolable at tolerance tol.
  static InterpolantFunction build(const DataSet& set, const FunctionClass& cls,
                                   double tol = kDefaultInterpolationTol);

  // Arbitrary conjugate-space pieces (finite L) or affine pieces (x_i, g_i,
  // f_i) of the mu-subtracted function (L = inf). Any such collection
  // defines a member of the class.
  static InterpolantFunction from_pieces(const FunctionClass& cls, const DataSet& pieces);

  FunctionValue evaluate(const Vector& x) const;
  double value(const Vector& x) const { return evaluate(x).value; }

  const FunctionClass& function_class() const { return cls_; }
  const DataSet& pieces() const { return pieces_; }
  Strategy strategy() const { return strategy_; }
  int dimension() const { return pieces_.dimension(); }
  std::string strategy_name() const;

 private:
  InterpolantFunction(const FunctionClass& cls, DataSet pieces);

  Vector argmax_conjugate(const Vector& x) const;
  Vector solve_1d(double x) const;
  Vector solve_hull_program(const Vector& x) const;

  FunctionClass cls_;
  DataSet pieces_;
  Strategy strategy_;
  double c_ = 0.0;  // 1/(L - mu)
  // max_i h_i(s) = c/2 |s|^2 + max_i (ell_i's + beta_i)
  Matrix ell_;  // n x d
  Vector beta_;
  // 1-D upper envelope of the lines ell_i s + beta_i, slopes increasing.
  std::vector<int> envelope_;
  std::vector<double> breaks_;
};

}  // namespace pepkit
