#pragma once

#include <vector>

#include "cvxlab/common.hpp"
#include "cvxlab/grid_function.hpp"
#include "cvxlab/potential.hpp"

namespace cvxlab {

struct ConjugateResult {
  double value = 0.0;   // phi*(y), computed as y.dot(argmax) - phi(argmax)
  Vector argmax;        // the maximizer, solves grad phi = y
  int newton_iters = 0;
  double residual = 0.0;  // ||grad phi(argmax) - y||
};

// (grad phi)^{-1}(y) by damped Newton on ||grad phi(x) - y||^2.
// Residual tolerance 1e-10 * (1 + ||y||), at most 100 iterations.
Vector grad_inverse(const Potential& phi, const Vector& y);
double grad_inverse(const Potential& phi, double y);

ConjugateResult conjugate_at(const Potential& phi, const Vector& y);
ConjugateResult conjugate_at(const Potential& phi, double y);

// Discrete conjugate max_i { y_j x_i - f(x_i) } on a uniform dual grid,
// linear time via the lower convex hull of the samples.  Ties go to the
// smaller abscissa so results match the brute-force scan exactly.
GridFunction1D llt_1d(const GridFunction1D& f, double dual_lo, double dual_hi,
                      std::size_t dual_count);

struct SupConvResult {
  double value = 0.0;  // g_s(z)
  Vector argmax_y;
  int newton_iters = 0;
  bool newton_ok = true;  // false if the grid fallback produced the answer
};

// g_s(z) = phi(z) + max_y { g(x(y)) - t phi(x(y)) - s phi(y) } with
// x(y) = (z - s y)/t, t = 1 - s.  Newton on the stationarity condition
// grad phi(y) = grad phi(x) - grad g(x)/t, seeded at
// y0 = (grad phi)^{-1}(grad phi(z) - grad g(z)).
SupConvResult sup_convolution(const SmoothFunction& g, const Potential& phi,
                              double s, const Vector& z);

struct ExpansionFit {
  double m = 0.0;      // limit of (g_s(z) - g(z))/s as s -> 0
  double kappa = 0.0;  // fitted order of the residual D(s) - m ~ s^kappa
  std::vector<double> d_values;
};

// Fits D(s) = m + beta s^kappa over a decreasing geometric ladder of s.
ExpansionFit expansion_order(const SmoothFunction& g, const Potential& phi,
                             const Vector& z, const std::vector<double>& s_ladder);

}  // namespace cvxlab
