#include "cvxlab/conjugate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "cvxlab/numerics.hpp"

namespace cvxlab {
namespace {

constexpr int kMaxIters = 100;
constexpr double kArmijo = 1e-4;

struct SolveStats {
  int iters = 0;
};

Vector closed_form_inverse(const Potential& phi, const Vector& y, bool* found) {
  *found = true;
  if (phi.kind() == PotentialKind::gaussian) return y;
  if (phi.kind() == PotentialKind::power) {
    double p = phi.power_exponent();
    double r = y.norm();
    if (r == 0.0) return Vector::Zero(y.size());
    // |x|^{p-1} = |y| along the shared direction
    return std::pow(r, (2.0 - p) / (p - 1.0)) * y;
  }
  *found = false;
  return Vector();
}

// 1D gradients of the potentials here are continuous and increasing, so a
// doubling bracket plus bisection is unconditionally safe; Newton then
// polishes to full precision.
double inverse_1d(const Potential& phi, double y, SolveStats* stats) {
  auto f = [&](double x) { return phi.deriv(x) - y; };
  double lo = 0.0, hi = 0.0;
  double f0 = f(0.0);
  if (f0 == 0.0) return 0.0;
  double step = 1.0;
  if (f0 < 0.0) {
    hi = step;
    while (f(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12) throw NumericalError("gradient inversion bracket overflow");
    }
  } else {
    lo = -step;
    while (f(lo) > 0.0) {
      hi = lo;
      lo *= 2.0;
      if (lo < -1e12) throw NumericalError("gradient inversion bracket overflow");
    }
  }
  double a = lo, b = hi;
  for (int i = 0; i < 40; ++i) {
    double mid = 0.5 * (a + b);
    if (f(mid) < 0.0)
      a = mid;
    else
      b = mid;
  }
  double x = 0.5 * (a + b);
  double tol = 1e-10 * (1.0 + std::abs(y));
  for (int i = 0; i < kMaxIters; ++i) {
    double r = f(x);
    ++stats->iters;
    if (std::abs(r) <= 0.1 * tol) break;
    double h = phi.second_deriv(x);
    if (!(h > 0.0)) break;
    double nx = x - r / h;
    if (nx < a || nx > b) nx = 0.5 * (a + b);
    if (f(nx) < 0.0)
      a = std::max(a, nx);
    else
      b = std::min(b, nx);
    x = nx;
  }
  if (std::abs(f(x)) > tol) throw NumericalError("gradient inversion did not converge");
  return x;
}

Vector inverse_nd(const Potential& phi, const Vector& y, SolveStats* stats) {
  Vector x = Vector::Zero(y.size());
  double tol = 1e-10 * (1.0 + y.norm());
  auto merit = [&](const Vector& z) { return (phi.gradient(z) - y).squaredNorm(); };
  double fx = merit(x);
  for (int it = 0; it < kMaxIters; ++it) {
    ++stats->iters;
    Vector r = phi.gradient(x) - y;
    if (r.norm() <= tol) return x;
    Matrix H = phi.hessian(x);
    Vector d;
    double mu = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Matrix Hm = H + mu * Matrix::Identity(H.rows(), H.cols());
      Eigen::LDLT<Matrix> ldlt(Hm);
      if (ldlt.info() == Eigen::Success) {
        d = ldlt.solve(-r);
        if (d.allFinite() && -d.dot(r) > 0.0) break;
      }
      mu = (mu == 0.0) ? 1e-8 * (1.0 + H.cwiseAbs().maxCoeff()) : mu * 10.0;
      d.resize(0);
    }
    if (d.size() == 0) d = -r;  // steepest descent as a last resort
    double alpha = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vector xn = x + alpha * d;
      double fn = merit(xn);
      if (fn <= fx - kArmijo * alpha * fx) {
        x = xn;
        fx = fn;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  if ((phi.gradient(x) - y).norm() > tol)
    throw NumericalError("gradient inversion did not converge");
  return x;
}

Vector inverse_impl(const Potential& phi, const Vector& y, SolveStats* stats) {
  bool found = false;
  Vector x = closed_form_inverse(phi, y, &found);
  if (found) return x;
  if (phi.dimension() == 1) return scalar_vec(inverse_1d(phi, y[0], stats));
  return inverse_nd(phi, y, stats);
}

}  // namespace

Vector grad_inverse(const Potential& phi, const Vector& y) {
  if (y.size() != phi.dimension()) throw PreconditionError("gradient inversion dimension mismatch");
  if (!y.allFinite()) throw PreconditionError("gradient inversion needs finite input");
  SolveStats stats;
  return inverse_impl(phi, y, &stats);
}

double grad_inverse(const Potential& phi, double y) {
  return grad_inverse(phi, scalar_vec(y))[0];
}

ConjugateResult conjugate_at(const Potential& phi, const Vector& y) {
  if (y.size() != phi.dimension()) throw PreconditionError("conjugate dimension mismatch");
  if (!y.allFinite()) throw PreconditionError("conjugate needs finite input");
  SolveStats stats;
  ConjugateResult res;
  res.argmax = inverse_impl(phi, y, &stats);
  res.newton_iters = stats.iters;
  res.residual = (phi.gradient(res.argmax) - y).norm();
  // Even when the maximizer has a closed form the value goes through the
  // defining expression, so the reported triple stays self-consistent.
  res.value = y.dot(res.argmax) - phi.value(res.argmax);
  return res;
}

ConjugateResult conjugate_at(const Potential& phi, double y) {
  return conjugate_at(phi, scalar_vec(y));
}

GridFunction1D llt_1d(const GridFunction1D& f, double dual_lo, double dual_hi,
                      std::size_t dual_count) {
  std::vector<double> xs, vs;
  for (std::size_t i = f.finite_begin(); i < f.finite_end(); ++i) {
    xs.push_back(f.node(i));
    vs.push_back(f[i]);
  }
  if (xs.empty()) throw PreconditionError("discrete conjugate of an empty domain");

  // Lower convex hull of the samples; collinear points stay so that tie
  // handling matches the brute-force scan bit for bit.
  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
      double cross = (vs[b] - vs[a]) * (xs[k] - xs[a]) - (xs[b] - xs[a]) * (vs[k] - vs[a]);
      if (cross > 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(k);
  }

  std::vector<double> out(dual_count);
  std::size_t ptr = 0;
  for (std::size_t j = 0; j < dual_count; ++j) {
    double y = dual_lo + (dual_hi - dual_lo) * static_cast<double>(j) /
                             static_cast<double>(dual_count - 1);
    while (ptr + 1 < hull.size() &&
           y * xs[hull[ptr + 1]] - vs[hull[ptr + 1]] > y * xs[hull[ptr]] - vs[hull[ptr]])
      ++ptr;
    out[j] = y * xs[hull[ptr]] - vs[hull[ptr]];
  }
  return GridFunction1D(dual_lo, dual_hi, std::move(out));
}

namespace {

double supconv_objective(const SmoothFunction& g, const Potential& phi, double s,
                         const Vector& z, const Vector& y) {
  double t = 1.0 - s;
  Vector x = (z - s * y) / t;
  return g.value(x) - t * phi.value(x) - s * phi.value(y);
}

}  // namespace

SupConvResult sup_convolution(const SmoothFunction& g, const Potential& phi,
                              double s, const Vector& z) {
  if (!(s > 0.0 && s < 0.5)) throw PreconditionError("sup-convolution needs s in (0, 1/2)");
  if (z.size() != phi.dimension()) throw PreconditionError("sup-convolution dimension mismatch");
  double t = 1.0 - s;
  int dim = phi.dimension();

  Vector y0 = grad_inverse(phi, Vector(phi.gradient(z) - g.gradient(z)));

  auto residual = [&](const Vector& y) {
    Vector x = (z - s * y) / t;
    return Vector(g.gradient(x) - t * phi.gradient(x) + t * phi.gradient(y));
  };
  auto jacobian = [&](const Vector& y) {
    Vector x = (z - s * y) / t;
    Matrix J = -(s / t) * (g.hessian(x) - t * phi.hessian(x)) + t * phi.hessian(y);
    return J;
  };

  double tol = 1e-11 * (1.0 + phi.gradient(z).norm() + g.gradient(z).norm());
  Vector y = y0;
  double fy = residual(y).squaredNorm();
  SupConvResult res;
  bool converged = false;
  for (int it = 0; it < kMaxIters; ++it) {
    ++res.newton_iters;
    Vector r = residual(y);
    if (r.norm() <= tol) {
      converged = true;
      break;
    }
    Matrix J = jacobian(y);
    Vector d;
    double mu = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Matrix Jm = J + mu * Matrix::Identity(dim, dim);
      Eigen::FullPivLU<Matrix> lu(Jm);
      if (lu.isInvertible()) {
        d = lu.solve(-r);
        if (d.allFinite()) break;
      }
      mu = (mu == 0.0) ? 1e-8 * (1.0 + J.cwiseAbs().maxCoeff()) : mu * 10.0;
      d.resize(0);
    }
    if (d.size() == 0) break;
    double alpha = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vector yn = y + alpha * d;
      double fn = residual(yn).squaredNorm();
      if (fn <= fy - kArmijo * alpha * fy) {
        y = yn;
        fy = fn;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }

  Vector best_y = y;
  double best = supconv_objective(g, phi, s, z, y);
  // The decomposition x = y = z is always feasible, as is the s -> 0
  // stationary point; keeping them guards the g_s >= g invariant.
  const Vector* candidates[] = {&y0, &z};
  for (const Vector* cand : candidates) {
    double v = supconv_objective(g, phi, s, z, *cand);
    if (v > best) {
      best = v;
      best_y = *cand;
    }
  }

  if (!converged) {
    res.newton_ok = false;
    if (dim == 1) {
      double w = 10.0 * (1.0 + std::abs(z[0]));
      double glo = z[0] - w, ghi = z[0] + w;
      double coarse_best = best;
      double coarse_arg = best_y[0];
      for (int k = 0; k <= 2000; ++k) {
        double yy = glo + (ghi - glo) * static_cast<double>(k) / 2000.0;
        double v = supconv_objective(g, phi, s, z, scalar_vec(yy));
        if (v > coarse_best) {
          coarse_best = v;
          coarse_arg = yy;
        }
      }
      double h = (ghi - glo) / 2000.0;
      auto neg = [&](double yy) { return -supconv_objective(g, phi, s, z, scalar_vec(yy)); };
      double polished = golden_min(neg, coarse_arg - h, coarse_arg + h, 1e-12);
      if (-neg(polished) > best) {
        best = -neg(polished);
        best_y = scalar_vec(polished);
      }
    }
  } else {
    res.newton_ok = true;
  }

  res.argmax_y = best_y;
  res.value = phi.value(z) + best;
  return res;
}

ExpansionFit expansion_order(const SmoothFunction& g, const Potential& phi,
                             const Vector& z, const std::vector<double>& s_ladder) {
  if (s_ladder.size() < 2) throw PreconditionError("expansion fit needs at least 2 steps");
  for (std::size_t i = 1; i < s_ladder.size(); ++i)
    if (!(s_ladder[i] < s_ladder[i - 1]))
      throw PreconditionError("expansion ladder must decrease");

  ExpansionFit fit;
  double gz = g.value(z);
  for (double s : s_ladder)
    fit.d_values.push_back((sup_convolution(g, phi, s, z).value - gz) / s);

  std::size_t K = fit.d_values.size();
  double scale = 1.0 + std::abs(fit.d_values[0]);
  std::vector<double> deltas;
  for (std::size_t i = 0; i + 1 < K; ++i)
    deltas.push_back(fit.d_values[i] - fit.d_values[i + 1]);

  bool all_tiny = true;
  for (double d : deltas) all_tiny = all_tiny && std::abs(d) <= 1e-12 * scale;
  if (all_tiny) {
    fit.kappa = 1.0;
    fit.m = fit.d_values.back();
    return fit;
  }
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
    if (deltas[i] * deltas[i + 1] < 0.0 && std::abs(deltas[i]) > 1e-10 * scale &&
        std::abs(deltas[i + 1]) > 1e-10 * scale)
      throw NumericalError("expansion differences are not monotone");

  std::vector<double> kappas;
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i) {
    double rho = s_ladder[i] / s_ladder[i + 1];
    if (std::abs(deltas[i + 1]) > 1e-13 * scale && deltas[i] / deltas[i + 1] > 0.0)
      kappas.push_back(std::log(deltas[i] / deltas[i + 1]) / std::log(rho));
  }
  if (kappas.empty()) {
    fit.kappa = 1.0;
  } else {
    std::sort(kappas.begin(), kappas.end());
    fit.kappa = kappas[kappas.size() / 2];
  }

  // Tail of the geometric series beyond the finest step.
  double rho = s_ladder[K - 2] / s_ladder[K - 1];
  double decay = std::pow(rho, -fit.kappa);
  double tail = deltas.back() * decay / (1.0 - decay);
  fit.m = fit.d_values.back() - tail;
  return fit;
}

}  // namespace cvxlab
