// Slow reference implementations the tests compare the library against:
// grid scans for conjugates and sup-convolutions, an assignment solver for
// small optimal transport instances, and finite difference consistency
// checks for the smooth function oracles.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "cvxlab/conjugate.hpp"
#include "cvxlab/numerics.hpp"
#include "cvxlab/potential.hpp"

namespace oracle {

// Grid scan of y x - phi(x) followed by golden section refinement in the
// winning cell.  Accuracy ~ phi'' * cell^2 after refinement.
inline double brute_conjugate(const cvxlab::Potential& phi, double y, double lo,
                              double hi, int n) {
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < n; ++i) {
    double x = lo + (hi - lo) * i / (n - 1);
    double v = y * x - phi.value(x);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double h = (hi - lo) / (n - 1);
  double a = lo + h * std::max(0, best_i - 1);
  double b = lo + h * std::min(n - 1, best_i + 1);
  double xm = cvxlab::golden_min([&](double x) { return phi.value(x) - y * x; }, a, b, 1e-13);
  return y * xm - phi.value(xm);
}

// Direct scan over the decomposition point y of
// phi(z) + g(x) - (1-s) phi(x) - s phi(y), x = (z - s y)/(1 - s).
inline double brute_sup_conv(const cvxlab::SmoothFunction& g,
                             const cvxlab::Potential& phi, double s, double z,
                             double lo, double hi, int n) {
  double t = 1.0 - s;
  auto obj = [&](double y) {
    double x = (z - s * y) / t;
    return g(x) - t * phi.value(x) - s * phi.value(y);
  };
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < n; ++i) {
    double y = lo + (hi - lo) * i / (n - 1);
    double v = obj(y);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double h = (hi - lo) / (n - 1);
  double a = lo + h * std::max(0, best_i - 1);
  double b = lo + h * std::min(n - 1, best_i + 1);
  double ym = cvxlab::golden_min([&](double y) { return -obj(y); }, a, b, 1e-12);
  return phi.value(z) + obj(ym);
}

// Minimum cost assignment on a square matrix by the O(n^3) shortest
// augmenting path method with dual potentials.
inline double hungarian_min_cost(const std::vector<std::vector<double>>& a) {
  const int n = static_cast<int>(a.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double cost = 0.0;
  for (int j = 1; j <= n; ++j) cost += a[p[j] - 1][j - 1];
  return cost;
}

// Largest absolute deviation between the empirical CDF of the samples and
// the model CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    worst = std::max(worst, std::abs(f - static_cast<double>(i) / n));
    worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return worst;
}

// Central difference check of the gradient oracle at x.
inline double gradient_gap(const std::function<double(const cvxlab::Vector&)>& f,
                           const std::function<cvxlab::Vector(const cvxlab::Vector&)>& grad,
                           const cvxlab::Vector& x, double h = 1e-5) {
  cvxlab::Vector g = grad(x);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    cvxlab::Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    worst = std::max(worst, std::abs((f(xp) - f(xm)) / (2.0 * h) - g[i]));
  }
  return worst;
}

inline double hessian_gap(const std::function<cvxlab::Vector(const cvxlab::Vector&)>& grad,
                          const std::function<cvxlab::Matrix(const cvxlab::Vector&)>& hess,
                          const cvxlab::Vector& x, double h = 1e-5) {
  cvxlab::Matrix H = hess(x);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    cvxlab::Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    cvxlab::Vector col = (grad(xp) - grad(xm)) / (2.0 * h);
    for (Eigen::Index j = 0; j < x.size(); ++j)
      worst = std::max(worst, std::abs(col[j] - H(j, i)));
  }
  return worst;
}

// Samples of a random piecewise linear convex function on a uniform grid:
// increasing slopes drawn from the generator, values by summation.
inline std::vector<double> random_convex_samples(cvxlab::Rng& rng, int count,
                                                 double h, double& max_slope) {
  std::vector<double> slopes(count - 1);
  double s = rng.uniform(-4.0, -2.0);
  for (int i = 0; i < count - 1; ++i) {
    s += rng.uniform(0.0, 8.0 / (count - 1));
    slopes[i] = s;
  }
  max_slope = std::max(std::abs(slopes.front()), std::abs(slopes.back()));
  std::vector<double> vals(count);
  vals[0] = rng.uniform(-1.0, 1.0);
  for (int i = 1; i < count; ++i) vals[i] = vals[i - 1] + h * slopes[i - 1];
  return vals;
}

}  // namespace oracle
