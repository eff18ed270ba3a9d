#include "cvxlab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace cvxlab {

namespace {

PanelRule make_gl(int n) {
  PanelRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

}  // namespace

const PanelRule& gauss_legendre_32() {
  static const PanelRule rule = make_gl(32);
  return rule;
}

void composite_gauss_legendre(double a, double b, int panels,
                              std::vector<double>& nodes,
                              std::vector<double>& weights) {
  const PanelRule& rule = gauss_legendre_32();
  const int m = static_cast<int>(rule.nodes.size());
  nodes.resize(static_cast<std::size_t>(panels) * m);
  weights.resize(nodes.size());
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    double mid = lo + 0.5 * h;
    for (int i = 0; i < m; ++i) {
      nodes[static_cast<std::size_t>(p) * m + i] = mid + 0.5 * h * rule.nodes[i];
      weights[static_cast<std::size_t>(p) * m + i] = 0.5 * h * rule.weights[i];
    }
  }
}

void graded_gauss_legendre(double a, double b, int panels,
                           std::vector<double>& nodes,
                           std::vector<double>& weights) {
  const PanelRule& rule = gauss_legendre_32();
  const int m = static_cast<int>(rule.nodes.size());
  nodes.clear();
  weights.clear();
  nodes.reserve(static_cast<std::size_t>(panels) * m);
  weights.reserve(static_cast<std::size_t>(panels) * m);
  for (int p = 0; p < panels; ++p) {
    double u0 = 0.5 * (1.0 - std::cos(M_PI * p / panels));
    double u1 = 0.5 * (1.0 - std::cos(M_PI * (p + 1) / panels));
    double lo = a + (b - a) * u0;
    double hi = a + (b - a) * u1;
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < m; ++i) {
      nodes.push_back(mid + half * rule.nodes[i]);
      weights.push_back(half * rule.weights[i]);
    }
  }
}

std::vector<double> cumulative_integral(double h, const std::vector<double>& f) {
  if (f.size() < 4) throw PreconditionError("cumulative integral needs at least 4 samples");
  if (!(h > 0.0)) throw PreconditionError("grid spacing must be positive");
  const std::size_t n = f.size();
  std::vector<double> cum(n);
  cum[0] = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double inc;
    if (k == 0)
      inc = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    else if (k + 2 >= n)
      inc = h / 12.0 * (-f[n - 3] + 8.0 * f[n - 2] + 5.0 * f[n - 1]);
    else
      inc = h / 24.0 * (-f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2]);
    if (!(inc > 0.0)) inc = 0.5 * h * (f[k] + f[k + 1]);
    if (!(inc > 0.0)) throw NumericalError("cumulative integral increment vanished");
    cum[k + 1] = cum[k] + inc;
  }
  return cum;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   int iters) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw NumericalError("bisect_root: no sign change on bracket");
  for (int i = 0; i < iters; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (fhi > 0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

MonotoneCubic MonotoneCubic::fit(std::vector<double> x, std::vector<double> y,
                                 std::vector<double> slopes) {
  MonotoneCubic mc;
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || slopes.size() != n)
    throw std::invalid_argument("MonotoneCubic: inconsistent sizes");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(x[i + 1] > x[i]))
      throw std::invalid_argument("MonotoneCubic: abscissas not increasing");
  // Fritsch-Carlson limiter, assuming non-decreasing data.
  for (std::size_t i = 0; i < n; ++i) {
    double dl = (i > 0) ? (y[i] - y[i - 1]) / (x[i] - x[i - 1]) : kInf;
    double dr = (i + 1 < n) ? (y[i + 1] - y[i]) / (x[i + 1] - x[i]) : kInf;
    double cap = 3.0 * std::min(dl, dr);
    slopes[i] = std::clamp(slopes[i], 0.0, std::max(cap, 0.0));
  }
  mc.x_ = std::move(x);
  mc.y_ = std::move(y);
  mc.d_ = std::move(slopes);
  return mc;
}

double MonotoneCubic::operator()(double t) const {
  if (t <= x_.front()) return y_.front();
  if (t >= x_.back()) return y_.back();
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
  double h = x_[k + 1] - x_[k];
  double s = (t - x_[k]) / h;
  double s2 = s * s, s3 = s2 * s;
  double h00 = 2 * s3 - 3 * s2 + 1;
  double h10 = s3 - 2 * s2 + s;
  double h01 = -2 * s3 + 3 * s2;
  double h11 = s3 - s2;
  return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double wilson_upper(std::size_t hits, std::size_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_upper: no trials");
  double n = static_cast<double>(trials);
  double p = static_cast<double>(hits) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = p + z2 / (2.0 * n);
  double rad = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::min(1.0, (center + rad) / denom);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cvxlab
