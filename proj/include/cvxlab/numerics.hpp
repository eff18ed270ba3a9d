#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "cvxlab/common.hpp"

namespace cvxlab {

// Compensated accumulator.  Summation order is fixed by the caller, so
// results are reproducible run to run.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

struct PanelRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

// 32-point Gauss-Legendre rule, computed once by Newton iteration on the
// Legendre recurrence.
const PanelRule& gauss_legendre_32();

// Composite rule: [a,b] split into equal panels, 32 nodes each.
void composite_gauss_legendre(double a, double b, int panels,
                              std::vector<double>& nodes,
                              std::vector<double>& weights);

// Panel edges clustered toward both endpoints (cosine grading).  Used for
// integrals over (0,1) whose integrand steepens at the ends.
void graded_gauss_legendre(double a, double b, int panels,
                           std::vector<double>& nodes,
                           std::vector<double>& weights);

// Cumulative integral of uniform-grid samples, one entry per node starting
// at zero.  Third order closures at the ends, fourth order inside, with a
// trapezoid fallback whenever the high order increment loses positivity.
// Throws NumericalError if an increment still fails to be positive.
std::vector<double> cumulative_integral(double h, const std::vector<double>& f);

// f must change sign on [lo, hi].
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   int iters = 200);

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol);

// Monotone cubic Hermite interpolant (Fritsch-Carlson slope limiting).
// x strictly increasing; the limited slopes keep the interpolant monotone
// when the data is.
class MonotoneCubic {
 public:
  static MonotoneCubic fit(std::vector<double> x, std::vector<double> y,
                           std::vector<double> slopes);
  double operator()(double t) const;

 private:
  std::vector<double> x_, y_, d_;
};

double normal_cdf(double x);

// Upper end of the Wilson score interval for a binomial proportion.
double wilson_upper(std::size_t hits, std::size_t trials,
                    double z = 1.959963984540054);

// SplitMix64 step; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic uniform generator.  mt19937_64 output is pinned by the
// standard, and the 53-bit mapping avoids distribution-object variance
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  int uniform_int(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace cvxlab
