#include "cvxlab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "cvxlab/numerics.hpp"

namespace cvxlab {

double ConcentrationBound::operator()(double lambda, int n) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw PreconditionError("deviation level must be finite and nonnegative");
  if (n < 1) throw PreconditionError("product dimension must be positive");
  double nn = static_cast<double>(n);
  if (lambda > nn * C3) {
    if (!cost) throw PreconditionError("cost branch requested without a cost function");
    return 2.0 * std::exp(-nn * C1 * cost(C2 * lambda / nn));
  }
  return 2.0 * std::exp(-C1 * lambda * lambda / nn);
}

ConcentrationBound calibrate_constants(const HPhiProfile& profile, double B) {
  if (!(B >= 1.0))
    throw PreconditionError("upper growth exponent must be at least 1");
  if (!(profile.lambda > 0.0))
    throw PreconditionError("profile curvature must be positive");
  ConcentrationBound b;
  b.C1 = profile.lambda / 8.0;
  b.C2 = 1.0 / (2.0 * B);
  Potential p0 = profile.shiftless;
  b.cost = [p0](double v) { return p0.value(v); };
  // Crossover where the branches agree: cost(C2 v) = v^2.  Near zero the
  // cost is ~ lambda (C2 v)^2 / 2 < v^2; superlinear growth wins far out.
  double c2 = b.C2;
  auto gap = [&](double v) { return p0.value(c2 * v) - v * v; };
  double lo = 1e-3;
  if (!(gap(lo) < 0.0))
    throw NumericalError("branch crossover bracket failed near zero");
  double hi = 1.0;
  while (gap(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e9) throw NumericalError("no branch crossover below 1e9");
  }
  b.C3 = bisect_root(gap, lo, hi, 200);
  return b;
}

ConcentrationBound gross_bound(double curvature) {
  if (!(curvature > 0.0))
    throw PreconditionError("curvature must be positive");
  ConcentrationBound b;
  b.C1 = curvature / 8.0;
  b.C2 = 0.0;
  b.C3 = kInf;
  return b;
}

namespace {

std::uint64_t substream(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  return splitmix64(state);
}

double sample_mean(const std::vector<std::vector<double>>& coords,
                   const std::function<double(const Vector&)>& F,
                   std::size_t samples, int n) {
  KahanSum s;
  Vector x(n);
  for (std::size_t j = 0; j < samples; ++j) {
    for (int d = 0; d < n; ++d) x[d] = coords[d][j];
    s.add(F(x));
  }
  return s.value() / static_cast<double>(samples);
}

}  // namespace

ConcentrationResult run_concentration(const Measure& mu,
                                      const std::function<double(const Vector&)>& F,
                                      int n, const ConcentrationBound& bound,
                                      const std::vector<double>& lambda_grid,
                                      std::size_t samples, std::uint64_t seed) {
  if (mu.dimension() != 1)
    throw PreconditionError("product sampling needs a one-dimensional factor");
  if (n < 1) throw PreconditionError("product dimension must be positive");
  if (samples < 100) throw PreconditionError("need at least 100 samples");
  if (lambda_grid.empty()) throw PreconditionError("deviation grid must be nonempty");
  for (double l : lambda_grid)
    if (!(l > 0.0) || !std::isfinite(l))
      throw PreconditionError("deviation grid entries must be positive");

  // 1-Lipschitz probe: central differences of every partial at random points.
  {
    Rng prng(substream(seed, 0xC0FFEEULL));
    Vector x(n), xp(n), xm(n);
    // The slack absorbs cancellation noise of order ulp(F)/h, which for a
    // sum of n coordinates near 3 reaches ~1e-10 at this step.
    const double h = 1e-4;
    for (int probe = 0; probe < 16; ++probe) {
      for (int d = 0; d < n; ++d) x[d] = prng.uniform(-3.0, 3.0);
      for (int d = 0; d < n; ++d) {
        xp = x;
        xm = x;
        xp[d] += h;
        xm[d] -= h;
        double slope = (F(xp) - F(xm)) / (2.0 * h);
        if (std::abs(slope) > 1.0 + 1e-6)
          throw PreconditionError("statistic must be 1-Lipschitz in every coordinate");
      }
    }
  }

  // Independent streams per coordinate; pilot streams interleave with the
  // main ones so adding coordinates never reshuffles existing draws.
  std::vector<std::vector<double>> main_coords(n), pilot_coords(n);
  for (int d = 0; d < n; ++d) {
    main_coords[d] = mu.sample_1d(samples, substream(seed, 2 * static_cast<std::uint64_t>(d)));
    pilot_coords[d] = mu.sample_1d(samples, substream(seed, 2 * static_cast<std::uint64_t>(d) + 1));
  }
  double center = sample_mean(pilot_coords, F, samples, n);

  std::vector<double> devs(samples);
  {
    Vector x(n);
    for (std::size_t j = 0; j < samples; ++j) {
      for (int d = 0; d < n; ++d) x[d] = main_coords[d][j];
      devs[j] = std::abs(F(x) - center);
    }
  }
  std::sort(devs.begin(), devs.end());

  ConcentrationResult out;
  out.n = n;
  out.samples = samples;
  out.seed = seed;
  out.pilot_mean = center;
  for (double lam : lambda_grid) {
    auto it = std::lower_bound(devs.begin(), devs.end(), lam);
    std::size_t hits = static_cast<std::size_t>(devs.end() - it);
    out.lambda.push_back(lam);
    out.empirical.push_back(static_cast<double>(hits) / static_cast<double>(samples));
    out.wilson_upper.push_back(wilson_upper(hits, samples));
    out.bound.push_back(bound(lam, n));
    out.regime.push_back(lam > static_cast<double>(n) * bound.C3 ? "cost" : "quadratic");
  }
  return out;
}

void write_csv(const ConcentrationResult& r, std::ostream& os) {
  os << "lambda,empirical,wilson_upper,bound,regime\n";
  char buf[128];
  for (std::size_t i = 0; i < r.lambda.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,", r.lambda[i],
                  r.empirical[i], r.wilson_upper[i], r.bound[i]);
    os << buf << r.regime[i] << "\n";
  }
}

}  // namespace cvxlab
