#include "doctest.h"

#include <cmath>

#include "cvxlab/transport.hpp"
#include "oracles.hpp"

using namespace cvxlab;

namespace {

// density factor e^{m x - m^2/2}: tilts the standard gaussian to mean m
SmoothFunction gaussian_tilt(double m) {
  SmoothFunction f;
  f.dimension = 1;
  f.value = [m](const Vector& x) { return std::exp(m * x[0] - 0.5 * m * m); };
  f.gradient = [m](const Vector& x) {
    return Vector(scalar_vec(m * std::exp(m * x[0] - 0.5 * m * m)));
  };
  f.hessian = [m](const Vector& x) {
    return Matrix(Matrix::Constant(1, 1, m * m * std::exp(m * x[0] - 0.5 * m * m)));
  };
  return f;
}

}  // namespace

TEST_CASE("tangent gap cost is the squared distance for the quadratic potential") {
  Potential phi = Potential::gaussian(1);
  CHECK(bregman_cost(phi, 0.7, -1.1) == doctest::Approx(0.5 * 1.8 * 1.8).epsilon(1e-14));
  CHECK(bregman_cost(phi, 2.0, 2.0) == 0.0);
}

TEST_CASE("tangent gap cost is nonnegative and vanishes only on the diagonal") {
  Potential phi = Potential::polynomial({0.0, 0.0, 0.5, 0.0, 1.0 / 12.0});
  Rng rng(13);
  for (int k = 0; k < 100; ++k) {
    double x = rng.uniform(-3.0, 3.0);
    double y = rng.uniform(-3.0, 3.0);
    double c = bregman_cost(phi, x, y);
    CHECK(c >= 0.0);
    if (std::abs(x - y) > 0.1) CHECK(c > 0.0);
  }
  // matches the formula directly
  double x = 0.4, y = -1.2;
  double ref = phi.value(y) - phi.value(x) - (y - x) * phi.deriv(x);
  CHECK(bregman_cost(phi, x, y) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("transport instances renormalize the density factor") {
  Measure mu = Measure::build(Potential::gaussian(1), 1e-8);
  SmoothFunction f = gaussian_tilt(0.8);
  TransportInstance inst = make_transport_instance(mu, f);
  CHECK(std::abs(inst.raw_mass - 1.0) < 1e-7);
  double total = mu.integrate([&](const Vector& x) { return inst.density.value(x); });
  CHECK(std::abs(total - 1.0) < 1e-8);
}

TEST_CASE("transport instances reject negative or null densities") {
  Measure mu = Measure::build(Potential::gaussian(1), 1e-8);
  SmoothFunction neg = SmoothFunction::linear(scalar_vec(1.0));  // negative for x < 0
  CHECK_THROWS_AS(make_transport_instance(mu, neg), PreconditionError);
  SmoothFunction zero = SmoothFunction::zero(1);
  CHECK_THROWS_AS(make_transport_instance(mu, zero), PreconditionError);
}

TEST_CASE("monotone coupling cost of a mean shift is half the shift squared") {
  Measure mu = Measure::build(Potential::gaussian(1), 1e-8);
  TransportInstance inst = make_transport_instance(mu, gaussian_tilt(0.8));
  double gap = 0.0;
  double w = wasserstein_bregman_1d(mu, inst, &gap);
  CHECK(std::abs(w - 0.32) < 1e-6);
  CHECK(std::abs(gap) < 1e-8);
}

TEST_CASE("monotone coupling matches an assignment solver on quantile atoms") {
  Measure mu = Measure::build(Potential::gaussian(1), 1e-8);
  TransportInstance inst = make_transport_instance(mu, gaussian_tilt(0.8));
  const int n = 21;
  Potential phi = Potential::gaussian(1);
  // equal-mass atoms at mid-quantiles of source and target
  std::vector<double> src(n), dst(n);
  // rebuild the target quantile by monotone re-weighting of the table
  // through the measure's own cdf: F_target^{-1}(t) solved by bisection
  auto target_cdf = [&](double x) {
    return mu.integrate([&](const Vector& p) {
      return p[0] <= x ? inst.density.value(p) : 0.0;
    });
  };
  for (int i = 0; i < n; ++i) {
    double t = (i + 0.5) / n;
    dst[i] = mu.quantile(t);
    src[i] = bisect_root([&](double x) { return target_cdf(x) - t; }, -12.0, 12.0, 80);
  }
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost[i][j] = bregman_cost(phi, src[i], dst[j]);
  double assignment = oracle::hungarian_min_cost(cost);
  double monotone = 0.0;
  for (int i = 0; i < n; ++i) monotone += cost[i][i];
  CHECK(std::abs(assignment - monotone) < 1e-8);
}

TEST_CASE("transport bound is tight for mean shifts of the gaussian") {
  Measure mu = Measure::build(Potential::gaussian(1), 1e-8);
  TransportInstance inst = make_transport_instance(mu, gaussian_tilt(0.8));
  VerificationReport rep = verify_transport(mu, inst);
  CHECK(rep.name == "transport");
  CHECK(std::abs(rep.lhs - 0.32) < 1e-6);
  CHECK(std::abs(rep.rhs - 0.32) < 1e-6);
  CHECK(rep.status == Status::equality);
  CHECK(rep.meta.contains("cost_resolution_gap"));
}

TEST_CASE("transport bound holds with slack for bump tilts") {
  Measure mu = Measure::build(Potential::gaussian(1), 1e-8);
  SmoothFunction g = SmoothFunction::bump(0.5, 0.7, scalar_vec(0.6));
  SmoothFunction f;
  f.dimension = 1;
  f.value = [g](const Vector& x) { return std::exp(g.value(x)); };
  f.gradient = [g](const Vector& x) {
    return Vector(std::exp(g.value(x)) * g.gradient(x));
  };
  f.hessian = [g](const Vector& x) {
    double e = std::exp(g.value(x));
    Vector d = g.gradient(x);
    return Matrix(e * (g.hessian(x) + d * d.transpose()));
  };
  TransportInstance inst = make_transport_instance(mu, f);
  VerificationReport rep = verify_transport(mu, inst);
  CHECK(rep.status != Status::violated);
  CHECK(rep.lhs <= rep.rhs + rep.tolerance);
  CHECK(rep.lhs >= 0.0);
  CHECK(rep.rhs >= 0.0);
}

TEST_CASE("transport bound under the quartic tail measure") {
  Measure mu = Measure::build(Potential::polynomial({0.0, 0.0, 0.5, 0.0, 1.0 / 12.0}), 1e-8);
  SmoothFunction g = SmoothFunction::bump(0.4, 1.0, scalar_vec(-0.3));
  SmoothFunction f;
  f.dimension = 1;
  f.value = [g](const Vector& x) { return std::exp(g.value(x)); };
  f.gradient = [g](const Vector& x) {
    return Vector(std::exp(g.value(x)) * g.gradient(x));
  };
  f.hessian = [g](const Vector& x) {
    double e = std::exp(g.value(x));
    Vector d = g.gradient(x);
    return Matrix(e * (g.hessian(x) + d * d.transpose()));
  };
  TransportInstance inst = make_transport_instance(mu, f);
  VerificationReport rep = verify_transport(mu, inst);
  CHECK(rep.status != Status::violated);
}

TEST_CASE("identical source and target have zero cost and zero entropy") {
  Measure mu = Measure::build(Potential::gaussian(1), 1e-8);
  SmoothFunction one = SmoothFunction::constant(1, 1.0);
  one.dimension = 1;
  TransportInstance inst = make_transport_instance(mu, one);
  VerificationReport rep = verify_transport(mu, inst);
  CHECK(std::abs(rep.lhs) < 1e-9);
  CHECK(std::abs(rep.rhs) < 1e-9);
  CHECK(rep.status == Status::equality);
}
