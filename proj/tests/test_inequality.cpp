#include "doctest.h"

#include <cmath>

#include "cvxlab/inequality.hpp"
#include "oracles.hpp"

using namespace cvxlab;

namespace {

Potential quartic() { return Potential::polynomial({0.0, 0.0, 0.5, 0.0, 1.0 / 12.0}); }

const Measure& gaussian_measure() {
  static Measure mu = Measure::build(Potential::gaussian(1), 1e-8);
  return mu;
}

const Measure& quartic_measure() {
  static Measure mu = Measure::build(quartic(), 1e-8);
  return mu;
}

const Measure& power4_measure() {
  static Measure mu = Measure::build(Potential::power(4.0, 1), 1e-8);
  return mu;
}

}  // namespace

TEST_CASE("quadratic bracket collapses to half the squared displacement") {
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    Vector x = scalar_vec(rng.uniform(-5.0, 5.0));
    Vector v = scalar_vec(rng.uniform(-5.0, 5.0));
    CHECK(std::abs(gaussian_bracket_identity(x, v) - 0.5 * v.squaredNorm()) < 1e-12);
  }
  Vector x2(2), v2(2);
  x2 << 1.0, -2.0;
  v2 << 0.5, 0.25;
  CHECK(std::abs(gaussian_bracket_identity(x2, v2) - 0.5 * v2.squaredNorm()) < 1e-12);
}

TEST_CASE("bracket is nonnegative for convex potentials") {
  Rng rng(5);
  Potential phi = quartic();
  for (int k = 0; k < 100; ++k) {
    Vector x = scalar_vec(rng.uniform(-3.0, 3.0));
    Vector v = scalar_vec(rng.uniform(-3.0, 3.0));
    CHECK(mlsi_bracket(phi, x, v) >= -1e-10);
  }
  // zero displacement gives a zero bracket
  CHECK(std::abs(mlsi_bracket(phi, scalar_vec(1.2), scalar_vec(0.0))) < 1e-12);
}

TEST_CASE("entropy bound for linear tilts of the gaussian is tight") {
  for (double theta : {0.5, 1.0, 1.5}) {
    CAPTURE(theta);
    SmoothFunction g = SmoothFunction::linear(scalar_vec(theta));
    VerificationReport rep = verify_mlsi(gaussian_measure(), g);
    double ref = 0.5 * theta * theta * std::exp(0.5 * theta * theta);
    CHECK(std::abs(rep.lhs - ref) < 1e-7 * (1.0 + ref));
    CHECK(std::abs(rep.lhs - rep.rhs) <= 1e-6 * rep.rhs);
    CHECK(rep.status == Status::equality);
    CHECK(rep.name == "mlsi");
  }
}

TEST_CASE("entropy bound holds with slack for bump tilts") {
  SmoothFunction g = SmoothFunction::bump(0.4, 0.8, scalar_vec(0.5));
  for (const Measure* mu : {&gaussian_measure(), &quartic_measure(), &power4_measure()}) {
    VerificationReport rep = verify_mlsi(*mu, g);
    CHECK(rep.status != Status::violated);
    CHECK(rep.margin > -rep.tolerance);
    CHECK(rep.lhs >= 0.0);
    CHECK(rep.meta.contains("bracket_min"));
    CHECK(rep.meta.at("bracket_min").get<double>() >= -1e-9);
  }
}

TEST_CASE("variance bound is tight for linear functions under the gaussian") {
  SmoothFunction g = SmoothFunction::linear(scalar_vec(1.0));
  VerificationReport rep = verify_brascamp_lieb(gaussian_measure(), g);
  CHECK(std::abs(rep.lhs - 1.0) < 1e-7);
  CHECK(std::abs(rep.rhs - 1.0) < 1e-7);
  CHECK(rep.status == Status::equality);
}

TEST_CASE("variance bound holds for bumps under curved potentials") {
  SmoothFunction g = SmoothFunction::bump(0.5, 0.6, scalar_vec(-0.4));
  for (const Measure* mu : {&gaussian_measure(), &quartic_measure(), &power4_measure()}) {
    VerificationReport rep = verify_brascamp_lieb(*mu, g);
    CHECK(rep.status != Status::violated);
    CHECK(rep.name == "brascamp_lieb");
  }
}

TEST_CASE("power family entropy constant is one half at exponent two") {
  CHECK(std::abs(power_lsi_constant(2.0, 1) - 0.5) < 1e-8);
  CHECK(std::abs(power_lsi_constant(2.0, 2) - 0.5) < 1e-8);
}

TEST_CASE("power family verifier needs a power family measure") {
  SmoothFunction g = SmoothFunction::bump(0.3, 1.0, scalar_vec(0.2));
  VerificationReport rep = verify_power_lsi(gaussian_measure(), g);
  CHECK(rep.status != Status::violated);
  CHECK(rep.meta.contains("constant"));
  CHECK(rep.meta.contains("cross_check_min"));
  CHECK(rep.meta.at("cross_check_min").get<double>() >= -1e-9);
  CHECK_THROWS_WITH_AS(verify_power_lsi(quartic_measure(), g),
                       "measure does not come from a power family potential",
                       PreconditionError);
}

TEST_CASE("piecewise cost extraction reads curvature and growth off the quartic") {
  HPhiProfile prof = extract_hphi(quartic());
  CHECK(prof.lambda == 1.0);
  CHECK(prof.A == 3.0);
  CHECK(std::abs(prof.C - std::sqrt(6.0)) < 1e-12);
  CHECK(prof.coeff == doctest::Approx(6.0).epsilon(1e-12));
  // quadratic branch below the crossover
  CHECK(prof(1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(prof(-1.0) == doctest::Approx(0.5).epsilon(1e-12));
  // conjugate branch beyond it
  double y = 4.0;
  double ref = 6.0 * conjugate_at(quartic().without_shift(), 2.0).value;
  CHECK(prof(y) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("piecewise cost extraction rejects flat or bounded curvature") {
  CHECK_THROWS_WITH_AS(extract_hphi(Potential::gaussian(1)), "hess_unbounded=false",
                       PreconditionError);
  CHECK_THROWS_WITH_AS(extract_hphi(Potential::power(4.0, 1)),
                       "lambda=0: no curvature at the origin", PreconditionError);
  // odd part breaks the evenness probe
  CHECK_THROWS_AS(extract_hphi(Potential::polynomial({0.0, 0.5, 0.5, 0.0, 1.0 / 12.0})),
                  PreconditionError);
}

TEST_CASE("pointwise cost bound dominates the bracket on a coarse grid") {
  HPhiProfile prof = extract_hphi(quartic());
  std::vector<double> xs, ys;
  for (int i = 0; i <= 60; ++i) xs.push_back(-6.0 + 0.2 * i);
  ys = xs;
  VerificationReport rep = check_pointwise_bound(prof, quartic(), xs, ys);
  CHECK(rep.status != Status::violated);
  CHECK(rep.lhs <= 1e-9);
  CHECK(rep.meta.at("lambda").get<double>() == 1.0);
  CHECK(rep.meta.contains("intermediate_max_gap"));
}

TEST_CASE("piecewise cost entropy bound holds and dominates the sharp bound") {
  SmoothFunction g = SmoothFunction::bump(0.4, 0.9, scalar_vec(0.3));
  VerificationReport hp = verify_hphi_mlsi(quartic_measure(), g);
  CHECK(hp.status != Status::violated);
  CHECK(hp.name == "hphi");
  VerificationReport sharp = verify_mlsi(quartic_measure(), g);
  // same entropy on the left, a larger cost integral on the right
  CHECK(std::abs(hp.lhs - sharp.lhs) < 1e-9 * (1.0 + std::abs(hp.lhs)));
  CHECK(sharp.rhs <= hp.rhs * (1.0 + 1e-6) + 1e-9);
}

TEST_CASE("oscillation of the sine perturbation is twice its amplitude") {
  double osc = perturbation_oscillation(SmoothFunction::sine(1, 0.1), 8.0);
  CHECK(std::abs(osc - 0.2) < 5e-3);
  CHECK(perturbation_oscillation(SmoothFunction::constant(1, 3.0), 8.0) == 0.0);
}

TEST_CASE("perturbed entropy bound carries the oscillation factor") {
  SmoothFunction g = SmoothFunction::bump(0.4, 0.8, scalar_vec(-0.2));
  VerificationReport rep =
      verify_perturbed(Potential::gaussian(1), SmoothFunction::sine(1, 0.1), g, 1e-8);
  CHECK(rep.status != Status::violated);
  CHECK(rep.name == "perturbed");
  double osc = rep.meta.at("oscillation").get<double>();
  CHECK(std::abs(osc - 0.2) < 5e-3);
  // prebuilt-measure entry point gives the same numbers
  Measure::BuildOptions opt;
  opt.check_convexity = false;
  Measure mu = Measure::build(
      Potential::perturbed(Potential::gaussian(1), SmoothFunction::sine(1, 0.1)), 1e-8, opt);
  VerificationReport rep2 = verify_perturbed_with(mu, g);
  CHECK(rep2.lhs == doctest::Approx(rep.lhs).epsilon(1e-12));
  CHECK(rep2.rhs == doctest::Approx(rep.rhs).epsilon(1e-12));
}

TEST_CASE("perturbed bound rejects unbounded perturbations") {
  SmoothFunction growing;
  growing.dimension = 1;
  growing.value = [](const Vector& x) { return 0.01 * x[0] * x[0]; };
  growing.gradient = [](const Vector& x) { return Vector(0.02 * x); };
  growing.hessian = [](const Vector&) { return Matrix::Constant(1, 1, 0.02); };
  SmoothFunction g = SmoothFunction::bump(0.3, 1.0, scalar_vec(0.0));
  CHECK_THROWS_AS(verify_perturbed(Potential::gaussian(1), growing, g, 1e-6),
                  PreconditionError);
}

TEST_CASE("flat-space entropy bound is tight at the shifted potential") {
  Measure mu = Measure::build(Potential::gaussian(1), 1e-8);
  const Potential phi = mu.potential();  // normalized: unit total mass
  double xbar = 0.3;
  SmoothFunction g;
  g.dimension = 1;
  g.value = [phi, xbar](const Vector& x) { return -phi.value(scalar_vec(x[0] - xbar)); };
  g.gradient = [phi, xbar](const Vector& x) {
    return Vector(-phi.gradient(scalar_vec(x[0] - xbar)));
  };
  g.hessian = [phi, xbar](const Vector& x) {
    return Matrix(-phi.hessian(scalar_vec(x[0] - xbar)));
  };
  VerificationReport rep = verify_euclidean_lsi(phi, g, 1.0, 1e-8);
  CHECK(std::abs(rep.margin) <= 1e-6);
  CHECK(rep.status == Status::equality);
  CHECK(rep.name == "euclidean");
}

TEST_CASE("flat-space entropy bound requires a normalized potential") {
  SmoothFunction g = SmoothFunction::bump(0.3, 1.0, scalar_vec(0.0));
  CHECK_THROWS_AS(verify_euclidean_lsi(Potential::gaussian(1), g, 1.0, 1e-6),
                  PreconditionError);
}

TEST_CASE("scale-invariant entropy bound is tight at cost extremals") {
  Potential C = Potential::power(4.0, 1);
  double xbar = 0.2;
  for (double b : {1.0, 2.0}) {
    CAPTURE(b);
    SmoothFunction g;
    g.dimension = 1;
    g.value = [C, xbar, b](const Vector& x) { return -b * C.value(scalar_vec(x[0] - xbar)); };
    g.gradient = [C, xbar, b](const Vector& x) {
      return Vector(-b * C.gradient(scalar_vec(x[0] - xbar)));
    };
    g.hessian = [C, xbar, b](const Vector& x) {
      return Matrix(-b * C.hessian(scalar_vec(x[0] - xbar)));
    };
    VerificationReport rep = verify_homogeneous_elsi(C, 4.0, g, 1e-8);
    CHECK(std::abs(rep.margin) <= 1e-6);
    CHECK(rep.meta.at("lambda_scan_ok").get<bool>());
  }
}

TEST_CASE("scale-invariant bound rejects a mismatched homogeneity degree") {
  SmoothFunction g = SmoothFunction::bump(0.3, 1.0, scalar_vec(0.0));
  CHECK_THROWS_AS(verify_homogeneous_elsi(Potential::power(4.0, 1), 3.0, g, 1e-6),
                  PreconditionError);
  CHECK_THROWS_AS(verify_homogeneous_elsi(quartic(), 4.0, g, 1e-6), PreconditionError);
}

TEST_CASE("dual growth ratio of the gaussian matches one over one minus alpha") {
  for (double alpha : {0.05, 0.1, 0.2}) {
    CAPTURE(alpha);
    double psi = nontight_psi(gaussian_measure(), alpha);
    CHECK(std::abs(psi - 1.0 / (1.0 - alpha)) < 1e-6);
  }
}

TEST_CASE("defect constants for the gaussian sit on the expected ladder rung") {
  NontightConstants c = nontight_constants(gaussian_measure(), 1.0);
  CHECK(std::abs(c.lambda - 1.16) < 1e-12);
  CHECK(std::abs(c.lambda_star - 1.1565176427496657) < 1e-4);
  CHECK(c.alpha > 0.0);
  CHECK(c.alpha < 1.0);
  CHECK(c.C1 == doctest::Approx(4.0 * c.alpha).epsilon(1e-12));
  CHECK(c.C2 == doctest::Approx(1.0 / c.alpha).epsilon(1e-12));
  CHECK(c.C3 == 0.5);
  // feasibility condition that selected alpha
  double psi = nontight_psi(gaussian_measure(), c.alpha);
  CHECK((c.alpha + c.A * std::abs(psi - 1.0)) * c.lambda <= 0.5 + 1e-12);
}

TEST_CASE("defect entropy bound holds for bumps") {
  NontightConstants c = nontight_constants(gaussian_measure(), 1.0);
  for (double center : {-1.0, 0.0, 1.5}) {
    SmoothFunction g = SmoothFunction::bump(0.4, 0.8, scalar_vec(center));
    VerificationReport rep = verify_nontight(gaussian_measure(), g, c);
    CHECK(rep.status != Status::violated);
    CHECK(rep.name == "nontight");
  }
}

TEST_CASE("grid interpolation inequality accepts the log-concave self-triple") {
  Potential p0 = Potential::gaussian(1);
  GridFunction1D u = GridFunction1D::from_samples(
      [&](double x) { return std::exp(-p0.value(x)); }, -8.0, 8.0, 4097);
  VerificationReport rep = check_prekopa_leindler(u, u, u, 0.5);
  CHECK(rep.meta.at("hypothesis").get<std::string>() == "holds");
  CHECK(rep.status == Status::equality);
  CHECK(std::abs(rep.margin) <= 1e-6 * std::max(1.0, std::abs(rep.rhs)));
}

TEST_CASE("grid interpolation inequality accepts the box triple") {
  auto box = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
  GridFunction1D u = GridFunction1D::from_samples(box, -0.5, 1.5, 201);
  VerificationReport rep = check_prekopa_leindler(u, u, u, 0.5);
  CHECK(rep.meta.at("hypothesis").get<std::string>() == "holds");
  CHECK(rep.status != Status::violated);
}

TEST_CASE("grid interpolation inequality reports a witness for a broken triple") {
  auto box = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
  auto low = [&](double x) { return 0.5 * box(x); };
  GridFunction1D u = GridFunction1D::from_samples(box, -0.5, 1.5, 201);
  GridFunction1D w = GridFunction1D::from_samples(low, -0.5, 1.5, 201);
  VerificationReport rep = check_prekopa_leindler(u, u, w, 0.5);
  CHECK(rep.status == Status::violated);
  CHECK(rep.meta.at("status_detail").get<std::string>() == "violated-hypothesis");
  REQUIRE(rep.witness.has_value());
  double x = (*rep.witness)[0], y = (*rep.witness)[1];
  // the witness pair really breaks the hypothesis
  CHECK(w.interpolate(0.5 * x + 0.5 * y) <
        std::sqrt(u.interpolate(x) * u.interpolate(y)));
}

TEST_CASE("grid interpolation inequality validates its inputs") {
  auto one = [](double) { return 1.0; };
  GridFunction1D a = GridFunction1D::from_samples(one, 0.0, 1.0, 11);
  GridFunction1D b = GridFunction1D::from_samples(one, 0.0, 2.0, 11);
  GridFunction1D c = GridFunction1D::from_samples(one, 0.0, 1.0, 21);
  CHECK_THROWS_AS(check_prekopa_leindler(a, b, a, 0.5), PreconditionError);
  CHECK_THROWS_AS(check_prekopa_leindler(a, c, a, 0.5), PreconditionError);
  CHECK_THROWS_AS(check_prekopa_leindler(a, a, a, 0.0), PreconditionError);
  CHECK_THROWS_AS(check_prekopa_leindler(a, a, a, 1.0), PreconditionError);
  GridFunction1D neg(0.0, 1.0, std::vector<double>{1.0, -0.1, 1.0, 1.0, 1.0, 1.0,
                                                   1.0, 1.0, 1.0, 1.0, 1.0});
  CHECK_THROWS_AS(check_prekopa_leindler(neg, a, a, 0.5), PreconditionError);
}

TEST_CASE("reports classify margins against the tolerance") {
  VerificationReport hold = make_report("demo", 1.0, 2.0, 1e-9);
  CHECK(hold.status == Status::holds);
  CHECK(hold.margin == doctest::Approx(1.0));
  VerificationReport eq = make_report("demo", 2.0 + 1e-8, 2.0, 1e-6);
  CHECK(eq.status == Status::equality);
  VerificationReport bad = make_report("demo", 2.1, 2.0, 1e-6);
  CHECK(bad.status == Status::violated);
  CHECK(bad.margin < 0.0);
}

TEST_CASE("reports round-trip through json") {
  VerificationReport rep = make_report("demo", 1.0, 2.0, 1e-9);
  Vector w(2);
  w << 0.25, -1.5;
  rep.witness = w;
  rep.meta["note"] = "abc";
  rep.meta["k"] = 3;
  ordered_json j = to_json(rep);
  CHECK(j.at("name") == "demo");
  CHECK(j.at("status") == "holds");
  VerificationReport back = report_from_json(j);
  CHECK(back.name == rep.name);
  CHECK(back.lhs == rep.lhs);
  CHECK(back.rhs == rep.rhs);
  CHECK(back.margin == rep.margin);
  CHECK(back.rel_margin == rep.rel_margin);
  CHECK(back.status == rep.status);
  CHECK(back.tolerance == rep.tolerance);
  REQUIRE(back.witness.has_value());
  CHECK((*back.witness - w).norm() == 0.0);
  CHECK(back.meta == rep.meta);
}
