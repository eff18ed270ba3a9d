#pragma once

#include <vector>

#include "cvxlab/conjugate.hpp"
#include "cvxlab/grid_function.hpp"
#include "cvxlab/measure.hpp"
#include "cvxlab/potential.hpp"
#include "cvxlab/report.hpp"

namespace cvxlab {

// x.v - phi*(grad phi(x)) + phi*(grad phi(x) - v); the integrand of the
// entropy bound and the s -> 0 slope of the sup-convolution.
double mlsi_bracket(const Potential& phi, const Vector& x, const Vector& v);

// Same bracket for the quadratic potential, asserted against |v|^2/2.
double gaussian_bracket_identity(const Vector& x, const Vector& v);

VerificationReport verify_mlsi(const Measure& mu, const SmoothFunction& g);

VerificationReport verify_brascamp_lieb(const Measure& mu, const SmoothFunction& g);

// sup of psi(z, e) = z.e |z|^{q-2} - |z|^q/q + |z-e|^q/q over z and unit e,
// the constant of the entropy bound for |x|^p/p potentials.
double power_lsi_constant(double p, int dimension, double z_cap = 8.0);

// The measure must come from a power family potential (gaussian counts as
// p = 2).
VerificationReport verify_power_lsi(const Measure& mu, const SmoothFunction& g);

// Piecewise cost: quadratic y^2/(2 lambda) up to |y| = C, then
// coeff * phi0*(y/2) where phi0 is the shift-free potential.
struct HPhiProfile {
  double lambda = 0.0;
  double A = 0.0;
  double C = 0.0;
  double coeff = 0.0;
  Potential shiftless = Potential::gaussian(1);

  double operator()(double y) const;
};

HPhiProfile extract_hphi(const Potential& phi);

VerificationReport check_pointwise_bound(const HPhiProfile& profile,
                                         const Potential& phi,
                                         const std::vector<double>& x_grid,
                                         const std::vector<double>& y_grid);

VerificationReport verify_hphi_mlsi(const Measure& mu, const SmoothFunction& g);

// max - min of U over a tensor grid on [-radius, radius]^dim.
double perturbation_oscillation(const SmoothFunction& U, double radius);

VerificationReport verify_perturbed(const Potential& base, const SmoothFunction& U,
                                    const SmoothFunction& g, double accuracy);
// Same bound with a prebuilt measure of a perturbed-kind potential.
VerificationReport verify_perturbed_with(const Measure& mu, const SmoothFunction& g);

// Entropy against Lebesgue measure on a box sized from the decay of e^g.
VerificationReport verify_euclidean_lsi(const Potential& phi, const SmoothFunction& g,
                                        double lambda_scale, double accuracy);

VerificationReport verify_homogeneous_elsi(const Potential& C, double q,
                                           const SmoothFunction& g, double accuracy);

struct NontightConstants {
  double alpha = 0.0;
  double lambda = 0.0;       // ladder value used for the constants
  double lambda_star = 0.0;  // bisection-refined feasibility threshold
  double C1 = 0.0, C2 = 0.0, C3 = 0.0;
  double A = 0.0;
};

// sup over a dual probe grid of (1-alpha) Phi0*(x/(1-alpha)) / Phi0*(x).
double nontight_psi(const Measure& mu, double alpha);

NontightConstants nontight_constants(const Measure& mu, double A);

VerificationReport verify_nontight(const Measure& mu, const SmoothFunction& g,
                                   const NontightConstants& c);

VerificationReport check_prekopa_leindler(const GridFunction1D& u,
                                          const GridFunction1D& v,
                                          const GridFunction1D& w, double a);

}  // namespace cvxlab
