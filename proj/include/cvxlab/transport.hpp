#pragma once

#include "cvxlab/measure.hpp"
#include "cvxlab/potential.hpp"
#include "cvxlab/report.hpp"

namespace cvxlab {

// L(x, y) = phi(y) - phi(x) - (y - x) phi'(x): the gap between phi at y and
// its tangent line at x.  Nonnegative for convex phi; (y-x)^2/2 for the
// quadratic potential.
double bregman_cost(const Potential& phi, double x, double y);

// Target measure F dmu with the density factor renormalized to unit mass.
struct TransportInstance {
  SmoothFunction density;  // renormalized factor, integrates to 1 against mu
  double raw_mass = 0.0;   // mass of the caller's factor before scaling
};

TransportInstance make_transport_instance(const Measure& mu, const SmoothFunction& F);

// Cost of the monotone coupling, int_0^1 L(Q_F(t), Q_mu(t)) dt with both
// quantile functions read off cumulative tables.  The coupling is optimal:
// the cross derivative of L is -phi''(x) < 0, so sorted matching wins.
// resolution_gap, when given, receives the last panel-doubling drift.
double wasserstein_bregman_1d(const Measure& mu, const TransportInstance& inst,
                              double* resolution_gap = nullptr);

// Transport cost against the relative entropy int F log F dmu.
VerificationReport verify_transport(const Measure& mu, const TransportInstance& inst);

}  // namespace cvxlab
