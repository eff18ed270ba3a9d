#include "cvxlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cvxlab/numerics.hpp"

namespace cvxlab {

double bregman_cost(const Potential& phi, double x, double y) {
  if (phi.dimension() != 1)
    throw PreconditionError("tangent-gap cost is one-dimensional here");
  return phi.value(y) - phi.value(x) - (y - x) * phi.deriv(x);
}

TransportInstance make_transport_instance(const Measure& mu, const SmoothFunction& F) {
  if (mu.dimension() != 1 || F.dimension != 1)
    throw PreconditionError("transport instances are one-dimensional");
  for (const Vector& x : mu.nodes(Resolution::standard))
    if (!(F.value(x) >= 0.0))
      throw PreconditionError("density factor must be nonnegative and finite");
  double mass = mu.integrate([&](const Vector& x) { return F.value(x); });
  if (!(mass > 0.0))
    throw PreconditionError("density factor must carry positive mass");
  TransportInstance inst;
  inst.raw_mass = mass;
  inst.density = SmoothFunction::scale(F, 1.0 / mass);
  double check = mu.integrate([&](const Vector& x) { return inst.density.value(x); });
  if (std::abs(check - 1.0) > 1e-8)
    throw NumericalError("renormalized density mass drifted from 1");
  return inst;
}

namespace {

// Quantile function of density * dmu over the measure's own table grid; the
// table density is re-weighted and re-accumulated with the same scheme the
// measure used for its cdf.
MonotoneCubic tilted_quantile(const Measure& mu, const SmoothFunction& density) {
  const std::vector<double>& xs = mu.table_xs();
  const std::vector<double>& rho = mu.table_density();
  const std::size_t n = xs.size();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = density(xs[i]) * rho[i];
    if (!(f[i] > 0.0))
      throw PreconditionError("tilted density must stay positive on the quantile table");
  }
  double h = xs[1] - xs[0];
  std::vector<double> cum = cumulative_integral(h, f);
  double total = cum.back();
  // The cumulative sum saturates to 1 in double precision deep in the tail,
  // so keep only strictly increasing knots plus the exact endpoints.
  std::vector<double> u, xq, inv_slope;
  u.reserve(n);
  xq.reserve(n);
  inv_slope.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double ui = (i == n - 1) ? 1.0 : cum[i] / total;
    if (!u.empty() && i != n - 1 && !(ui > u.back() && ui < 1.0)) continue;
    u.push_back(ui);
    xq.push_back(xs[i]);
    inv_slope.push_back(total / f[i]);
  }
  return MonotoneCubic::fit(std::move(u), std::move(xq), std::move(inv_slope));
}

}  // namespace

double wasserstein_bregman_1d(const Measure& mu, const TransportInstance& inst,
                              double* resolution_gap) {
  if (mu.dimension() != 1)
    throw PreconditionError("quantile coupling is one-dimensional");
  MonotoneCubic qf = tilted_quantile(mu, inst.density);
  const Potential& phi = mu.potential();
  auto cost_at = [&](double t) {
    return bregman_cost(phi, qf(t), mu.quantile(t));
  };
  auto integral = [&](int panels) {
    std::vector<double> tn, tw;
    graded_gauss_legendre(0.0, 1.0, panels, tn, tw);
    KahanSum s;
    for (std::size_t i = 0; i < tn.size(); ++i) s.add(tw[i] * cost_at(tn[i]));
    return s.value();
  };
  int panels = 64;
  double prev = integral(32);
  double cur = integral(panels);
  while (panels < 512 &&
         std::abs(cur - prev) > 1e-9 * std::max(1.0, std::abs(cur))) {
    panels *= 2;
    prev = cur;
    cur = integral(panels);
  }
  if (resolution_gap != nullptr) *resolution_gap = std::abs(cur - prev);
  return cur;
}

VerificationReport verify_transport(const Measure& mu, const TransportInstance& inst) {
  double gap = 0.0;
  double cost = wasserstein_bregman_1d(mu, inst, &gap);
  auto flogf = [&](const Vector& x) {
    double f = inst.density.value(x);
    return f > 0.0 ? f * std::log(f) : 0.0;
  };
  double rhs_s = mu.integrate(flogf, Resolution::standard);
  double rhs_c = mu.integrate(flogf, Resolution::coarse);
  double tol = 1e-7 * std::max(1.0, std::abs(rhs_s)) + std::abs(rhs_s - rhs_c) + gap;
  VerificationReport rep = make_report("transport", cost, rhs_s, tol);
  rep.meta["raw_mass"] = inst.raw_mass;
  rep.meta["cost_resolution_gap"] = gap;
  rep.meta["rhs_resolution_gap"] = rhs_s - rhs_c;
  return rep;
}

}  // namespace cvxlab
