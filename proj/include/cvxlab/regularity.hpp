#pragma once

#include <optional>

#include "cvxlab/potential.hpp"

namespace cvxlab {

struct ProbeBox {
  Vector lo, hi;
  static ProbeBox symmetric(int dim, double radius);
};

// Summary of hypothesis checks run against a potential's oracles on a probe
// grid.  Growth and homogeneity are computed on the shift-free part.
struct RegularityProfile {
  double lambda = 0.0;            // inf of smallest Hessian eigenvalue over the grid
  bool is_even = false;
  bool hess_unbounded = false;    // second derivative blows up along every axis ray
  std::optional<double> homogeneity_q;
  std::optional<double> growth_A;  // largest ladder A with A*phi(x) <= x.grad(x) beyond C_A
  std::optional<double> growth_B;  // smallest ladder B with x.grad(x) <= B*phi(x) beyond C_B
  double C_A = 0.0;
  double C_B = 0.0;
  bool integrability_flag = false;  // heuristic only, not a theorem claim
  std::optional<double> osc_perturbation;  // osc(U) for perturbed potentials
};

// probe_count is per axis and must be >= 16; the box must contain the origin.
RegularityProfile analyze_regularity(const Potential& phi, const ProbeBox& box,
                                     int probe_count);

// Probes shared with measure construction.  Throw PreconditionError with a
// witness in the message on failure.
void check_strict_convexity(const Potential& phi, const ProbeBox& box, int count);
void check_superlinearity(const Potential& phi, double r_max = 128.0);

}  // namespace cvxlab
