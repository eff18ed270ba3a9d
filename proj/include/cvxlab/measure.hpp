#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cvxlab/common.hpp"
#include "cvxlab/numerics.hpp"
#include "cvxlab/potential.hpp"

namespace cvxlab {

// Every functional is evaluated on two node sets: "standard" is the grid the
// panel-doubling loop converged on, "coarse" the one before it.  Verifiers
// difference the two to estimate their own quadrature error.
enum class Resolution { standard, coarse };

// Normalized probability measure e^{-phi} dx on a truncation box, with
// deterministic composite Gauss-Legendre quadrature, a cumulative table for
// quantiles (1D), and inverse-CDF sampling.
class Measure {
 public:
  struct BuildOptions {
    // The perturbed-potential verifier integrates against e^{-(phi+U)} where
    // phi+U need not be convex; it relaxes this gate after checking the base.
    bool check_convexity = true;
    double radius_floor = 0.0;
  };

  static Measure build(const Potential& phi, double accuracy);
  static Measure build(const Potential& phi, double accuracy, const BuildOptions& opt);

  // Shift adjusted so the measure integrates to one.
  const Potential& potential() const { return phi_; }
  const Potential& raw_potential() const { return raw_; }
  double Z() const { return Z_; }          // integral of e^{-raw value}
  double log_Z0() const { return log_z0_; }  // log integral of e^{-shiftless value}
  int dimension() const { return phi_.dimension(); }
  double radius() const { return radius_; }
  double accuracy() const { return accuracy_; }
  double tail_mass() const { return tail_mass_; }

  const std::vector<Vector>& nodes(Resolution r) const;
  const std::vector<double>& weights(Resolution r) const;  // include the density

  double integrate(const std::function<double(const Vector&)>& f,
                   Resolution r = Resolution::standard) const;
  // integral of f e^g dmu, exponentials stabilized by the max of g over the
  // nodes.  Rejects g whose integrand has not decayed at the box boundary.
  double integrate_exp(const std::function<double(const Vector&)>& f,
                       const std::function<double(const Vector&)>& g,
                       Resolution r = Resolution::standard) const;
  double entropy(const std::function<double(const Vector&)>& g,
                 Resolution r = Resolution::standard) const;
  double entropy(const SmoothFunction& g, Resolution r = Resolution::standard) const;
  double variance(const std::function<double(const Vector&)>& g,
                  Resolution r = Resolution::standard) const;
  double variance(const SmoothFunction& g, Resolution r = Resolution::standard) const;

  // 1D only beyond this point.
  double cdf(double x) const;
  double quantile(double u) const;
  std::vector<double> sample_1d(std::size_t count, std::uint64_t seed) const;
  const std::vector<double>& table_xs() const { return table_x_; }
  const std::vector<double>& table_density() const { return table_rho_; }
  const std::vector<double>& table_cdf() const { return table_u_; }

 private:
  Measure() = default;

  Potential raw_ = Potential::gaussian(1);
  Potential phi_ = Potential::gaussian(1);
  double Z_ = 0.0;
  double log_z0_ = 0.0;
  double radius_ = 0.0;
  double accuracy_ = 0.0;
  double tail_mass_ = 0.0;

  std::vector<Vector> nodes_std_, nodes_coarse_;
  std::vector<double> w_std_, w_coarse_;
  std::vector<char> boundary_std_, boundary_coarse_;

  std::vector<double> table_x_, table_rho_, table_u_;
  MonotoneCubic cdf_interp_, quantile_interp_;
  bool has_table_ = false;

  friend double log_partition(const Potential& phi, double accuracy);
};

// log of the normalization integral of e^{-value} with its own truncation
// box; used when a rescaled potential needs a much wider box than the
// measure it came from.
double log_partition(const Potential& phi, double accuracy);

}  // namespace cvxlab
