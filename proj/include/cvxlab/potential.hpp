#pragma once

#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "cvxlab/common.hpp"

namespace cvxlab {

// A smooth scalar field with value, gradient and Hessian oracles.  This is
// the carrier for test functions g and bounded perturbations U.
struct SmoothFunction {
  int dimension = 1;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;

  double operator()(const Vector& x) const { return value(x); }
  double operator()(double x) const { return value(scalar_vec(x)); }
  double deriv(double x) const { return gradient(scalar_vec(x))[0]; }
  double second_deriv(double x) const { return hessian(scalar_vec(x))(0, 0); }

  static SmoothFunction zero(int dim);
  static SmoothFunction constant(int dim, double c);
  static SmoothFunction linear(const Vector& slope);
  // amplitude * exp(-|x - center|^2 / (2 width^2))
  static SmoothFunction bump(double amplitude, double width, const Vector& center);
  // amplitude * sum_i sin(x_i)
  static SmoothFunction sine(int dim, double amplitude);
  static SmoothFunction scale(const SmoothFunction& g, double factor);
  static SmoothFunction add(const SmoothFunction& a, const SmoothFunction& b);
  static SmoothFunction add_constant(const SmoothFunction& g, double c);
};

enum class PotentialKind { gaussian, power, polynomial, perturbed, custom };

const char* to_string(PotentialKind k);

// Convex potential phi with oracles for value, gradient and Hessian.  The
// additive shift is tracked separately so normalisation constants can be
// folded in while growth and homogeneity analysis still sees the shift-free
// part (which vanishes at its minimum for the built-in families).
class Potential {
 public:
  static Potential gaussian(int dim);
  static Potential power(double p, int dim);
  // 1D polynomial, coefficients in ascending degree.
  static Potential polynomial(std::vector<double> coeffs);
  static Potential perturbed(const Potential& base, const SmoothFunction& U);
  static Potential custom(int dim, std::function<double(const Vector&)> value,
                          std::function<Vector(const Vector&)> gradient,
                          std::function<Matrix(const Vector&)> hessian);

  int dimension() const { return dim_; }
  PotentialKind kind() const { return kind_; }
  double shift() const { return shift_; }

  // Value includes the shift; gradient and Hessian are unaffected by it.
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;

  double value(double x) const { return value(scalar_vec(x)); }
  double deriv(double x) const { return gradient(scalar_vec(x))[0]; }
  double second_deriv(double x) const { return hessian(scalar_vec(x))(0, 0); }

  double shiftless_value(const Vector& x) const;
  double shiftless_value(double x) const { return shiftless_value(scalar_vec(x)); }

  Potential with_shift(double shift) const;
  Potential without_shift() const { return with_shift(0.0); }

  // kind-specific accessors
  double power_exponent() const;                 // kind == power
  const std::vector<double>& coefficients() const;  // kind == polynomial
  const Potential& base() const;                 // kind == perturbed
  const SmoothFunction& perturbation() const;    // kind == perturbed

 private:
  Potential() = default;
  void check_input(const Vector& x) const;

  int dim_ = 1;
  PotentialKind kind_ = PotentialKind::custom;
  double shift_ = 0.0;
  std::function<double(const Vector&)> value_;   // shift-free
  std::function<Vector(const Vector&)> grad_;
  std::function<Matrix(const Vector&)> hess_;
  double p_ = 0.0;
  std::vector<double> coeffs_;
  std::shared_ptr<const Potential> base_;
  std::shared_ptr<const SmoothFunction> perturbation_;
};

enum class DerivOrder { value, gradient, hessian };

// Oracle dispatch with input validation: rejects dimension mismatches and
// non-finite coordinates.
std::variant<double, Vector, Matrix> evaluate(const Potential& phi,
                                              const Vector& x, DerivOrder order);

}  // namespace cvxlab
