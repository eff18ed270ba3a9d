#include "cvxlab/potential.hpp"

#include <cmath>

namespace cvxlab {

SmoothFunction SmoothFunction::zero(int dim) { return constant(dim, 0.0); }

SmoothFunction SmoothFunction::constant(int dim, double c) {
  SmoothFunction f;
  f.dimension = dim;
  f.value = [c](const Vector&) { return c; };
  f.gradient = [dim](const Vector&) { return Vector(Vector::Zero(dim)); };
  f.hessian = [dim](const Vector&) { return Matrix(Matrix::Zero(dim, dim)); };
  return f;
}

SmoothFunction SmoothFunction::linear(const Vector& slope) {
  SmoothFunction f;
  const Vector s = slope;
  const int dim = static_cast<int>(s.size());
  f.dimension = dim;
  f.value = [s](const Vector& x) { return s.dot(x); };
  f.gradient = [s](const Vector&) { return s; };
  f.hessian = [dim](const Vector&) { return Matrix(Matrix::Zero(dim, dim)); };
  return f;
}

SmoothFunction SmoothFunction::bump(double amplitude, double width,
                                    const Vector& center) {
  SmoothFunction f;
  const Vector c = center;
  const int dim = static_cast<int>(c.size());
  const double w2 = width * width;
  f.dimension = dim;
  f.value = [amplitude, w2, c](const Vector& x) {
    return amplitude * std::exp(-(x - c).squaredNorm() / (2.0 * w2));
  };
  f.gradient = [amplitude, w2, c](const Vector& x) {
    Vector d = x - c;
    double v = amplitude * std::exp(-d.squaredNorm() / (2.0 * w2));
    return Vector(-v / w2 * d);
  };
  f.hessian = [amplitude, w2, c, dim](const Vector& x) {
    Vector d = x - c;
    double v = amplitude * std::exp(-d.squaredNorm() / (2.0 * w2));
    Matrix h = (v / (w2 * w2)) * d * d.transpose();
    h -= (v / w2) * Matrix::Identity(dim, dim);
    return h;
  };
  return f;
}

SmoothFunction SmoothFunction::sine(int dim, double amplitude) {
  SmoothFunction f;
  f.dimension = dim;
  f.value = [amplitude](const Vector& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::sin(x[i]);
    return amplitude * s;
  };
  f.gradient = [amplitude](const Vector& x) {
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = amplitude * std::cos(x[i]);
    return g;
  };
  f.hessian = [amplitude, dim](const Vector& x) {
    Matrix h = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < x.size(); ++i) h(i, i) = -amplitude * std::sin(x[i]);
    return h;
  };
  return f;
}

SmoothFunction SmoothFunction::scale(const SmoothFunction& g, double factor) {
  SmoothFunction f;
  f.dimension = g.dimension;
  f.value = [g, factor](const Vector& x) { return factor * g.value(x); };
  f.gradient = [g, factor](const Vector& x) { return Vector(factor * g.gradient(x)); };
  f.hessian = [g, factor](const Vector& x) { return Matrix(factor * g.hessian(x)); };
  return f;
}

SmoothFunction SmoothFunction::add(const SmoothFunction& a, const SmoothFunction& b) {
  if (a.dimension != b.dimension)
    throw PreconditionError("SmoothFunction::add: dimension mismatch");
  SmoothFunction f;
  f.dimension = a.dimension;
  f.value = [a, b](const Vector& x) { return a.value(x) + b.value(x); };
  f.gradient = [a, b](const Vector& x) { return Vector(a.gradient(x) + b.gradient(x)); };
  f.hessian = [a, b](const Vector& x) { return Matrix(a.hessian(x) + b.hessian(x)); };
  return f;
}

SmoothFunction SmoothFunction::add_constant(const SmoothFunction& g, double c) {
  SmoothFunction f = g;
  auto v = g.value;
  f.value = [v, c](const Vector& x) { return v(x) + c; };
  return f;
}

const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::gaussian: return "gaussian";
    case PotentialKind::power: return "power";
    case PotentialKind::polynomial: return "polynomial";
    case PotentialKind::perturbed: return "perturbed";
    case PotentialKind::custom: return "custom";
  }
  return "?";
}

void Potential::check_input(const Vector& x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw PreconditionError("Potential: dimension mismatch");
  if (!x.allFinite())
    throw PreconditionError("Potential: non-finite input");
}

double Potential::value(const Vector& x) const {
  check_input(x);
  return value_(x) + shift_;
}

Vector Potential::gradient(const Vector& x) const {
  check_input(x);
  return grad_(x);
}

Matrix Potential::hessian(const Vector& x) const {
  check_input(x);
  return hess_(x);
}

double Potential::shiftless_value(const Vector& x) const {
  check_input(x);
  return value_(x);
}

Potential Potential::with_shift(double shift) const {
  Potential p = *this;
  p.shift_ = shift;
  return p;
}

Potential Potential::gaussian(int dim) {
  if (dim < 1) throw PreconditionError("gaussian: dimension must be >= 1");
  Potential p;
  p.dim_ = dim;
  p.kind_ = PotentialKind::gaussian;
  p.value_ = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  p.grad_ = [](const Vector& x) { return x; };
  p.hess_ = [dim](const Vector&) { return Matrix(Matrix::Identity(dim, dim)); };
  return p;
}

Potential Potential::power(double pe, int dim) {
  if (dim < 1) throw PreconditionError("power: dimension must be >= 1");
  if (!(pe >= 1.0)) throw PreconditionError("power: exponent must be >= 1");
  Potential p;
  p.dim_ = dim;
  p.kind_ = PotentialKind::power;
  p.p_ = pe;
  p.value_ = [pe](const Vector& x) { return std::pow(x.norm(), pe) / pe; };
  p.grad_ = [pe, dim](const Vector& x) {
    double r = x.norm();
    if (r == 0.0) return Vector(Vector::Zero(dim));
    return Vector(std::pow(r, pe - 2.0) * x);
  };
  p.hess_ = [pe, dim](const Vector& x) {
    double r = x.norm();
    if (r == 0.0) {
      if (pe == 2.0) return Matrix(Matrix::Identity(dim, dim));
      if (pe > 2.0) return Matrix(Matrix::Zero(dim, dim));
      return Matrix(Matrix::Zero(dim, dim));  // p in [1,2): not twice differentiable at 0
    }
    Vector u = x / r;
    Matrix h = std::pow(r, pe - 2.0) *
               (Matrix::Identity(dim, dim) + (pe - 2.0) * u * u.transpose());
    return h;
  };
  return p;
}

Potential Potential::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw PreconditionError("polynomial: empty coefficients");
  Potential p;
  p.dim_ = 1;
  p.kind_ = PotentialKind::polynomial;
  p.coeffs_ = std::move(coeffs);
  const std::vector<double> c = p.coeffs_;
  p.value_ = [c](const Vector& x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x[0] + c[k];
    return v;
  };
  p.grad_ = [c](const Vector& x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) v = v * x[0] + k * c[k];
    return scalar_vec(v);
  };
  p.hess_ = [c](const Vector& x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 2;) v = v * x[0] + k * (k - 1) * c[k];
    Matrix h(1, 1);
    h(0, 0) = v;
    return h;
  };
  return p;
}

Potential Potential::perturbed(const Potential& base, const SmoothFunction& U) {
  if (base.dimension() != U.dimension)
    throw PreconditionError("perturbed: base/perturbation dimension mismatch");
  Potential p;
  p.dim_ = base.dimension();
  p.kind_ = PotentialKind::perturbed;
  p.shift_ = base.shift();
  p.base_ = std::make_shared<Potential>(base);
  p.perturbation_ = std::make_shared<SmoothFunction>(U);
  auto b = p.base_;
  auto u = p.perturbation_;
  p.value_ = [b, u](const Vector& x) { return b->shiftless_value(x) + u->value(x); };
  p.grad_ = [b, u](const Vector& x) { return Vector(b->gradient(x) + u->gradient(x)); };
  p.hess_ = [b, u](const Vector& x) { return Matrix(b->hessian(x) + u->hessian(x)); };
  return p;
}

Potential Potential::custom(int dim, std::function<double(const Vector&)> value,
                            std::function<Vector(const Vector&)> gradient,
                            std::function<Matrix(const Vector&)> hessian) {
  if (dim < 1) throw PreconditionError("custom: dimension must be >= 1");
  Potential p;
  p.dim_ = dim;
  p.kind_ = PotentialKind::custom;
  p.value_ = std::move(value);
  p.grad_ = std::move(gradient);
  p.hess_ = std::move(hessian);
  return p;
}

double Potential::power_exponent() const {
  if (kind_ != PotentialKind::power)
    throw PreconditionError("power_exponent: not a power potential");
  return p_;
}

const std::vector<double>& Potential::coefficients() const {
  if (kind_ != PotentialKind::polynomial)
    throw PreconditionError("coefficients: not a polynomial potential");
  return coeffs_;
}

const Potential& Potential::base() const {
  if (kind_ != PotentialKind::perturbed)
    throw PreconditionError("base: not a perturbed potential");
  return *base_;
}

const SmoothFunction& Potential::perturbation() const {
  if (kind_ != PotentialKind::perturbed)
    throw PreconditionError("perturbation: not a perturbed potential");
  return *perturbation_;
}

std::variant<double, Vector, Matrix> evaluate(const Potential& phi,
                                              const Vector& x, DerivOrder order) {
  switch (order) {
    case DerivOrder::value: return phi.value(x);
    case DerivOrder::gradient: return phi.gradient(x);
    case DerivOrder::hessian: return phi.hessian(x);
  }
  throw PreconditionError("evaluate: bad order");
}

}  // namespace cvxlab
