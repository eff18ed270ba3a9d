#include "cvxlab/regularity.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cvxlab/conjugate.hpp"
#include "cvxlab/numerics.hpp"

namespace cvxlab {
namespace {

std::string point_str(const Vector& x) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ")";
  return os.str();
}

double min_eigenvalue(const Matrix& H) {
  if (H.rows() == 1) return H(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<double> axis_coords(double lo, double hi, int n) {
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    c[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  if (lo < 0.0 && hi > 0.0) {
    bool has_zero = false;
    for (double v : c) has_zero = has_zero || std::abs(v) < 1e-15;
    if (!has_zero) {
      c.push_back(0.0);
      std::sort(c.begin(), c.end());
    }
  }
  return c;
}

// Tensor grid over the box, one coordinate list per axis.  The origin is
// always a grid point when the box straddles it.
std::vector<Vector> probe_grid(const ProbeBox& box, int per_axis) {
  int dim = static_cast<int>(box.lo.size());
  int n = per_axis;
  if (dim == 2) n = std::max(9, std::min(n, 33));
  if (dim >= 3) n = std::max(5, std::min(n, 9));
  std::vector<std::vector<double>> axes;
  for (int d = 0; d < dim; ++d) axes.push_back(axis_coords(box.lo[d], box.hi[d], n));
  std::vector<Vector> pts;
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    Vector x(dim);
    for (int d = 0; d < dim; ++d) x[d] = axes[static_cast<std::size_t>(d)][idx[static_cast<std::size_t>(d)]];
    pts.push_back(x);
    int d = 0;
    while (d < dim) {
      if (++idx[static_cast<std::size_t>(d)] < axes[static_cast<std::size_t>(d)].size()) break;
      idx[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == dim) break;
  }
  return pts;
}

std::vector<Vector> ray_directions(int dim) {
  std::vector<Vector> dirs;
  for (int d = 0; d < dim; ++d) {
    Vector e = Vector::Zero(dim);
    e[d] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  if (dim >= 2) {
    Vector e = Vector::Ones(dim) / std::sqrt(static_cast<double>(dim));
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  return dirs;
}

double box_radius(const ProbeBox& box) {
  double r = kInf;
  for (int d = 0; d < static_cast<int>(box.lo.size()); ++d)
    r = std::min(r, std::min(-box.lo[d], box.hi[d]));
  return r;
}

double matrix_norm_bound(const Matrix& H) {
  return H.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

ProbeBox ProbeBox::symmetric(int dim, double radius) {
  ProbeBox b;
  b.lo = Vector::Constant(dim, -radius);
  b.hi = Vector::Constant(dim, radius);
  return b;
}

void check_strict_convexity(const Potential& phi, const ProbeBox& box, int count) {
  auto pts = probe_grid(box, count);
  for (const Vector& x : pts) {
    Matrix H = phi.hessian(x);
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + H.cwiseAbs().maxCoeff()))
      throw PreconditionError("Hessian not symmetric at " + point_str(x));
    double m = min_eigenvalue(H);
    if (m < -1e-10)
      throw PreconditionError("Hessian not positive semidefinite at " + point_str(x) +
                              " (min eigenvalue " + std::to_string(m) + ")");
  }
  // The Hessian probe alone accepts flat pieces, so also demand strict
  // midpoint convexity on well separated pairs.
  std::size_t n = pts.size();
  std::size_t stride = std::max<std::size_t>(1, n / 16);
  for (std::size_t i = 0; i < n; i += stride) {
    for (std::size_t off : {n / 7 + 1, n / 3 + 1, n / 2 + 1}) {
      std::size_t j = (i + off) % n;
      const Vector &x = pts[i], &y = pts[j];
      if ((x - y).norm() < 0.5) continue;
      double avg = 0.5 * (phi.value(x) + phi.value(y));
      double mid = phi.value(0.5 * (x + y));
      if (!(mid < avg - 1e-12 * (1.0 + std::abs(avg))))
        throw PreconditionError("convexity is not strict between " + point_str(x) +
                                " and " + point_str(y));
    }
  }
}

void check_superlinearity(const Potential& phi, double r_max) {
  int dim = phi.dimension();
  for (const Vector& e : ray_directions(dim)) {
    double prev = -kInf;
    for (double r = 1.0; r <= r_max; r *= 2.0) {
      double ratio = phi.shiftless_value(Vector(r * e)) / r;
      if (std::isfinite(prev) && !(ratio > prev + 1e-12 * (1.0 + std::abs(prev))))
        throw PreconditionError("value grows at most linearly along " +
                                point_str(e) + " near radius " + std::to_string(r));
      prev = ratio;
    }
  }
}

namespace {

// Ladder search for A phi0(re) <= r phi0'(re).e on the tail of the radial
// grid.  Returns the refined crossing radius through C_out.
bool growth_lower(const Potential& phi, const std::vector<Vector>& dirs,
                  const std::vector<double>& radii, double A, double* C_out) {
  std::size_t K = radii.size();
  auto margin = [&](double r) {
    double worst = kInf;
    for (const Vector& e : dirs) {
      Vector x = r * e;
      double rg = r * phi.gradient(x).dot(e);
      worst = std::min(worst, rg - A * phi.shiftless_value(x));
    }
    return worst;
  };
  std::vector<char> ok(K);
  for (std::size_t k = 0; k < K; ++k) {
    double slack = 0.0;
    for (const Vector& e : dirs) {
      Vector x = radii[k] * e;
      double rg = radii[k] * phi.gradient(x).dot(e);
      if (A * phi.shiftless_value(x) > rg + 1e-12 * (1.0 + std::abs(rg))) {
        slack = -1.0;
        break;
      }
    }
    ok[k] = slack >= 0.0;
  }
  std::size_t k0 = K;
  while (k0 > 0 && ok[k0 - 1]) --k0;
  if (k0 >= K) return false;                       // fails even at the boundary
  if (k0 > static_cast<std::size_t>(0.9 * static_cast<double>(K))) return false;
  if (k0 == 0) {
    *C_out = radii[0];
    return true;
  }
  double a = radii[k0 - 1], b = radii[k0];
  if (margin(a) < 0.0 && margin(b) > 0.0)
    *C_out = bisect_root(margin, a, b);
  else
    *C_out = b;
  return true;
}

bool growth_upper(const Potential& phi, const std::vector<Vector>& dirs,
                  const std::vector<double>& radii, double B) {
  for (double r : radii) {
    for (const Vector& e : dirs) {
      Vector x = r * e;
      double rg = r * phi.gradient(x).dot(e);
      if (rg > B * phi.shiftless_value(x) + 1e-12 * (1.0 + std::abs(rg))) return false;
    }
  }
  return true;
}

bool integrability_probe(const Potential& phi) {
  int dim = phi.dimension();
  auto dirs = ray_directions(dim);
  Vector e1 = Vector::Zero(dim);
  e1[0] = 1.0;
  // Extend the radial range until the shift-free value dominates every
  // polynomial prefactor in the integrand.
  double R_int = 8.0;
  for (int i = 0; i < 16 && phi.shiftless_value(Vector(R_int * dirs[0])) < 60.0; ++i)
    R_int *= 2.0;
  for (double R : {1.0, 5.0, 10.0}) {
    double peak = 0.0, boundary = 0.0;
    for (const Vector& e : dirs) {
      for (int k = 0; k <= 64; ++k) {
        double r = R_int * static_cast<double>(k) / 64.0;
        Vector z = r * e;
        Vector y0;
        try {
          y0 = grad_inverse(phi, Vector(phi.gradient(z) - R * e1));
        } catch (const NumericalError&) {
          return false;
        }
        Vector c = z - y0;
        double hs = matrix_norm_bound(phi.hessian(c));
        for (int d = 0; d < dim; ++d) {
          Vector step = Vector::Zero(dim);
          step[d] = R;
          hs = std::max(hs, matrix_norm_bound(phi.hessian(Vector(c + step))));
          hs = std::max(hs, matrix_norm_bound(phi.hessian(Vector(c - step))));
        }
        double pref = z.norm() + y0.norm() + R;
        double value = pref * pref * (phi.gradient(z).norm() + hs) *
                       std::exp(-phi.shiftless_value(z));
        peak = std::max(peak, value);
        if (k == 64) boundary = std::max(boundary, value);
      }
    }
    if (!(boundary <= 1e-6 * peak)) return false;
  }
  return true;
}

}  // namespace

RegularityProfile analyze_regularity(const Potential& phi, const ProbeBox& box,
                                     int probe_count) {
  int dim = phi.dimension();
  if (probe_count < 16) throw PreconditionError("probe_count must be at least 16");
  if (box.lo.size() != dim || box.hi.size() != dim)
    throw PreconditionError("probe box dimension mismatch");
  for (int d = 0; d < dim; ++d)
    if (!(box.lo[d] < 0.0 && box.hi[d] > 0.0))
      throw PreconditionError("probe box must contain the origin");

  check_strict_convexity(phi, box, probe_count);
  check_superlinearity(phi);

  RegularityProfile prof;
  auto pts = probe_grid(box, probe_count);

  double lam = kInf;
  bool even = true;
  for (const Vector& x : pts) {
    lam = std::min(lam, min_eigenvalue(phi.hessian(x)));
    double v = phi.value(x);
    if (std::abs(v - phi.value(Vector(-x))) > 1e-12 * (1.0 + std::abs(v))) even = false;
  }
  prof.lambda = std::max(0.0, lam);
  prof.is_even = even;

  auto dirs = ray_directions(dim);
  prof.hess_unbounded = true;
  for (const Vector& e : dirs) {
    double h10 = min_eigenvalue(phi.hessian(Vector(10.0 * e)));
    double h20 = min_eigenvalue(phi.hessian(Vector(20.0 * e)));
    double h40 = min_eigenvalue(phi.hessian(Vector(40.0 * e)));
    bool grows = h20 > h10 + 1e-12 * (1.0 + std::abs(h10)) &&
                 h40 > h20 + 1e-12 * (1.0 + std::abs(h20)) && h40 > 10.0 * prof.lambda;
    if (!grows) prof.hess_unbounded = false;
  }

  // Homogeneity on the shift-free part: consistent doubling ratio, then an
  // independent factor-3 validation to reject accidental agreement.
  {
    std::vector<double> qs;
    bool usable = true;
    for (const Vector& x : pts) {
      if (x.norm() < 0.3) continue;
      double v1 = phi.shiftless_value(x);
      double v2 = phi.shiftless_value(Vector(2.0 * x));
      if (!(v1 > 1e-12) || !(v2 > 0.0)) {
        usable = false;
        break;
      }
      qs.push_back(std::log2(v2 / v1));
    }
    if (usable && qs.size() >= 8) {
      std::vector<double> sorted = qs;
      std::sort(sorted.begin(), sorted.end());
      double q = sorted[sorted.size() / 2];
      bool valid = true;
      for (const Vector& x : pts) {
        if (x.norm() < 0.3) continue;
        double v1 = phi.shiftless_value(x);
        double v2 = phi.shiftless_value(Vector(2.0 * x));
        double v3 = phi.shiftless_value(Vector(3.0 * x));
        if (std::abs(v2 - std::pow(2.0, q) * v1) > 1e-8 * std::abs(v2) ||
            std::abs(v3 - std::pow(3.0, q) * v1) > 1e-8 * std::abs(v3)) {
          valid = false;
          break;
        }
      }
      if (valid) prof.homogeneity_q = q;
    }
  }

  {
    double R_box = box_radius(box);
    std::vector<double> radii;
    for (int k = 1; k <= 256; ++k) radii.push_back(R_box * static_cast<double>(k) / 256.0);
    for (double A : {8.0, 6.0, 4.0, 3.0, 2.0, 1.5, 1.25}) {
      double C = 0.0;
      if (growth_lower(phi, dirs, radii, A, &C)) {
        prof.growth_A = A;
        prof.C_A = C;
        break;
      }
    }
    for (double B : {1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0}) {
      if (growth_upper(phi, dirs, radii, B)) {
        prof.growth_B = B;
        prof.C_B = 0.0;
        break;
      }
    }
  }

  prof.integrability_flag = integrability_probe(phi);

  if (phi.kind() == PotentialKind::perturbed) {
    const SmoothFunction& U = phi.perturbation();
    double umin = kInf, umax = -kInf;
    for (const Vector& x : pts) {
      double u = U.value(x);
      umin = std::min(umin, u);
      umax = std::max(umax, u);
    }
    prof.osc_perturbation = umax - umin;
  }
  return prof;
}

}  // namespace cvxlab
