#include "cvxlab/measure.hpp"

#include <algorithm>
#include <cmath>

#include "cvxlab/regularity.hpp"

namespace cvxlab {
namespace {

std::vector<Vector> box_directions(int dim) {
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

double scan_min_value(const Potential& phi, double R) {
  int dim = phi.dimension();
  double best = kInf;
  if (dim == 1) {
    for (int i = 0; i <= 512; ++i)
      best = std::min(best, phi.value(scalar_vec(-R + 2.0 * R * i / 512.0)));
  } else {
    int n = 64;
    Vector x(dim);
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    while (true) {
      for (int d = 0; d < dim; ++d) x[d] = -R + 2.0 * R * idx[static_cast<std::size_t>(d)] / n;
      best = std::min(best, phi.value(x));
      int d = 0;
      while (d < dim) {
        if (++idx[static_cast<std::size_t>(d)] <= n) break;
        idx[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == dim) break;
    }
  }
  return best;
}

double boundary_min_excess(const Potential& phi, double R, double vmin) {
  double worst = kInf;
  for (const Vector& e : box_directions(phi.dimension()))
    worst = std::min(worst, phi.value(Vector(R * e)) - vmin);
  return worst;
}

struct GridEval {
  std::vector<Vector> nodes;
  std::vector<double> dw;  // quadrature weight times e^{-(value - vmin)}
  std::vector<char> boundary;
  double sum = 0.0;
};

GridEval evaluate_grid(const Potential& phi, double R, int panels, double vmin) {
  int dim = phi.dimension();
  std::vector<double> axis_nodes, axis_w;
  composite_gauss_legendre(-R, R, panels, axis_nodes, axis_w);
  // Nodes in the outer 1/16 of the radius carry the decay guard.  The
  // extreme node of a 32-point panel sits within 0.3% of +-R, so the band
  // is never empty, and it stays near the boundary at every panel count.
  double edge = R * (1.0 - 1.0 / 16.0);

  GridEval g;
  KahanSum sum;
  if (dim == 1) {
    g.nodes.reserve(axis_nodes.size());
    for (std::size_t i = 0; i < axis_nodes.size(); ++i) {
      Vector x = scalar_vec(axis_nodes[i]);
      double w = axis_w[i] * std::exp(-(phi.value(x) - vmin));
      g.nodes.push_back(x);
      g.dw.push_back(w);
      g.boundary.push_back(std::abs(axis_nodes[i]) >= edge ? 1 : 0);
      sum.add(w);
    }
  } else {
    std::size_t n = axis_nodes.size();
    std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
    Vector x(dim);
    while (true) {
      double w = 1.0;
      bool bnd = false;
      for (int d = 0; d < dim; ++d) {
        std::size_t i = idx[static_cast<std::size_t>(d)];
        x[d] = axis_nodes[i];
        w *= axis_w[i];
        bnd = bnd || std::abs(axis_nodes[i]) >= edge;
      }
      w *= std::exp(-(phi.value(x) - vmin));
      g.nodes.push_back(x);
      g.dw.push_back(w);
      g.boundary.push_back(bnd ? 1 : 0);
      sum.add(w);
      int d = 0;
      while (d < dim) {
        if (++idx[static_cast<std::size_t>(d)] < n) break;
        idx[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == dim) break;
    }
  }
  g.sum = sum.value();
  return g;
}

double log_z_for(const Potential& phi, double R, int panels, double vmin) {
  std::vector<double> axis_nodes, axis_w;
  composite_gauss_legendre(-R, R, panels, axis_nodes, axis_w);
  int dim = phi.dimension();
  KahanSum sum;
  if (dim == 1) {
    for (std::size_t i = 0; i < axis_nodes.size(); ++i)
      sum.add(axis_w[i] * std::exp(-(phi.value(scalar_vec(axis_nodes[i])) - vmin)));
  } else {
    std::size_t n = axis_nodes.size();
    std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
    Vector x(dim);
    while (true) {
      double w = 1.0;
      for (int d = 0; d < dim; ++d) {
        x[d] = axis_nodes[idx[static_cast<std::size_t>(d)]];
        w *= axis_w[idx[static_cast<std::size_t>(d)]];
      }
      sum.add(w * std::exp(-(phi.value(x) - vmin)));
      int d = 0;
      while (d < dim) {
        if (++idx[static_cast<std::size_t>(d)] < n) break;
        idx[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == dim) break;
    }
  }
  return std::log(sum.value()) - vmin;
}

struct CoreResult {
  double radius = 0.0;
  double vmin = 0.0;
  int panels = 0;  // coarse count; the standard grid uses twice as many
  double logZ = 0.0;
};

CoreResult compute_core(const Potential& phi, double accuracy, double radius_floor) {
  CoreResult core;
  double R = std::max(2.0, radius_floor);
  bool sized = false;
  for (int i = 0; i < 30 && !sized; ++i) {
    core.vmin = scan_min_value(phi, R);
    if (boundary_min_excess(phi, R, core.vmin) >= 46.0)
      sized = true;
    else
      R *= 2.0;
  }
  if (!sized)
    throw NumericalError(
        "truncation radius cap exceeded; the potential does not appear integrable");

  int max_panels = phi.dimension() == 1 ? 512 : 32;
  for (int attempt = 0; attempt < 4; ++attempt) {
    core.radius = R;
    int P = 8;
    double zP = log_z_for(phi, R, P, core.vmin);
    while (true) {
      double z2P = log_z_for(phi, R, 2 * P, core.vmin);
      if (std::abs(z2P - zP) <= 0.1 * accuracy) {
        core.panels = P;
        core.logZ = z2P;
        break;
      }
      P *= 2;
      zP = z2P;
      if (P > max_panels) throw NumericalError("quadrature panel doubling did not converge");
    }
    // Post check: the boundary integrand must be far below the bulk.
    double excess = boundary_min_excess(phi, R, core.vmin);
    if (std::exp(-excess) < 1e-16 * std::exp(core.logZ + core.vmin)) return core;
    R *= 2.0;
    core.vmin = scan_min_value(phi, R);
  }
  throw NumericalError("boundary integrand failed to decay under radius doubling");
}

}  // namespace

Measure Measure::build(const Potential& phi, double accuracy) {
  return build(phi, accuracy, BuildOptions{});
}

Measure Measure::build(const Potential& phi, double accuracy, const BuildOptions& opt) {
  if (!(accuracy > 0.0)) throw PreconditionError("accuracy must be positive");
  check_superlinearity(phi);
  CoreResult core = compute_core(phi, accuracy, opt.radius_floor);
  if (opt.check_convexity) {
    double probe_r = std::min(core.radius, 8.0);
    check_strict_convexity(phi, ProbeBox::symmetric(phi.dimension(), probe_r), 33);
  }

  Measure m;
  m.raw_ = phi;
  m.accuracy_ = accuracy;
  m.radius_ = core.radius;
  m.Z_ = std::exp(core.logZ);
  m.log_z0_ = core.logZ + phi.shift();
  m.phi_ = phi.with_shift(core.logZ + phi.shift());

  GridEval fine = evaluate_grid(phi, core.radius, 2 * core.panels, core.vmin);
  GridEval coarse = evaluate_grid(phi, core.radius, core.panels, core.vmin);
  m.nodes_std_ = std::move(fine.nodes);
  m.boundary_std_ = std::move(fine.boundary);
  m.w_std_.reserve(fine.dw.size());
  for (double w : fine.dw) m.w_std_.push_back(w / fine.sum);
  m.nodes_coarse_ = std::move(coarse.nodes);
  m.boundary_coarse_ = std::move(coarse.boundary);
  m.w_coarse_.reserve(coarse.dw.size());
  for (double w : coarse.dw) m.w_coarse_.push_back(w / coarse.sum);

  {
    double est = 0.0;
    for (const Vector& e : box_directions(phi.dimension())) {
      Vector xb = core.radius * e;
      double slope = std::max(phi.gradient(xb).dot(e), 1e-6);
      est += std::exp(-(phi.value(xb) - core.vmin)) / slope;
    }
    m.tail_mass_ = est / fine.sum;
  }

  if (phi.dimension() == 1) {
    auto excess = [&](double r) {
      return std::min(phi.value(scalar_vec(r)), phi.value(scalar_vec(-r))) - core.vmin - 46.0;
    };
    double Rq = core.radius;
    if (excess(0.0) < 0.0 && excess(core.radius) > 0.0)
      Rq = bisect_root(excess, 0.0, core.radius, 100);

    const std::size_t N = 8193;
    m.table_x_.resize(N);
    m.table_rho_.resize(N);
    std::vector<double> raw(N);
    for (std::size_t i = 0; i < N; ++i) {
      m.table_x_[i] = -Rq + 2.0 * Rq * static_cast<double>(i) / static_cast<double>(N - 1);
      raw[i] = std::exp(-(phi.value(scalar_vec(m.table_x_[i])) - core.vmin));
    }
    double h = 2.0 * Rq / static_cast<double>(N - 1);
    std::vector<double> cum = cumulative_integral(h, raw);
    double total = cum[N - 1];
    m.table_u_.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      m.table_u_[i] = cum[i] / total;
      m.table_rho_[i] = raw[i] / total;
    }
    m.table_u_[N - 1] = 1.0;

    m.cdf_interp_ = MonotoneCubic::fit(m.table_x_, m.table_u_, m.table_rho_);
    // The cdf saturates to 1 in double precision once increments drop below
    // one ulp, so the inverse fit keeps only strictly increasing knots and
    // always retains the exact endpoints.
    std::vector<double> uq, xq, sq;
    uq.reserve(N);
    xq.reserve(N);
    sq.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
      bool last = (i == N - 1);
      if (!uq.empty() && !last &&
          !(m.table_u_[i] > uq.back() && m.table_u_[i] < 1.0))
        continue;
      uq.push_back(m.table_u_[i]);
      xq.push_back(m.table_x_[i]);
      sq.push_back(1.0 / m.table_rho_[i]);
    }
    m.quantile_interp_ = MonotoneCubic::fit(uq, xq, sq);
    m.has_table_ = true;
  }
  return m;
}

const std::vector<Vector>& Measure::nodes(Resolution r) const {
  return r == Resolution::standard ? nodes_std_ : nodes_coarse_;
}

const std::vector<double>& Measure::weights(Resolution r) const {
  return r == Resolution::standard ? w_std_ : w_coarse_;
}

double Measure::integrate(const std::function<double(const Vector&)>& f,
                          Resolution r) const {
  const auto& xs = nodes(r);
  const auto& ws = weights(r);
  KahanSum sum;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double v = f(xs[i]);
    if (!std::isfinite(v)) throw NumericalError("non-finite integrand sample");
    sum.add(ws[i] * v);
  }
  return sum.value();
}

double Measure::integrate_exp(const std::function<double(const Vector&)>& f,
                              const std::function<double(const Vector&)>& g,
                              Resolution r) const {
  const auto& xs = nodes(r);
  const auto& ws = weights(r);
  const auto& bnd = r == Resolution::standard ? boundary_std_ : boundary_coarse_;
  std::vector<double> gv(xs.size());
  double peak = -kInf, bpeak = -kInf;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    gv[i] = g(xs[i]);
    if (!std::isfinite(gv[i])) throw NumericalError("non-finite exponent sample");
    double s = gv[i] + std::log(ws[i]);
    peak = std::max(peak, s);
    if (bnd[i]) bpeak = std::max(bpeak, s);
  }
  if (bpeak > peak - 23.0)
    throw NumericalError("exp(g) integrand has not decayed at the truncation boundary");
  double m = -kInf;
  for (double v : gv) m = std::max(m, v);
  KahanSum sum;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double v = f(xs[i]);
    if (!std::isfinite(v)) throw NumericalError("non-finite integrand sample");
    sum.add(ws[i] * v * std::exp(gv[i] - m));
  }
  return std::exp(m) * sum.value();
}

double Measure::entropy(const std::function<double(const Vector&)>& g,
                        Resolution r) const {
  const auto& xs = nodes(r);
  const auto& ws = weights(r);
  const auto& bnd = r == Resolution::standard ? boundary_std_ : boundary_coarse_;
  std::vector<double> gv(xs.size());
  double m = -kInf, peak = -kInf, bpeak = -kInf;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    gv[i] = g(xs[i]);
    if (!std::isfinite(gv[i])) throw NumericalError("non-finite exponent sample");
    m = std::max(m, gv[i]);
    double s = gv[i] + std::log(ws[i]);
    peak = std::max(peak, s);
    if (bnd[i]) bpeak = std::max(bpeak, s);
  }
  if (bpeak > peak - 23.0)
    throw NumericalError("exp(g) integrand has not decayed at the truncation boundary");
  KahanSum A, B;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = std::exp(gv[i] - m);
    A.add(ws[i] * e);
    B.add(ws[i] * (gv[i] - m) * e);
  }
  double a = A.value();
  return std::exp(m) * (B.value() - a * std::log(a));
}

double Measure::entropy(const SmoothFunction& g, Resolution r) const {
  return entropy([&](const Vector& x) { return g.value(x); }, r);
}

double Measure::variance(const std::function<double(const Vector&)>& g,
                         Resolution r) const {
  double mean = integrate(g, r);
  double sq = integrate([&](const Vector& x) {
    double d = g(x) - mean;
    return d * d;
  }, r);
  return std::max(0.0, sq);
}

double Measure::variance(const SmoothFunction& g, Resolution r) const {
  return variance([&](const Vector& x) { return g.value(x); }, r);
}

double Measure::cdf(double x) const {
  if (!has_table_) throw PreconditionError("cumulative table requires dimension 1");
  if (x <= table_x_.front()) return 0.0;
  if (x >= table_x_.back()) return 1.0;
  return std::min(1.0, std::max(0.0, cdf_interp_(x)));
}

double Measure::quantile(double u) const {
  if (!has_table_) throw PreconditionError("quantile requires dimension 1");
  if (!(u >= 0.0 && u <= 1.0)) throw PreconditionError("quantile argument outside [0,1]");
  return quantile_interp_(u);
}

std::vector<double> Measure::sample_1d(std::size_t count, std::uint64_t seed) const {
  if (!has_table_) throw PreconditionError("sampling requires dimension 1");
  Rng rng(seed);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = quantile_interp_(rng.uniform01());
  return out;
}

double log_partition(const Potential& phi, double accuracy) {
  check_superlinearity(phi);
  return compute_core(phi, accuracy, 0.0).logZ;
}

}  // namespace cvxlab
