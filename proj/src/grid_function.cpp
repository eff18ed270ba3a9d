#include "cvxlab/grid_function.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace cvxlab {
namespace {

void append_real(std::string& out, double v) {
  if (std::isinf(v)) {
    out += "inf";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

double parse_real(const std::string& tok) {
  if (tok == "inf" || tok == "+inf") return kInf;
  std::size_t pos = 0;
  double v = std::stod(tok, &pos);
  if (pos != tok.size()) throw PreconditionError("bad numeric field '" + tok + "'");
  return v;
}

}  // namespace

GridFunction1D::GridFunction1D(double lo, double hi, std::vector<double> values)
    : lo_(lo), hi_(hi), values_(std::move(values)) {
  if (values_.size() < 2) throw PreconditionError("grid needs at least 2 samples");
  if (!(lo_ < hi_)) throw PreconditionError("grid bounds must satisfy lo < hi");
  std::size_t first = values_.size(), last = values_.size();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double v = values_[i];
    if (std::isnan(v) || v == -kInf)
      throw PreconditionError("grid samples must be finite or +inf");
    if (std::isfinite(v)) {
      if (first == values_.size()) first = i;
      last = i;
    }
  }
  if (first == values_.size()) throw PreconditionError("grid has no finite sample");
  for (std::size_t i = first; i <= last; ++i)
    if (!std::isfinite(values_[i]))
      throw PreconditionError("finite samples must form a contiguous block");
  fin_lo_ = first;
  fin_hi_ = last + 1;
}

GridFunction1D GridFunction1D::from_samples(const std::function<double(double)>& f,
                                            double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = f(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  return GridFunction1D(lo, hi, std::move(v));
}

double GridFunction1D::interpolate(double x) const {
  if (x < lo_ || x > hi_) return kInf;
  double h = spacing();
  double u = (x - lo_) / h;
  std::size_t i = static_cast<std::size_t>(u);
  if (i >= values_.size() - 1) i = values_.size() - 2;
  double t = u - static_cast<double>(i);
  if (t <= 1e-12) return values_[i];
  if (t >= 1.0 - 1e-12) return values_[i + 1];
  if (!std::isfinite(values_[i]) || !std::isfinite(values_[i + 1])) return kInf;
  return (1.0 - t) * values_[i] + t * values_[i + 1];
}

void GridFunction1D::write_csv(std::ostream& os) const {
  std::string out = "x,value\n";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    append_real(out, node(i));
    out += ',';
    append_real(out, values_[i]);
    out += '\n';
  }
  os << out;
}

GridFunction1D GridFunction1D::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw PreconditionError("empty grid CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,value") throw PreconditionError("grid CSV must start with 'x,value'");
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw PreconditionError("grid CSV row without comma");
    xs.push_back(parse_real(line.substr(0, comma)));
    vs.push_back(parse_real(line.substr(comma + 1)));
  }
  if (xs.size() < 2) throw PreconditionError("grid CSV needs at least 2 rows");
  double lo = xs.front(), hi = xs.back();
  double h = (hi - lo) / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - (lo + h * static_cast<double>(i))) > 1e-9 * (1.0 + std::abs(hi - lo)))
      throw PreconditionError("grid CSV nodes are not uniformly spaced");
  return GridFunction1D(lo, hi, std::move(vs));
}

}  // namespace cvxlab
