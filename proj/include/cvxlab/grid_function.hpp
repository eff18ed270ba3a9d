#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "cvxlab/common.hpp"

namespace cvxlab {

// Samples of a scalar function on a uniform 1D grid.  +inf marks points
// outside the effective domain; finite samples must form one contiguous
// block and at least one sample must be finite.
class GridFunction1D {
 public:
  GridFunction1D(double lo, double hi, std::vector<double> values);

  static GridFunction1D from_samples(const std::function<double(double)>& f,
                                     double lo, double hi, std::size_t count);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t size() const { return values_.size(); }
  double spacing() const { return (hi_ - lo_) / static_cast<double>(values_.size() - 1); }
  double node(std::size_t i) const { return lo_ + spacing() * static_cast<double>(i); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  std::size_t finite_begin() const { return fin_lo_; }
  std::size_t finite_end() const { return fin_hi_; }  // one past the last finite index

  // Piecewise linear between nodes; +inf if either bracketing sample is +inf
  // or x lies outside [lo, hi].
  double interpolate(double x) const;

  void write_csv(std::ostream& os) const;
  static GridFunction1D read_csv(std::istream& is);

 private:
  double lo_, hi_;
  std::vector<double> values_;
  std::size_t fin_lo_ = 0, fin_hi_ = 0;
};

}  // namespace cvxlab
