#pragma once

#include <Eigen/Core>
#include <limits>
#include <stdexcept>
#include <string>

namespace cvxlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A stated hypothesis of an inequality or operation does not hold for the
// given inputs.  Callers running batch suites turn these into skips.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative solver or quadrature failed to reach its target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Vector scalar_vec(double x) {
  Vector v(1);
  v[0] = x;
  return v;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace cvxlab
