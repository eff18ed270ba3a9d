#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "cvxlab/common.hpp"

namespace cvxlab {

using ordered_json = nlohmann::ordered_json;

enum class Status { holds, equality, violated };

const char* to_string(Status s);

struct VerificationReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;      // rhs - lhs
  double rel_margin = 0.0;  // margin / max(1, |rhs|)
  Status status = Status::holds;
  double tolerance = 0.0;
  std::optional<Vector> witness;
  ordered_json meta = ordered_json::object();
};

// margin below -tolerance is a violation; |margin| within eq_tol (relative
// to max(1, |rhs|)) of zero marks the equality case.
VerificationReport make_report(std::string name, double lhs, double rhs,
                               double tolerance, double eq_tol = 1e-6);

ordered_json to_json(const VerificationReport& r);
VerificationReport report_from_json(const ordered_json& j);

}  // namespace cvxlab
