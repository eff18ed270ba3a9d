#include "cvxlab/report.hpp"

#include <cmath>

namespace cvxlab {

const char* to_string(Status s) {
  switch (s) {
    case Status::holds: return "holds";
    case Status::equality: return "equality";
    case Status::violated: return "violated";
  }
  return "?";
}

VerificationReport make_report(std::string name, double lhs, double rhs,
                               double tolerance, double eq_tol) {
  VerificationReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.rel_margin = r.margin / std::max(1.0, std::abs(rhs));
  r.tolerance = tolerance;
  if (r.margin < -tolerance)
    r.status = Status::violated;
  else if (std::abs(r.margin) <= eq_tol * std::max(1.0, std::abs(rhs)))
    r.status = Status::equality;
  else
    r.status = Status::holds;
  return r;
}

ordered_json to_json(const VerificationReport& r) {
  ordered_json j;
  j["name"] = r.name;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["margin"] = r.margin;
  j["rel_margin"] = r.rel_margin;
  j["status"] = to_string(r.status);
  j["tolerance"] = r.tolerance;
  if (r.witness) {
    ordered_json w = ordered_json::array();
    for (int i = 0; i < r.witness->size(); ++i) w.push_back((*r.witness)[i]);
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  j["meta"] = r.meta;
  return j;
}

VerificationReport report_from_json(const ordered_json& j) {
  VerificationReport r;
  r.name = j.at("name").get<std::string>();
  r.lhs = j.at("lhs").get<double>();
  r.rhs = j.at("rhs").get<double>();
  r.margin = j.at("margin").get<double>();
  r.rel_margin = j.at("rel_margin").get<double>();
  std::string st = j.at("status").get<std::string>();
  r.status = st == "holds" ? Status::holds
                           : (st == "equality" ? Status::equality : Status::violated);
  r.tolerance = j.at("tolerance").get<double>();
  if (!j.at("witness").is_null()) {
    const auto& w = j.at("witness");
    Vector v(static_cast<int>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) v[static_cast<int>(i)] = w[i].get<double>();
    r.witness = v;
  }
  r.meta = j.at("meta");
  return r;
}

}  // namespace cvxlab
