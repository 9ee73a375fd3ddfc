#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace neelgap {

/// One checked inequality lhs <= rhs (identities are stored as |difference| <= 0).
struct InequalityReport {
  std::string name;
  std::string anchor;  // the statement being checked, in plain notation
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, double> intermediates;
  std::vector<std::string> flags;
  std::vector<InequalityReport> steps;

  /// Fills slack and pass from lhs, rhs, tolerance.
  InequalityReport& settle();
  bool all_pass() const;
};

InequalityReport make_inequality(std::string name, std::string anchor, double lhs, double rhs, double tolerance);
/// |a - b| <= tol * max(1, |a|, |b|)
InequalityReport make_identity(std::string name, std::string anchor, double a, double b, double rel_tol);

struct ScalingReport {
  std::string name;
  std::vector<double> R_values;
  std::vector<double> values;
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;
  double predicted_exponent = 0.0;
  double exponent_tolerance = 0.0;
  std::optional<bool> pass;  // unset when too few points to judge

  /// Least squares on log-log; needs at least two positive points.
  void fit();
};

nlohmann::json to_json(const InequalityReport& r);
nlohmann::json to_json(const ScalingReport& r);

}  // namespace neelgap
