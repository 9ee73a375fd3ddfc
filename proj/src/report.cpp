#include "neelgap/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace neelgap {

InequalityReport& InequalityReport::settle() {
  slack = rhs - lhs;
  pass = std::isfinite(slack) && slack >= -tolerance;
  return *this;
}

bool InequalityReport::all_pass() const {
  if (!pass) return false;
  return std::all_of(steps.begin(), steps.end(), [](const InequalityReport& s) { return s.all_pass(); });
}

InequalityReport make_inequality(std::string name, std::string anchor, double lhs, double rhs, double tolerance) {
  InequalityReport r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tolerance;
  r.settle();
  return r;
}

InequalityReport make_identity(std::string name, std::string anchor, double a, double b, double rel_tol) {
  InequalityReport r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.lhs = std::abs(a - b);
  r.rhs = 0.0;
  r.tolerance = rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
  r.intermediates["a"] = a;
  r.intermediates["b"] = b;
  r.settle();
  return r;
}

void ScalingReport::fit() {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < R_values.size() && i < values.size(); ++i) {
    if (R_values[i] > 0.0 && values[i] > 0.0) {
      x.push_back(std::log(R_values[i]));
      y.push_back(std::log(values[i]));
    }
  }
  if (x.size() < 2) throw std::invalid_argument("scaling fit needs two positive points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - exponent * sx) / n;
  prefactor = std::exp(intercept);
  residual = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (intercept + exponent * x[i]);
    residual += e * e;
  }
  residual = std::sqrt(residual / n);
  if (x.size() >= 3 && exponent_tolerance > 0.0) {
    pass = std::abs(exponent - predicted_exponent) <= exponent_tolerance;
  } else {
    pass.reset();
  }
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["anchor"] = r.anchor;
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["slack"] = number(r.slack);
  j["tolerance"] = number(r.tolerance);
  j["pass"] = r.pass;
  nlohmann::json inter = nlohmann::json::object();
  for (const auto& [k, v] : r.intermediates) inter[k] = number(v);
  j["intermediates"] = inter;
  if (!r.flags.empty()) j["flags"] = r.flags;
  if (!r.steps.empty()) {
    j["steps"] = nlohmann::json::array();
    for (const auto& s : r.steps) j["steps"].push_back(to_json(s));
  }
  return j;
}

nlohmann::json to_json(const ScalingReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["R_values"] = r.R_values;
  nlohmann::json vals = nlohmann::json::array();
  for (double v : r.values) vals.push_back(number(v));
  j["values"] = vals;
  j["exponent"] = number(r.exponent);
  j["prefactor"] = number(r.prefactor);
  j["residual"] = number(r.residual);
  j["predicted_exponent"] = r.predicted_exponent;
  j["exponent_tolerance"] = r.exponent_tolerance;
  j["pass"] = r.pass ? nlohmann::json(*r.pass) : nlohmann::json(nullptr);
  return j;
}

}  // namespace neelgap
