#include <algorithm>
#include <cmath>
#include <sstream>

#include "neelgap/spectra.hpp"

namespace neelgap {

namespace {

double mollifier(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = mollifier(t);
  const double b = mollifier(1.0 - t);
  return a / (a + b);
}

CutoffFamily::CutoffFamily(CutoffParams params, int samples) : params_(params) {
  const auto& p = params_;
  if (!(p.epsilon > 0.0 && p.epsilon < 0.5)) throw DomainError("cutoff family requires 0 < epsilon < 1/2");
  if (!(p.gamma1 > 0.0 && p.gamma1 < p.gamma2)) throw DomainError("cutoff family requires 0 < gamma1 < gamma2");
  if (!(p.M1 > 0.0 && p.M2 > 0.0)) throw DomainError("cutoff family requires M1, M2 > 0");
  if (p.R < 1 || p.d < 1) throw DomainError("cutoff family requires R >= 1 and d >= 1");

  // eta^2 g1^2 = s^eps g1^2 peaks below gamma2; the bump may not exceed it
  double peak = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double s = p.gamma2 * k / samples;
    peak = std::max(peak, std::pow(eta(s) * g1(s), 2));
  }
  bump_height_ = std::min(h_bound(), peak);
  bump_width_ = std::min(std::pow(bump_height_, 1.0 / p.epsilon), 0.25 * p.gamma1);

  const GridCheck c = check_grid(std::max(4.0 * p.gamma2, 10.0), samples);
  std::ostringstream why;
  if (c.worst_eta_tail > 1e-12) {
    why << "eta^2 (1 - g1^2) <= M1 s violated by " << c.worst_eta_tail << " (need M1 >= ~gamma2^(eps-1) = "
        << std::pow(p.gamma2, p.epsilon - 1.0) << ")";
  } else if (c.worst_h > 1e-12) {
    why << "h_hat <= M2/R^(d-1) violated by " << c.worst_h;
  } else if (c.worst_order > 1e-12 || c.min_g < 0.0) {
    why << "0 <= g_hat <= eta g1 violated";
  } else if (c.max_g_outside > 0.0) {
    why << "support of g_hat leaves (0, gamma2)";
  }
  if (!why.str().empty()) throw DomainError("infeasible cutoff family: " + why.str());
}

double CutoffFamily::h_bound() const { return params_.M2 / std::pow(static_cast<double>(params_.R), params_.d - 1); }

double CutoffFamily::eta(double s) const { return s >= 0.0 ? std::pow(s, 0.5 * params_.epsilon) : 0.0; }

double CutoffFamily::g1(double s) const {
  return 1.0 - smooth_step((s - params_.gamma1) / (params_.gamma2 - params_.gamma1));
}

double CutoffFamily::bump(double s) const {
  if (bump_width_ <= 0.0) return 0.0;
  const double a = std::abs(s);
  if (a <= bump_width_) return bump_height_;
  return bump_height_ * (1.0 - smooth_step((a - bump_width_) / bump_width_));
}

double CutoffFamily::g(double s) const {
  const double top = std::pow(eta(s) * g1(s), 2);
  return std::sqrt(std::max(0.0, top - bump(s)));
}

double CutoffFamily::h(double s) const {
  const double top = std::pow(eta(s) * g1(s), 2);
  const double gs = g(s);
  return top - gs * gs;
}

CutoffFamily::GridCheck CutoffFamily::check_grid(double s_max, int samples) const {
  GridCheck c;
  c.worst_eta_tail = -std::numeric_limits<double>::infinity();
  c.worst_h = -std::numeric_limits<double>::infinity();
  c.worst_order = -std::numeric_limits<double>::infinity();
  c.min_g = std::numeric_limits<double>::infinity();
  auto visit = [&](double s) {
    const double e = eta(s);
    const double gg1 = g1(s);
    const double gv = g(s);
    if (s >= 0.0) c.worst_eta_tail = std::max(c.worst_eta_tail, e * e * (1.0 - gg1 * gg1) - params_.M1 * s);
    c.worst_h = std::max(c.worst_h, h(s) - h_bound());
    c.worst_order = std::max(c.worst_order, gv - e * gg1);
    c.min_g = std::min(c.min_g, gv);
    if (s <= 0.0 || s >= params_.gamma2) c.max_g_outside = std::max(c.max_g_outside, gv);
  };
  for (int k = 0; k <= samples; ++k) visit(-1.0 + 1.0 * k / samples);
  for (int k = 0; k <= samples; ++k) visit(s_max * k / samples);
  // the tail constraint is tightest just past gamma1 and at gamma2
  for (int k = 0; k <= samples; ++k) visit(params_.gamma1 + (params_.gamma2 - params_.gamma1) * k / samples);
  return c;
}

}  // namespace neelgap
