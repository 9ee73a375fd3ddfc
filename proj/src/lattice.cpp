#include "neelgap/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace neelgap {

Spin Spin::from_double(double s) {
  const double twice = 2.0 * s;
  const double rounded = std::round(twice);
  if (s <= 0.0 || std::abs(twice - rounded) > 1e-12) {
    throw DomainError("spin magnitude must be a positive half-integer, got " + std::to_string(s));
  }
  return Spin{static_cast<int>(rounded)};
}

Lattice::Lattice(LatticeSpec spec, LatticeLimits limits) : spec_(spec) {
  if (spec_.d < 1) throw DomainError("lattice dimension must be >= 1");
  if (spec_.L < 1) throw DomainError("half side length L must be >= 1");
  if (spec_.spin.two_s < 1) throw DomainError("spin magnitude must be >= 1/2");

  const int side = 2 * spec_.L;
  const double sites_f = std::pow(static_cast<double>(side), spec_.d);
  if (limits.max_state_bits) {
    const double bits = sites_f * std::log2(static_cast<double>(spec_.spin.local_dim()));
    if (bits > *limits.max_state_bits) {
      throw CapacityError("state space of " + std::to_string(bits) + " bits exceeds cap of " +
                        std::to_string(*limits.max_state_bits));
    }
  }
  if (sites_f > 1e7) throw CapacityError("lattice geometry too large");

  const auto n = static_cast<std::size_t>(sites_f);
  sites_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Site s;
    s.index = i;
    s.coords.assign(spec_.d, 0);
    std::size_t rest = i;
    for (int axis = spec_.d - 1; axis >= 0; --axis) {
      s.coords[axis] = static_cast<int>(rest % side) - spec_.L + 1;
      rest /= side;
    }
    int sum = 0;
    for (int c : s.coords) sum += c;
    s.sign = (sum % 2 == 0) ? 1 : -1;
    sites_.push_back(std::move(s));
  }

  std::set<std::pair<std::size_t, std::size_t>> unique;
  for (const auto& s : sites_) {
    for (int axis = 0; axis < spec_.d; ++axis) {
      auto c = s.coords;
      c[axis] += 1;
      const std::size_t j = index_of(c);
      if (j == s.index) continue;
      unique.emplace(std::min(s.index, j), std::max(s.index, j));
    }
  }
  bonds_.reserve(unique.size());
  neighbours_.assign(n, {});
  for (const auto& [a, b] : unique) {
    bonds_.push_back(Bond{a, b});
    neighbours_[a].push_back(b);
    neighbours_[b].push_back(a);
  }
  for (auto& nb : neighbours_) std::sort(nb.begin(), nb.end());
}

std::size_t Lattice::index_of(std::vector<int> coords) const {
  if (static_cast<int>(coords.size()) != spec_.d) throw DomainError("coordinate rank mismatch");
  const int side = 2 * spec_.L;
  std::size_t idx = 0;
  for (int axis = 0; axis < spec_.d; ++axis) {
    int shifted = (coords[axis] + spec_.L - 1) % side;
    if (shifted < 0) shifted += side;
    idx = idx * side + static_cast<std::size_t>(shifted);
  }
  return idx;
}

int Lattice::sup_norm(std::size_t i) const {
  int m = 0;
  for (int c : sites_.at(i).coords) m = std::max(m, std::abs(c));
  return m;
}

double Lattice::state_bits() const {
  return static_cast<double>(num_sites()) * std::log2(static_cast<double>(spec_.spin.local_dim()));
}

nlohmann::json Lattice::summary() const {
  nlohmann::json j;
  j["d"] = spec_.d;
  j["L"] = spec_.L;
  j["S"] = spec_.spin.value();
  j["num_sites"] = num_sites();
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& s : sites_) {
    sites.push_back({{"index", s.index}, {"coords", s.coords}, {"sign", s.sign}});
  }
  j["sites"] = std::move(sites);
  nlohmann::json bonds = nlohmann::json::array();
  for (const auto& b : bonds_) bonds.push_back({b.a, b.b});
  j["bonds"] = std::move(bonds);
  return j;
}

Lattice build_lattice(const LatticeSpec& spec, LatticeLimits limits) { return Lattice(spec, limits); }

bool region_fits(const Lattice& lattice, int R) { return R >= 0 && R <= lattice.half_side() - 1; }

bool ramp_fits(const Lattice& lattice, int R) { return R >= 1 && 2 * R <= lattice.half_side() - 1; }

Region region(const Lattice& lattice, int R, bool allow_clip) {
  if (R < 0) throw DomainError("region radius must be non-negative");
  const bool fits = region_fits(lattice, R);
  if (!fits && !allow_clip) {
    throw DomainError("Omega_" + std::to_string(R) + " does not fit inside the lattice with L=" +
                      std::to_string(lattice.half_side()));
  }
  Region out;
  out.R = R;
  out.clipped = !fits;
  for (std::size_t i = 0; i < lattice.num_sites(); ++i) {
    if (lattice.sup_norm(i) <= R) out.sites.push_back(i);
  }
  return out;
}

RampField ramp_field(const Lattice& lattice, int R, bool allow_clip) {
  if (R < 1) throw DomainError("ramp radius must be >= 1");
  const bool fits = ramp_fits(lattice, R);
  if (!fits && !allow_clip) {
    throw DomainError("ramp support Omega_" + std::to_string(2 * R) +
                      " does not fit inside the lattice with L=" + std::to_string(lattice.half_side()));
  }
  RampField f;
  f.R = R;
  f.clipped = !fits;
  f.values.resize(lattice.num_sites());
  for (std::size_t i = 0; i < lattice.num_sites(); ++i) {
    const int r = lattice.sup_norm(i);
    if (r <= R + 1) {
      f.values[i] = 1.0;
    } else if (r <= 2 * R) {
      f.values[i] = 1.0 - static_cast<double>(r - (R + 1)) / static_cast<double>(R);
    } else {
      f.values[i] = 0.0;
    }
  }
  return f;
}

Momentum momentum_at(const Lattice& lattice, const std::vector<int>& n) {
  const int d = lattice.dim();
  const int L = lattice.half_side();
  if (static_cast<int>(n.size()) != d) throw DomainError("momentum rank mismatch");
  Momentum m;
  m.n = n;
  m.p.resize(d);
  double cos_sum = 0.0;
  for (int i = 0; i < d; ++i) {
    if (n[i] < -L + 1 || n[i] > L) throw DomainError("momentum index off the grid");
    m.p[i] = std::numbers::pi * n[i] / L;
    // exact values at the symmetric points keep eps, eps' free of rounding noise
    if (n[i] == 0) {
      cos_sum += 1.0;
    } else if (n[i] == L) {
      cos_sum -= 1.0;
    } else if (2 * n[i] == L || 2 * n[i] == -L) {
      cos_sum += 0.0;
    } else {
      cos_sum += std::cos(m.p[i]);
    }
  }
  m.eps = d - cos_sum;
  m.eps_prime = d + cos_sum;
  return m;
}

Momentum negate(const Lattice& lattice, const Momentum& p) {
  const int L = lattice.half_side();
  std::vector<int> n(p.n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    int v = -p.n[i];
    if (v < -L + 1) v += 2 * L;
    n[i] = v;
  }
  return momentum_at(lattice, n);
}

MomentumGrid momentum_grid(const Lattice& lattice) {
  const int d = lattice.dim();
  const int L = lattice.half_side();
  MomentumGrid grid;
  std::vector<int> n(d, -L + 1);
  while (true) {
    grid.points.push_back(momentum_at(lattice, n));
    int axis = d - 1;
    while (axis >= 0 && n[axis] == L) {
      n[axis] = -L + 1;
      --axis;
    }
    if (axis < 0) break;
    ++n[axis];
  }
  return grid;
}

}  // namespace neelgap
