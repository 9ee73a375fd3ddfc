#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace neelgap {

/// Thrown when a requested configuration cannot be represented (lattice too
/// large, region that would wrap around the torus, off-grid momentum, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A size cap was hit: the request is well formed but too large to run.
class CapacityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Spin magnitude stored as the integer 2S so that half-integers are exact.
struct Spin {
  int two_s = 1;

  static Spin from_double(double s);
  double value() const { return 0.5 * two_s; }
  int local_dim() const { return two_s + 1; }
};

struct LatticeSpec {
  int d = 1;
  int L = 1;  // half side length, side = 2L
  Spin spin{};
};

struct LatticeLimits {
  /// Upper bound on log2 of the full Hilbert-space dimension. Geometry-only
  /// callers (cluster computations) pass std::nullopt.
  std::optional<double> max_state_bits = 62.0;
};

struct Site {
  std::vector<int> coords;  // each in {-L+1, ..., L}
  std::size_t index = 0;
  int sign = 1;  // (-1)^{x1+...+xd}
};

struct Bond {
  std::size_t a = 0;  // a < b
  std::size_t b = 0;
  friend bool operator==(const Bond&, const Bond&) = default;
};

struct Region {
  int R = 0;
  std::vector<std::size_t> sites;  // ascending site indices
  bool clipped = false;            // true when Omega_R does not fit inside the torus
};

struct RampField {
  int R = 0;
  std::vector<double> values;  // indexed by site
  bool clipped = false;
};

struct Momentum {
  std::vector<int> n;  // p_i = pi * n_i / L, n_i in {-L+1, ..., L}
  std::vector<double> p;
  double eps = 0.0;        // d - sum cos p_i
  double eps_prime = 0.0;  // d + sum cos p_i
};

struct MomentumGrid {
  std::vector<Momentum> points;
};

/// Periodic hypercube {-L+1,...,L}^d. Sites are indexed lexicographically on
/// the shifted coordinates (x_i + L - 1) with the first axis most significant.
class Lattice {
 public:
  explicit Lattice(LatticeSpec spec, LatticeLimits limits = {});

  const LatticeSpec& spec() const { return spec_; }
  int dim() const { return spec_.d; }
  int half_side() const { return spec_.L; }
  int side() const { return 2 * spec_.L; }
  Spin spin() const { return spec_.spin; }
  std::size_t num_sites() const { return sites_.size(); }

  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const Site& site(std::size_t i) const { return sites_.at(i); }

  /// Index of the site with the given coordinates, wrapped into the box.
  std::size_t index_of(std::vector<int> coords) const;
  /// Distinct nearest neighbours of a site under the periodic wrap.
  const std::vector<std::size_t>& neighbours(std::size_t i) const { return neighbours_.at(i); }
  /// max_i |x_i| of the site's box coordinates (no wrap).
  int sup_norm(std::size_t i) const;

  /// log2 of the full Hilbert-space dimension.
  double state_bits() const;

  nlohmann::json summary() const;

 private:
  LatticeSpec spec_;
  std::vector<Site> sites_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<std::size_t>> neighbours_;
};

Lattice build_lattice(const LatticeSpec& spec, LatticeLimits limits = {});

/// Omega_R = {|x|_inf <= R}. With allow_clip=false the region must lie inside
/// the box; otherwise the intersection with the box is returned and flagged.
Region region(const Lattice& lattice, int R, bool allow_clip = false);

/// The plateau/ramp/zero profile: 1 on Omega_{R+1}, 1-(|x|-(R+1))/R on
/// Omega_{2R} minus Omega_{R+1}, 0 outside. Requires 2R <= L-1 unless
/// allow_clip is set, in which case the profile is evaluated on box
/// coordinates and the result is flagged.
RampField ramp_field(const Lattice& lattice, int R, bool allow_clip = false);

/// True when Omega_{2R} fits strictly inside the box.
bool ramp_fits(const Lattice& lattice, int R);
/// True when Omega_R fits inside the box.
bool region_fits(const Lattice& lattice, int R);

MomentumGrid momentum_grid(const Lattice& lattice);
Momentum momentum_at(const Lattice& lattice, const std::vector<int>& n);
/// Negated momentum, wrapped back onto the grid.
Momentum negate(const Lattice& lattice, const Momentum& p);

}  // namespace neelgap
