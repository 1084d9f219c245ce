#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lfo/random.hpp"

namespace lfo {

/// Parameters of the heavy-tailed step-length law
///
///   P(l) = beta / (l0 * (1 + l/l0)^(1+beta)),  l >= 0.
///
/// beta is the power index (small beta -> frequent long jumps), l0 the
/// scale factor in search-space length units, l_max an optional hard cap
/// applied to generated lengths. The physical tail law is only normalizable
/// for 0 < beta <= 2, but any beta > 0 is accepted: the computation does
/// not need to stay inside the physical range.
struct LevyParams {
  double beta = 1.5;
  double l0 = 1.0;
  std::optional<double> l_max;

  void validate() const {
    if (!(beta > 0.0)) throw std::domain_error("LevyParams: beta must be > 0");
    if (!(l0 > 0.0)) throw std::domain_error("LevyParams: l0 must be > 0");
    if (l_max && !(*l_max > 0.0))
      throw std::domain_error("LevyParams: l_max must be > 0");
  }
};

/// Density of the uncapped step-length law at l. The cap, when present,
/// is ignored here: it truncates generated samples, not the law itself.
inline double levy_pdf(double l, const LevyParams& p) {
  p.validate();
  if (l < 0.0) throw std::domain_error("levy_pdf: negative length");
  return p.beta / (p.l0 * std::pow(1.0 + l / p.l0, 1.0 + p.beta));
}

/// Closed-form CDF of the uncapped law: F(l) = 1 - (1 + l/l0)^(-beta).
inline double levy_cdf(double l, const LevyParams& p) {
  p.validate();
  if (l < 0.0) throw std::domain_error("levy_cdf: negative length");
  return 1.0 - std::pow(1.0 + l / p.l0, -p.beta);
}

/// Deterministic inverse-transform kernel: maps a uniform draw u in (0,1)
/// to a step length l0 * (u^(-1/beta) - 1), truncated at l_max when set.
/// u = 0 is outside the domain (the transform diverges there).
inline double levy_length_from_uniform(double u, const LevyParams& p) {
  p.validate();
  if (!(u > 0.0) || !(u < 1.0))
    throw std::domain_error("levy_length_from_uniform: u must lie in (0,1)");
  const double raw = p.l0 * (std::pow(u, -1.0 / p.beta) - 1.0);
  if (p.l_max && raw > *p.l_max) return *p.l_max;
  return raw;
}

/// Draws one step length. Consumes exactly one uniform draw; a draw of
/// exactly 0 (probability 2^-53) is redrawn so the transform stays finite.
inline double sample_length(const LevyParams& p, RandomSource& rng) {
  p.validate();
  double u = rng.uniform();
  while (u == 0.0) u = rng.uniform();
  return levy_length_from_uniform(u, p);
}

/// Direction vector of unit Euclidean norm.
class UnitVector {
 public:
  /// Normalizes `raw`. Throws if the norm is below 1e-12.
  static UnitVector normalized(std::vector<double> raw) {
    double n2 = 0.0;
    for (double c : raw) n2 += c * c;
    const double n = std::sqrt(n2);
    if (!(n >= 1e-12))
      throw std::domain_error("UnitVector: norm too small to normalize");
    for (double& c : raw) c /= n;
    return UnitVector(std::move(raw));
  }

  /// Coordinate-axis direction: +/-1 along axis `axis`, zero elsewhere.
  static UnitVector axis(std::size_t dim, std::size_t axis, int sign) {
    if (dim == 0 || axis >= dim)
      throw std::domain_error("UnitVector::axis: bad dimensions");
    std::vector<double> c(dim, 0.0);
    c[axis] = sign < 0 ? -1.0 : 1.0;
    return UnitVector(std::move(c));
  }

  const std::vector<double>& components() const noexcept { return coords_; }
  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  explicit UnitVector(std::vector<double> c) : coords_(std::move(c)) {}
  std::vector<double> coords_;
};

/// Uniform direction on the unit hypersphere: dim standard normals,
/// normalized. Degenerate draws (norm < 1e-12) are redrawn.
inline UnitVector sample_direction(std::size_t dim, RandomSource& rng) {
  if (dim == 0) throw std::domain_error("sample_direction: dim must be >= 1");
  std::vector<double> c(dim);
  for (;;) {
    double n2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      c[i] = rng.normal();
      n2 += c[i] * c[i];
    }
    if (std::sqrt(n2) >= 1e-12) return UnitVector::normalized(std::move(c));
  }
}

}  // namespace lfo
