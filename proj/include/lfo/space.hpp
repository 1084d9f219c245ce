#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lfo/levy.hpp"
#include "lfo/random.hpp"

namespace lfo {

using Point = std::vector<double>;

/// What happens when a move would leave the feasible region:
///  - Resample: redraw the whole move (length and direction) up to
///    max_retries times, then fall back to clipping.
///  - ClipToEdge: stop the move where its ray hits the bounding box.
struct BoundaryPolicy {
  enum class Kind { Resample, ClipToEdge };

  Kind kind = Kind::ClipToEdge;
  std::uint32_t max_retries = 100;

  static BoundaryPolicy clip() { return {Kind::ClipToEdge, 100}; }
  static BoundaryPolicy resample(std::uint32_t max_retries = 100) {
    if (max_retries < 1)
      throw std::domain_error("BoundaryPolicy: max_retries must be >= 1");
    return {Kind::Resample, max_retries};
  }
};

/// Bounded box, optional constraint predicate, and the boundary policy
/// moves in this space obey.
struct SearchSpace {
  std::size_t dim = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::function<bool(const Point&)> constraint;  // empty = box only
  BoundaryPolicy boundary_policy = BoundaryPolicy::clip();

  void validate() const {
    if (dim == 0) throw std::domain_error("SearchSpace: dim must be >= 1");
    if (lower.size() != dim || upper.size() != dim)
      throw std::domain_error("SearchSpace: bound vectors must match dim");
    for (std::size_t i = 0; i < dim; ++i)
      if (!(lower[i] < upper[i]))
        throw std::domain_error("SearchSpace: lower must be < upper");
  }

  /// Largest box edge, the length unit for scale-relative settings.
  double max_extent() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim; ++i) m = std::max(m, upper[i] - lower[i]);
    return m;
  }
};

/// True iff x lies inside the bounding box (componentwise) and satisfies
/// the constraint predicate when one is present.
inline bool is_feasible(const SearchSpace& space, const Point& x) {
  if (x.size() != space.dim)
    throw std::domain_error("is_feasible: dimension mismatch");
  for (std::size_t i = 0; i < space.dim; ++i)
    if (x[i] < space.lower[i] || x[i] > space.upper[i]) return false;
  if (space.constraint && !space.constraint(x)) return false;
  return true;
}

/// Uniform feasible point; rejection-samples the box until the constraint
/// (if any) holds.
inline Point random_feasible_point(const SearchSpace& space, RandomSource& rng,
                                   std::uint32_t max_tries = 100000) {
  space.validate();
  Point x(space.dim);
  for (std::uint32_t t = 0; t < max_tries; ++t) {
    for (std::size_t i = 0; i < space.dim; ++i)
      x[i] = space.lower[i] + rng.uniform() * (space.upper[i] - space.lower[i]);
    if (is_feasible(space, x)) return x;
  }
  throw std::runtime_error(
      "random_feasible_point: no feasible point found; constraint too tight?");
}

namespace detail {

/// Ray-box truncation: returns from + t*·length·dir with the largest
/// t* in [0,1] that stays inside the box. Preserves the move's direction,
/// unlike componentwise clamping.
inline Point clip_move_to_box(const Point& from, double length,
                              const UnitVector& dir, const SearchSpace& space) {
  double t = 1.0;
  for (std::size_t i = 0; i < space.dim; ++i) {
    const double step = length * dir[i];
    if (step > 0.0)
      t = std::min(t, (space.upper[i] - from[i]) / step);
    else if (step < 0.0)
      t = std::min(t, (space.lower[i] - from[i]) / step);
  }
  t = std::max(t, 0.0);
  Point out(space.dim);
  for (std::size_t i = 0; i < space.dim; ++i) {
    out[i] = from[i] + t * length * dir[i];
    out[i] = std::clamp(out[i], space.lower[i], space.upper[i]);  // FP guard
  }
  return out;
}

// Retry budget for constraint-violating clipped moves: direction-only
// redraws before the walker stays put.
inline constexpr std::uint32_t kClipConstraintRetries = 100;

template <typename LengthFn>
Point propose_clip(const Point& from, double length, const UnitVector& dir,
                   const SearchSpace& space, RandomSource& rng) {
  Point cand = clip_move_to_box(from, length, dir, space);
  if (!space.constraint || space.constraint(cand)) return cand;
  // Clipped point violates the constraint: redraw the direction (only)
  // and re-truncate; give up and stay put after the retry budget.
  for (std::uint32_t t = 0; t < kClipConstraintRetries; ++t) {
    const UnitVector d = sample_direction(space.dim, rng);
    cand = clip_move_to_box(from, length, d, space);
    if (space.constraint(cand)) return cand;
  }
  return from;
}

}  // namespace detail

/// Moves from `from` by `length` along `dir`, honoring the space's
/// boundary policy. The returned point is always feasible.
///
/// ClipToEdge: ray-box truncation; if a constraint predicate rejects the
/// truncated point, the direction (only) is redrawn up to 100 times, after
/// which the move degenerates to staying at `from`. Consumes no rng draws
/// when the truncated point is feasible, in particular always when the
/// space has no constraint.
///
/// Resample: the unclipped candidate is tested; if infeasible, length and
/// direction are redrawn (`redraw_length(rng)` then sample_direction) up
/// to max_retries times, with ClipToEdge of the last redrawn move as the
/// final fallback.
///
/// `redraw_length` supplies retry lengths so each caller keeps its own move
/// law (heavy-tailed jumps, uniform SA steps, constant probe steps).
template <typename LengthFn>
Point propose_move(const Point& from, double length, const UnitVector& dir,
                   const SearchSpace& space, RandomSource& rng,
                   LengthFn&& redraw_length) {
  if (length < 0.0) throw std::domain_error("propose_move: negative length");
  if (dir.dim() != space.dim)
    throw std::domain_error("propose_move: direction dimension mismatch");
  if (!is_feasible(space, from))
    throw std::domain_error("propose_move: infeasible starting point");

  if (space.boundary_policy.kind == BoundaryPolicy::Kind::ClipToEdge)
    return detail::propose_clip<LengthFn>(from, length, dir, space, rng);

  Point cand(space.dim);
  double l = length;
  const UnitVector* d = &dir;
  UnitVector redrawn = dir;  // storage for retries
  for (std::uint32_t attempt = 0;; ++attempt) {
    for (std::size_t i = 0; i < space.dim; ++i) cand[i] = from[i] + l * (*d)[i];
    if (is_feasible(space, cand)) return cand;
    if (attempt >= space.boundary_policy.max_retries) break;
    l = redraw_length(rng);
    redrawn = sample_direction(space.dim, rng);
    d = &redrawn;
  }
  return detail::propose_clip<LengthFn>(from, l, *d, space, rng);
}

/// Overload for callers whose retries reuse the original length.
inline Point propose_move(const Point& from, double length,
                          const UnitVector& dir, const SearchSpace& space,
                          RandomSource& rng) {
  return propose_move(from, length, dir, space, rng,
                      [length](RandomSource&) { return length; });
}

}  // namespace lfo
