#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lfo/space.hpp"

namespace lfo {

/// A user/config mistake (unknown name, bad dimension, bad flag value),
/// as opposed to a runtime failure.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EvaluatedPoint {
  Point point;
  double value = 0.0;
};

/// A named objective function over a search space, with optional known
/// optimum metadata for stopping / quality reporting. Evaluation is pure;
/// instances can be shared across threads.
class Objective {
 public:
  Objective(std::string name, SearchSpace space,
            std::function<double(const Point&)> fn,
            std::optional<double> known_best = std::nullopt)
      : name_(std::move(name)),
        space_(std::move(space)),
        fn_(std::move(fn)),
        known_best_(known_best) {
    space_.validate();
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return space_.dim; }
  const SearchSpace& space() const noexcept { return space_; }
  const std::optional<double>& known_best_value() const noexcept {
    return known_best_;
  }

  double operator()(const Point& x) const { return fn_(x); }

  EvaluatedPoint evaluate_at(Point x) const {
    const double v = fn_(x);
    return {std::move(x), v};
  }

  void set_boundary_policy(BoundaryPolicy p) { space_.boundary_policy = p; }

 private:
  std::string name_;
  SearchSpace space_;
  std::function<double(const Point&)> fn_;
  std::optional<double> known_best_;
};

/// Counted-evaluation seam. Optimizers evaluate through a sink so that a
/// single budget covers every objective call, including those made inside
/// nested local searches.
class EvalSink {
 public:
  virtual ~EvalSink() = default;
  virtual bool can_evaluate() const = 0;
  virtual double evaluate(const Point& x) = 0;
  virtual std::uint64_t evals_used() const = 0;

  EvaluatedPoint evaluate_point(Point x) {
    const double v = evaluate(x);
    return {std::move(x), v};
  }
};

/// Minimal sink: counts calls against an optional cap. Enough for running
/// a local search standalone.
class CountingEvalSink : public EvalSink {
 public:
  explicit CountingEvalSink(const Objective& obj,
                            std::optional<std::uint64_t> cap = std::nullopt)
      : obj_(obj), cap_(cap) {}

  bool can_evaluate() const override { return !cap_ || used_ < *cap_; }

  double evaluate(const Point& x) override {
    if (!can_evaluate())
      throw std::logic_error("CountingEvalSink: evaluation budget exceeded");
    ++used_;
    return obj_(x);
  }

  std::uint64_t evals_used() const override { return used_; }

 private:
  const Objective& obj_;
  std::optional<std::uint64_t> cap_;
  std::uint64_t used_ = 0;
};

// ---------------------------------------------------------------------------
// The five benchmark functions.
// ---------------------------------------------------------------------------

inline double signum(double v) noexcept {
  return static_cast<double>(v > 0.0) - static_cast<double>(v < 0.0);
}

/// Corana's discontinuous function of 4 variables: a grid of flat
/// rectangular wells cut into the paraboloid sum d_i x_i^2.
inline double evaluate_f0(const Point& x) {
  if (x.size() != 4) throw std::domain_error("f0 takes exactly 4 variables");
  constexpr double s = 0.2;
  constexpr double t = 0.05;
  constexpr double c = 0.15;
  constexpr double d[4] = {1.0, 1000.0, 10.0, 100.0};
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double z =
        std::floor(std::abs(x[i] / s) + 0.49999) * signum(x[i]) * s;
    if (std::abs(x[i] - z) < t) {
      const double w = t * signum(z) + z;
      total += w * w * c * d[i];
    } else {
      total += d[i] * x[i] * x[i];
    }
  }
  return total;
}

/// Generalized Rosenbrock saddle.
inline double evaluate_f2(const Point& x) {
  if (x.size() < 2) throw std::domain_error("f2 needs at least 2 variables");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i] * x[i] - x[i + 1];
    const double b = 1.0 - x[i];
    total += 100.0 * a * a + b * b;
  }
  return total;
}

namespace detail {
// Shekel's foxholes node table: a1 cycles {-32,-16,0,16,32}, a2 repeats
// each value five times.
inline double foxhole_node(int j, int coord) {
  constexpr double base[5] = {-32.0, -16.0, 0.0, 16.0, 32.0};
  return coord == 0 ? base[j % 5] : base[j / 5];
}
}  // namespace detail

/// Shekel's foxholes, 2-D: 25 narrow wells on a 16-spaced grid, value
/// near 500 away from every well.
inline double evaluate_f5(const Point& x) {
  if (x.size() != 2) throw std::domain_error("f5 takes exactly 2 variables");
  double s = 1.0 / 500.0;
  for (int j = 0; j < 25; ++j) {
    const double d1 = x[0] - detail::foxhole_node(j, 0);
    const double d2 = x[1] - detail::foxhole_node(j, 1);
    const double d1c = d1 * d1 * d1;
    const double d2c = d2 * d2 * d2;
    s += 1.0 / (static_cast<double>(j + 1) + d1c * d1c + d2c * d2c);
  }
  return 1.0 / s;
}

/// Rastrigin's function.
inline double evaluate_f6(const Point& x) {
  if (x.empty()) throw std::domain_error("f6 needs at least 1 variable");
  constexpr double two_pi = 2.0 * 3.14159265358979323846;
  double total = 10.0 * static_cast<double>(x.size());
  for (const double xi : x) total += xi * xi - 10.0 * std::cos(two_pi * xi);
  return total;
}

/// Keane's bump, recast for minimization (1 minus the classical ratio).
/// Total on the bounding box; the product/sum constraints live in the
/// space's feasibility predicate, not here.
inline double evaluate_bump(const Point& x) {
  if (x.size() < 2) throw std::domain_error("bump needs at least 2 variables");
  double sum4 = 0.0;
  double prod2 = 1.0;
  double wsum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = std::cos(x[i]);
    const double c2 = c * c;
    sum4 += c2 * c2;
    prod2 *= c2;
    wsum += static_cast<double>(i + 1) * x[i] * x[i];
  }
  if (wsum <= 0.0)
    throw std::domain_error("bump undefined where sum i*x_i^2 is zero");
  return 1.0 - std::abs(sum4 - 2.0 * prod2) / std::sqrt(wsum);
}

// ---------------------------------------------------------------------------
// Registry.
// ---------------------------------------------------------------------------

struct ObjectiveSpec {
  std::string name;
  std::size_t default_dim;
  bool fixed_dim;
  std::size_t min_dim;
};

inline const std::vector<ObjectiveSpec>& objective_catalog() {
  static const std::vector<ObjectiveSpec> catalog = {
      {"f0", 4, true, 4},   {"f2", 10, false, 2}, {"f5", 2, true, 2},
      {"f6", 10, false, 1}, {"bump", 50, false, 2},
  };
  return catalog;
}

inline std::vector<std::string> objective_names() {
  std::vector<std::string> names;
  for (const auto& s : objective_catalog()) names.push_back(s.name);
  return names;
}

namespace detail {

inline SearchSpace uniform_box(std::size_t dim, double lo, double hi,
                               BoundaryPolicy policy) {
  SearchSpace s;
  s.dim = dim;
  s.lower.assign(dim, lo);
  s.upper.assign(dim, hi);
  s.boundary_policy = policy;
  return s;
}

inline bool bump_constraint(const Point& x) {
  double prod = 1.0;
  double sum = 0.0;
  for (const double xi : x) {
    if (xi <= 0.0 || xi >= 10.0) return false;
    prod *= xi;
    sum += xi;
  }
  return prod > 0.75 && sum < 7.5 * static_cast<double>(x.size());
}

}  // namespace detail

/// Builds one of the registered objectives ("f0", "f2", "f5", "f6",
/// "bump"). Fixed-dimension functions reject a mismatching dim; the rest
/// use their conventional defaults when dim is omitted.
inline Objective make_objective(const std::string& name,
                                std::optional<std::size_t> dim = std::nullopt,
                                BoundaryPolicy policy = BoundaryPolicy::clip()) {
  const ObjectiveSpec* spec = nullptr;
  for (const auto& s : objective_catalog())
    if (s.name == name) spec = &s;
  if (!spec) throw ConfigError("unknown objective: " + name);

  const std::size_t n = dim.value_or(spec->default_dim);
  if (spec->fixed_dim && n != spec->default_dim)
    throw ConfigError(name + " has fixed dimension " +
                      std::to_string(spec->default_dim));
  if (n < spec->min_dim)
    throw ConfigError(name + " needs dimension >= " +
                      std::to_string(spec->min_dim));

  if (name == "f0")
    return Objective("f0", detail::uniform_box(4, -1000.0, 1000.0, policy),
                     evaluate_f0, 0.0);
  if (name == "f2")
    return Objective("f2", detail::uniform_box(n, -2.048, 2.048, policy),
                     evaluate_f2, 0.0);
  if (name == "f5")
    return Objective("f5", detail::uniform_box(2, -65.536, 65.536, policy),
                     evaluate_f5, evaluate_f5({-32.0, -32.0}));
  if (name == "f6")
    return Objective("f6", detail::uniform_box(n, -5.12, 5.12, policy),
                     evaluate_f6, 0.0);
  // bump: box (0,10)^n with the product and sum constraints; no known
  // optimum is recorded.
  SearchSpace s = detail::uniform_box(n, 0.0, 10.0, policy);
  s.constraint = detail::bump_constraint;
  return Objective("bump", std::move(s), evaluate_bump);
}

}  // namespace lfo
