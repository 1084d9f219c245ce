#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lfo/space.hpp"

using Catch::Approx;
using lfo::BoundaryPolicy;
using lfo::Point;
using lfo::RandomSource;
using lfo::SearchSpace;
using lfo::UnitVector;

namespace {

SearchSpace box1d(double lo, double hi,
                  BoundaryPolicy policy = BoundaryPolicy::clip()) {
  SearchSpace s;
  s.dim = 1;
  s.lower = {lo};
  s.upper = {hi};
  s.boundary_policy = policy;
  return s;
}

SearchSpace box2d(double lo, double hi,
                  BoundaryPolicy policy = BoundaryPolicy::clip()) {
  SearchSpace s;
  s.dim = 2;
  s.lower = {lo, lo};
  s.upper = {hi, hi};
  s.boundary_policy = policy;
  return s;
}

}  // namespace

TEST_CASE("SearchSpace validation", "[space]") {
  SearchSpace s = box2d(-1.0, 1.0);
  CHECK_NOTHROW(s.validate());

  SearchSpace zero;
  CHECK_THROWS_AS(zero.validate(), std::domain_error);

  SearchSpace mismatched = s;
  mismatched.lower = {-1.0};
  CHECK_THROWS_AS(mismatched.validate(), std::domain_error);

  SearchSpace inverted = s;
  inverted.upper[1] = -2.0;
  CHECK_THROWS_AS(inverted.validate(), std::domain_error);

  SearchSpace degenerate = s;
  degenerate.upper[0] = degenerate.lower[0];
  CHECK_THROWS_AS(degenerate.validate(), std::domain_error);

  CHECK_THROWS_AS(BoundaryPolicy::resample(0), std::domain_error);
}

TEST_CASE("max_extent is the largest edge", "[space]") {
  SearchSpace s;
  s.dim = 2;
  s.lower = {0.0, -3.0};
  s.upper = {1.0, 5.0};
  CHECK(s.max_extent() == 8.0);
  CHECK(box1d(-32.0, 32.0).max_extent() == 64.0);
}

TEST_CASE("is_feasible checks box and constraint", "[space]") {
  SearchSpace s = box2d(-1.0, 1.0);
  CHECK(lfo::is_feasible(s, {0.0, 0.0}));
  CHECK(lfo::is_feasible(s, {-1.0, 1.0}));
  CHECK_FALSE(lfo::is_feasible(s, {1.0001, 0.0}));
  CHECK_FALSE(lfo::is_feasible(s, {0.0, -2.0}));
  CHECK_THROWS_AS(lfo::is_feasible(s, {0.0}), std::domain_error);

  s.constraint = [](const Point& x) { return x[0] + x[1] < 0.5; };
  CHECK(lfo::is_feasible(s, {0.0, 0.0}));
  CHECK_FALSE(lfo::is_feasible(s, {0.5, 0.5}));
}

TEST_CASE("random_feasible_point lands inside", "[space]") {
  SearchSpace s = box2d(-2.0, 3.0);
  RandomSource rng(11);
  for (int i = 0; i < 500; ++i) {
    const Point x = lfo::random_feasible_point(s, rng);
    REQUIRE(lfo::is_feasible(s, x));
  }

  s.constraint = [](const Point& x) { return x[0] > x[1]; };
  for (int i = 0; i < 200; ++i)
    REQUIRE(lfo::is_feasible(s, lfo::random_feasible_point(s, rng)));

  RandomSource a(3), b(3);
  CHECK(lfo::random_feasible_point(s, a) == lfo::random_feasible_point(s, b));

  SearchSpace impossible = box1d(0.0, 1.0);
  impossible.constraint = [](const Point&) { return false; };
  CHECK_THROWS_AS(lfo::random_feasible_point(impossible, rng, 50),
                  std::runtime_error);
}

TEST_CASE("clip truncates at the boundary", "[space]") {
  RandomSource rng(1);
  const SearchSpace s = box1d(0.0, 10.0);

  // Overshooting move stops exactly on the edge.
  Point p = lfo::propose_move({9.0}, 5.0, UnitVector::axis(1, 0, 1.0), s, rng);
  CHECK(p[0] == 10.0);

  // In-box move is untouched.
  p = lfo::propose_move({9.0}, 0.5, UnitVector::axis(1, 0, -1.0), s, rng);
  CHECK(p[0] == Approx(8.5).epsilon(1e-15));

  // Zero length stays put.
  p = lfo::propose_move({9.0}, 0.0, UnitVector::axis(1, 0, 1.0), s, rng);
  CHECK(p[0] == 9.0);

  // No randomness is consumed on the clip path without a constraint.
  CHECK(rng.draws() == 0);
}

TEST_CASE("clip preserves the move direction", "[space]") {
  RandomSource rng(1);
  const SearchSpace s = box2d(-1.0, 1.0);
  const UnitVector diag = UnitVector::normalized({1.0, 1.0});

  // Componentwise clamping would land in the corner (1, 1); ray truncation
  // must stop where the first coordinate exits.
  const Point p = lfo::propose_move({0.5, 0.0}, 10.0, diag, s, rng);
  CHECK(p[0] == Approx(1.0).epsilon(1e-12));
  CHECK(p[1] == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("clip redraws the direction when a constraint rejects", "[space]") {
  SearchSpace s = box1d(0.0, 10.0);
  s.constraint = [](const Point& x) { return x[0] <= 5.0; };
  RandomSource rng(21);

  // Moving right from 5 clips to 7, violating the constraint; a redraw
  // flips the direction and 3 passes.
  const Point p =
      lfo::propose_move({5.0}, 2.0, UnitVector::axis(1, 0, 1.0), s, rng);
  CHECK(lfo::is_feasible(s, p));
  CHECK(rng.draws() > 0);

  // When no direction can satisfy the constraint the walker stays put.
  SearchSpace stuck = box1d(0.0, 10.0);
  stuck.constraint = [](const Point& x) { return std::abs(x[0] - 5.0) < 0.1; };
  const Point q =
      lfo::propose_move({5.0}, 2.0, UnitVector::axis(1, 0, 1.0), stuck, rng);
  CHECK(q == Point{5.0});
}

TEST_CASE("resample keeps feasible candidates verbatim", "[space]") {
  const SearchSpace s = box1d(0.0, 10.0, BoundaryPolicy::resample());
  RandomSource rng(2);
  const Point p =
      lfo::propose_move({5.0}, 1.0, UnitVector::axis(1, 0, 1.0), s, rng);
  CHECK(p[0] == 6.0);
  CHECK(rng.draws() == 0);
}

TEST_CASE("resample redraws length and direction", "[space]") {
  const SearchSpace s = box1d(0.0, 10.0, BoundaryPolicy::resample());
  RandomSource rng(17);
  int redraws = 0;
  const Point p = lfo::propose_move({9.5}, 2.0, UnitVector::axis(1, 0, 1.0), s,
                                    rng, [&](RandomSource&) {
                                      ++redraws;
                                      return 2.0;
                                    });
  CHECK(lfo::is_feasible(s, p));
  CHECK(redraws > 0);
  CHECK(rng.draws() > 0);

  // A feasible first candidate never invokes the redraw hook.
  redraws = 0;
  (void)lfo::propose_move({5.0}, 1.0, UnitVector::axis(1, 0, -1.0), s, rng,
                          [&](RandomSource&) {
                            ++redraws;
                            return 1.0;
                          });
  CHECK(redraws == 0);
}

TEST_CASE("resample falls back to clipping after the retry budget", "[space]") {
  // Length 100 in a width-10 box can never fit, so every retry fails and
  // the last redrawn move is clipped to an edge.
  const SearchSpace s = box1d(0.0, 10.0, BoundaryPolicy::resample(3));
  RandomSource rng(5);
  const Point p = lfo::propose_move({9.5}, 100.0, UnitVector::axis(1, 0, 1.0),
                                    s, rng, [](RandomSource&) { return 100.0; });
  CHECK((p[0] == 0.0 || p[0] == 10.0));
}

TEST_CASE("propose_move argument validation", "[space]") {
  const SearchSpace s = box2d(-1.0, 1.0);
  RandomSource rng(1);
  const UnitVector d2 = UnitVector::axis(2, 0, 1.0);
  CHECK_THROWS_AS(lfo::propose_move({0.0, 0.0}, -1.0, d2, s, rng),
                  std::domain_error);
  CHECK_THROWS_AS(lfo::propose_move({5.0, 0.0}, 1.0, d2, s, rng),
                  std::domain_error);
  CHECK_THROWS_AS(
      lfo::propose_move({0.0, 0.0}, 1.0, UnitVector::axis(3, 0, 1.0), s, rng),
      std::domain_error);
}
