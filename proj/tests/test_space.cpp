#include <doctest.h>

#include <cmath>
#include <random>

#include "dyadlab/space.hpp"

using namespace dyadlab;

namespace {

HaarExpansion random_expansion(int depth, const SpaceSpec& space, std::mt19937_64& rng, bool zero_mean = true) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  HaarExpansion f(depth, space);
  if (!zero_mean) {
    Vec m(space.dim);
    for (double& c : m) c = gauss(rng);
    f.set_mean(std::move(m));
  }
  for (std::size_t i = 0; i < f.coefficient_count(); ++i) {
    Vec a(space.dim);
    for (double& c : a) c = gauss(rng);
    f.set_coeff_at(i, std::move(a));
  }
  return f;
}

}  // namespace

TEST_CASE("sequence space norms") {
  const SpaceSpec l1 = SpaceSpec::lr(1.0, 3);
  const SpaceSpec l2 = SpaceSpec::lr(2.0, 3);
  const SpaceSpec linf = SpaceSpec::lr(std::numeric_limits<double>::infinity(), 3);
  const Vec v{3.0, -4.0, 0.0};
  CHECK(l1.norm(v) == doctest::Approx(7.0));
  CHECK(l2.norm(v) == doctest::Approx(5.0));
  CHECK(linf.norm(v) == doctest::Approx(4.0));
  CHECK(SpaceSpec::scalar().norm(Vec{-2.5}) == doctest::Approx(2.5));
  CHECK_THROWS_AS(SpaceSpec::lr(0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(SpaceSpec::lr(2.0, 0), std::invalid_argument);
}

TEST_CASE("haar functions and their norms") {
  const auto h = haar_function({0, 0}, 0);
  const auto cells = to_step(h);
  CHECK(cells[0][0] == 1.0);   // t = 1/4
  CHECK(cells[1][0] == -1.0);  // t = 3/4
  for (double p : {1.0, 1.7, 2.0, 4.0}) CHECK(lp_norm(h, p) == doctest::Approx(1.0));

  // ||h_I||_p = |I|^{1/p} and zero integral.
  for (int level = 0; level <= 3; ++level) {
    const auto hi = haar_function({level, std::uint64_t(1) << level >> 1}, 4);
    for (double p : {1.0, 2.0, 3.0})
      CHECK(lp_norm(hi, p) == doctest::Approx(std::pow(std::exp2(-level), 1.0 / p)));
    const auto proj = martingale_projection(hi, 0);
    CHECK(proj[0][0] == doctest::Approx(0.0));
  }

  const auto flipped = haar_function({1, 0}, 1, false);
  CHECK(to_step(flipped)[0][0] == -1.0);
}

TEST_CASE("scaled single coefficient norm") {
  HaarExpansion f(1, SpaceSpec::scalar());
  f.set_coeff({1, 0}, {-3.0});
  for (double p : {1.0, 1.5, 2.0, 4.0})
    CHECK(lp_norm(f, p) == doctest::Approx(3.0 * std::pow(2.0, -1.0 / p)));
  CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("analysis inverts synthesis on random step functions") {
  std::mt19937_64 rng(100);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const int depth = static_cast<int>(rng() % 5);
    const SpaceSpec space = t % 2 == 0 ? SpaceSpec::scalar() : SpaceSpec::lr(1.5, 3);
    std::vector<Vec> cells(cell_count(depth), Vec(space.dim));
    for (auto& cell : cells)
      for (double& c : cell) c = gauss(rng);
    const auto f = from_step(cells, space);
    const auto back = to_step(f);
    for (std::size_t c = 0; c < cells.size(); ++c)
      for (int j = 0; j < space.dim; ++j) CHECK(back[c][j] == doctest::Approx(cells[c][j]).epsilon(1e-12));
  }
}

TEST_CASE("round trip through coefficients") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 30; ++t) {
    const auto f = random_expansion(3, SpaceSpec::lr(2.0, 2), rng, false);
    const auto g = from_step(to_step(f), f.space());
    CHECK(g.depth() == f.depth());
    for (std::size_t i = 0; i < f.coefficient_count(); ++i)
      for (int j = 0; j < 2; ++j) CHECK(g.coeff_at(i)[j] == doctest::Approx(f.coeff_at(i)[j]).epsilon(1e-12));
  }
}

TEST_CASE("parseval at p = 2 for scalar expansions") {
  std::mt19937_64 rng(102);
  for (int t = 0; t < 500; ++t) {
    const int depth = static_cast<int>(rng() % 5);
    const auto f = random_expansion(depth, SpaceSpec::scalar(), rng, false);
    double sum = f.mean()[0] * f.mean()[0];
    for (std::size_t i = 0; i < f.coefficient_count(); ++i) {
      const double a = f.coeff_at(i)[0];
      sum += a * a * std::exp2(-interval_at(i).level);
    }
    const double norm = lp_norm(f, 2.0);
    CHECK(norm * norm == doctest::Approx(sum).epsilon(1e-11));
  }
}

TEST_CASE("martingale projections") {
  std::mt19937_64 rng(103);
  const auto f = random_expansion(3, SpaceSpec::scalar(), rng, false);

  const auto p0 = martingale_projection(f, 0);
  for (const auto& cell : p0) CHECK(cell[0] == doctest::Approx(f.mean()[0]));

  const auto pN1 = martingale_projection(f, 4);
  const auto cells = to_step(f);
  for (std::size_t c = 0; c < cells.size(); ++c) CHECK(pN1[c][0] == doctest::Approx(cells[c][0]));

  const auto h = haar_function({1, 0}, 1);
  for (const auto& cell : martingale_projection(h, 1)) CHECK(cell[0] == doctest::Approx(0.0));

  CHECK_THROWS_AS(martingale_projection(f, 5), std::invalid_argument);
}

TEST_CASE("conditional expectation contracts every L^p norm") {
  std::mt19937_64 rng(104);
  for (int t = 0; t < 60; ++t) {
    const SpaceSpec space = t % 2 == 0 ? SpaceSpec::scalar() : SpaceSpec::lr(3.0, 2);
    const auto f = random_expansion(4, space, rng, false);
    const double p = 1.0 + 3.0 * (t % 5) / 4.0;
    const double full = lp_norm(f, p);
    for (int n = 0; n <= 5; ++n)
      CHECK(lp_norm_cells(martingale_projection(f, n), p, space) <= full * (1 + 1e-12));
  }
}

TEST_CASE("h1 norm basics") {
  const auto h = haar_function({0, 0}, 0);
  CHECK(h1_norm(h) == doctest::Approx(1.0));

  HaarExpansion zero(2, SpaceSpec::scalar());
  CHECK(h1_norm(zero) == 0.0);

  HaarExpansion biased(1, SpaceSpec::scalar());
  biased.set_mean({0.5});
  CHECK_THROWS_AS(h1_norm(biased), std::invalid_argument);

  // ||f||_1 <= ||f||_{H^1} (the n = N+1 term of the maximal function).
  std::mt19937_64 rng(105);
  for (int t = 0; t < 50; ++t) {
    const auto f = random_expansion(4, SpaceSpec::lr(2.0, 2), rng);
    CHECK(lp_norm(f, 1.0) <= h1_norm(f) * (1 + 1e-12));
  }
}

TEST_CASE("stopping times must be adapted") {
  // nu constant 1 on [0,1/2), infinity elsewhere: adapted.
  std::vector<int> ok{1, 1, StoppingTimeGrid::kInfinity, StoppingTimeGrid::kInfinity};
  CHECK(StoppingTimeGrid(1, ok).adapted());
  // {nu <= 1} = {first cell} is not a union of level-1 intervals.
  std::vector<int> bad{1, StoppingTimeGrid::kInfinity, StoppingTimeGrid::kInfinity, StoppingTimeGrid::kInfinity};
  CHECK_THROWS_AS(StoppingTimeGrid(1, bad), std::invalid_argument);
  CHECK_THROWS_AS(StoppingTimeGrid(1, std::vector<int>{0, 0}), std::invalid_argument);
}

namespace {

/// nu = level(J) on J, infinity elsewhere.
StoppingTimeGrid stopping_time_on(const DyadicInterval& j, int depth) {
  std::vector<int> nu(cell_count(depth), StoppingTimeGrid::kInfinity);
  const std::size_t first = j.index << (depth + 1 - j.level);
  const std::size_t count = std::size_t{1} << (depth + 1 - j.level);
  for (std::size_t c = first; c < first + count; ++c) nu[c] = j.level;
  return StoppingTimeGrid(depth, nu);
}

}  // namespace

TEST_CASE("atom validation") {
  // a = h_J / |J| with nu = level(J) on J is a textbook atom.
  const DyadicInterval j{2, 1};
  HaarExpansion a(3, SpaceSpec::scalar());
  a.set_coeff(j, {4.0});  // 1/|J|
  const Atom atom{a, stopping_time_on(j, 3)};
  CHECK(validate_atom(atom).ok);

  // Nonzero mean fails clause (a) at n = 0.
  HaarExpansion biased(3, SpaceSpec::scalar());
  biased.set_mean({1.0});
  const auto bad = validate_atom({biased, stopping_time_on(j, 3)});
  CHECK_FALSE(bad.ok);
  CHECK(bad.violated == "a");
  CHECK(bad.n == 0);

  // Oversized coefficient fails clause (b).
  HaarExpansion big(3, SpaceSpec::scalar());
  big.set_coeff(j, {8.0});
  const auto toobig = validate_atom({big, stopping_time_on(j, 3)});
  CHECK_FALSE(toobig.ok);
  CHECK(toobig.violated == "b");

  // The zero function with nu = infinity everywhere passes.
  const StoppingTimeGrid all_inf(3, std::vector<int>(cell_count(3), StoppingTimeGrid::kInfinity));
  CHECK(validate_atom({HaarExpansion(3, SpaceSpec::scalar()), all_inf}).ok);
}

TEST_CASE("atomic upper bound") {
  const DyadicInterval j{1, 0};
  HaarExpansion a(2, SpaceSpec::scalar());
  a.set_coeff(j, {2.0});
  const Atom atom{a, stopping_time_on(j, 2)};

  // f = mu * a for a single valid atom.
  HaarExpansion f(2, SpaceSpec::scalar());
  f.set_coeff(j, {1.0});
  CHECK(h1at_upper_bound(f, {{0.5, atom}}) == doctest::Approx(0.5));
  CHECK(h1_norm(f) <= 0.5 + 1e-12);

  // Empty decomposition reproduces only the zero function.
  CHECK(h1at_upper_bound(HaarExpansion(2, SpaceSpec::scalar()), {}) == 0.0);

  // Mismatching decomposition is rejected.
  HaarExpansion g(2, SpaceSpec::scalar());
  g.set_coeff({2, 3}, {1.0});
  CHECK_THROWS_AS(h1at_upper_bound(g, {{0.5, atom}}), std::invalid_argument);

  // Invalid atoms are rejected.
  HaarExpansion big(2, SpaceSpec::scalar());
  big.set_coeff(j, {100.0});
  CHECK_THROWS_AS(h1at_upper_bound(f, {{1.0, Atom{big, stopping_time_on(j, 2)}}}), std::invalid_argument);
}
