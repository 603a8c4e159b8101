#include <doctest.h>

#include <random>

#include "dyadlab/rearrangement.hpp"
#include "oracles.hpp"

using namespace dyadlab;

TEST_CASE("identity builder") {
  const auto id = build_identity(2);
  CHECK(id.apply({1, 0}) == DyadicInterval{1, 0});
  CHECK(id.measure_preserving());
  CHECK(semenov_exact(id).value == Rational(1, 1));
  CHECK(semenov_exact(id).witness == IntervalCollection({{0, 0}}));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 25; ++t) {
    const auto e = oracle::random_collection(2, 0.4, rng);
    CHECK(carleson_constant(id.apply(e)) == carleson_constant(e));
  }
}

TEST_CASE("parity shift moves odd levels across the midpoint") {
  const auto tau = build_parity_shift(4);
  CHECK(tau.apply({1, 0}) == DyadicInterval{1, 1});
  CHECK(tau.apply({2, 1}) == DyadicInterval{2, 1});
  CHECK(tau.apply({3, 4}) == DyadicInterval{3, 0});
  CHECK(tau.measure_preserving());
  CHECK(tau.bijective());
  CHECK(tau.then(tau) == build_identity(4));  // involution
  CHECK(tau.inverse() == tau);
  CHECK_THROWS_AS(build_parity_shift(0), std::invalid_argument);
}

TEST_CASE("exact semenov search on the parity shift") {
  const auto result = semenov_exact(build_parity_shift(2));
  CHECK(result.value == Rational(2, 1));
  CHECK(result.exact);
  CHECK(result.witness == IntervalCollection({{1, 0}, {2, 0}, {2, 1}}));

  // Single intervals always have ratio 1.
  for (std::size_t i = 0; i < interval_count(2); ++i) {
    const IntervalCollection single({interval_at(i)});
    const auto tau = build_parity_shift(2);
    CHECK(Rational::ratio(union_measure(tau.apply(single)), union_measure(single)) == Rational(1, 1));
  }

  CHECK_THROWS_AS(semenov_exact(build_parity_shift(4)), std::invalid_argument);  // 31 intervals > cap
}

TEST_CASE("random collections never beat the exact semenov constant") {
  const auto tau = build_parity_shift(3);
  const auto exact = semenov_exact(tau);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto c = oracle::random_collection(3, 0.35, rng);
    CHECK(Rational::ratio(union_measure(tau.apply(c)), union_measure(c)) <= exact.value);
  }
}

TEST_CASE("heuristic and shadow bounds on the parity shift") {
  const auto tau = build_parity_shift(6);
  const auto heur = semenov_heuristic(tau);
  CHECK(Rational(2, 1) <= heur.value);
  CHECK(heur.value <= Rational(2, 1));  // kappa = 2 is the true constant
  CHECK(Rational::ratio(union_measure(tau.apply(heur.witness)), union_measure(heur.witness)) == heur.value);

  const auto sh = shadow_semenov(tau);
  CHECK(sh.value == Rational(2, 1));
  CHECK(sh.value <= semenov_exact(build_parity_shift(3)).value);

  CHECK(semenov_heuristic(build_identity(5)).value == Rational(1, 1));
  CHECK(shadow_semenov(build_identity(5)).value == Rational(1, 1));
}

TEST_CASE("block permutation moves the listed families") {
  const std::vector<DyadicInterval> blocks{{2, 0}, {2, 1}, {2, 2}};
  const auto tau = build_block_perm(blocks, 4);
  CHECK(tau.measure_preserving());
  CHECK(tau.bijective());

  // A_1 = level-3 subintervals of I_1 shifted to I_0.
  CHECK(tau.apply({3, 2}) == DyadicInterval{3, 0});
  CHECK(tau.apply({3, 3}) == DyadicInterval{3, 1});
  // A_2 = level-4 subintervals of I_2 shifted to I_0.
  CHECK(tau.apply({4, 8}) == DyadicInterval{4, 0});
  CHECK(tau.apply({4, 11}) == DyadicInterval{4, 3});
  // Subintervals of I_0 move one block to the right.
  CHECK(tau.apply({3, 0}) == DyadicInterval{3, 2});
  CHECK(tau.apply({4, 0}) == DyadicInterval{4, 4});
  // Level-4 subintervals of I_1 move to I_2.
  CHECK(tau.apply({4, 4}) == DyadicInterval{4, 8});
  // Untouched elsewhere.
  CHECK(tau.apply({2, 3}) == DyadicInterval{2, 3});
  CHECK(tau.apply({1, 1}) == DyadicInterval{1, 1});
  CHECK(tau.apply({2, 0}) == DyadicInterval{2, 0});

  // Brute-force bijectivity: every interval of D_0^4 is hit exactly once.
  std::vector<bool> hit(interval_count(4), false);
  for (std::size_t i = 0; i < interval_count(4); ++i) {
    const std::size_t target = heap_index(tau.apply_at(i));
    CHECK_FALSE(hit[target]);
    hit[target] = true;
  }

  CHECK_THROWS_AS(build_block_perm({{2, 0}, {2, 1}}, 2), std::invalid_argument);      // grid too shallow
  CHECK_THROWS_AS(build_block_perm({{2, 0}, {1, 1}}, 4), std::invalid_argument);      // unequal levels
  CHECK_THROWS_AS(build_block_perm({{2, 1}, {2, 1}}, 4), std::invalid_argument);      // overlap
  CHECK_THROWS_AS(build_block_perm({{2, 0}}, 4), std::invalid_argument);              // one block
}

TEST_CASE("block permutation semenov constant stays within 3") {
  const auto small = semenov_exact(build_block_perm({{1, 0}, {1, 1}}, 2));
  CHECK(small.value <= Rational(3, 1));
  CHECK(Rational(1, 1) <= small.value);

  const auto glued3 = semenov_exact(build_glued_blocks(3));
  CHECK(glued3.value <= Rational(3, 1));
  CHECK(Rational(3, 2) <= glued3.value);
  CHECK(glued3.value == Rational(2, 1));

  // At depth 6 the constant 3 is attained by the shadow of the middle block
  // of the three-block family: the block stays, its coarsest subintervals
  // move to the left neighbour, the finer ones to the right neighbour.
  const auto heur = semenov_heuristic(build_glued_blocks(6));
  CHECK(heur.value == Rational(3, 1));
  CHECK(shadow_semenov(build_glued_blocks(6)).value == Rational(3, 1));
}

TEST_CASE("glued blocks: identity outside the block families") {
  const auto tau = build_glued_blocks(6);  // groups n = 1 and n = 2 fit
  CHECK(tau.measure_preserving());
  CHECK(tau.bijective());
  CHECK(tau.apply({1, 1}) == DyadicInterval{1, 1});
  CHECK(tau.apply({0, 0}) == DyadicInterval{0, 0});
  // Group 1 blocks are (2,0),(2,1); its A_1 shift is visible at level 3.
  CHECK(tau.apply({3, 2}) == DyadicInterval{3, 0});
  // Group 2 blocks are (4,8),(4,9),(4,10) inside [1/2,3/4).
  CHECK(tau.apply({5, 18}) == DyadicInterval{5, 16});
  // Too shallow a grid leaves the identity.
  CHECK(build_glued_blocks(2) == build_identity(2));
}

TEST_CASE("gamma weights are trivial for measure-preserving builders") {
  for (const auto& tau : {build_identity(3), build_parity_shift(3), build_glued_blocks(4)}) {
    for (std::size_t i = 0; i < interval_count(tau.source_depth()); ++i)
      CHECK(tau.gamma_log2(interval_at(i)) == 0);
  }
}

TEST_CASE("carleson distortion of the identity and the parity shift") {
  const auto id_result = carleson_distortion_exact(build_identity(2));
  CHECK(id_result.expand == Rational(1, 1));
  CHECK(id_result.contract == Rational(1, 1));

  const auto tau = build_parity_shift(2);
  const auto result = carleson_distortion_exact(tau);
  CHECK(Rational(1, 1) <= result.expand);
  CHECK(Rational(1, 1) <= result.contract);
  CHECK(result.exact);

  // The chain {(0,0),(1,0),(2,0)} maps to {(0,0),(1,1),(2,0)}; both packed
  // sums are dominated at the root.
  const IntervalCollection chain({{0, 0}, {1, 0}, {2, 0}});
  CHECK(carleson_constant(chain) == DyadRat(7, 2));
  const auto image = tau.apply(chain);
  CHECK(image == IntervalCollection({{0, 0}, {1, 1}, {2, 0}}));
  CHECK(carleson_constant(image) == oracle::carleson_naive(image));
  CHECK(carleson_constant(image) == DyadRat(7, 2));

  // Sampled mode stays below the exact suprema.
  const auto sampled = carleson_distortion_sampled(tau);
  CHECK(sampled.expand <= result.expand);
  CHECK(sampled.contract <= result.contract);
  CHECK(carleson_constant(tau.apply(sampled.expand_witness)) ==
        oracle::carleson_naive(tau.apply(sampled.expand_witness)));

  RearrangementMap not_bijective(1, 2, {{0, 0}, {2, 0}, {2, 3}});
  CHECK_THROWS_AS(carleson_distortion_exact(not_bijective), std::invalid_argument);
}

TEST_CASE("map validation rejects duplicate targets and deep targets") {
  CHECK_THROWS_AS(RearrangementMap(1, 1, {{0, 0}, {1, 0}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(RearrangementMap(1, 1, {{0, 0}, {2, 0}, {1, 1}}), std::invalid_argument);
  const RearrangementMap stretch(1, 2, {{0, 0}, {2, 0}, {1, 0}});
  CHECK_FALSE(stretch.measure_preserving());
  CHECK(stretch.gamma_log2({1, 0}) == 1);  // gamma = |I|/|tau(I)| = 2
  CHECK_THROWS_AS(semenov_exact(stretch), std::invalid_argument);
}
