#pragma once

#include <cstdint>
#include <vector>

#include "dyadlab/dyadic.hpp"

namespace dyadlab {

/// Injective map tau: D_0^N -> D_0^L, materialized on the whole truncated
/// grid. gamma_I = |I|/|tau(I)| is an exact power of two for every source.
class RearrangementMap {
 public:
  RearrangementMap() = default;

  /// `table` is heap-indexed over D_0^N; every target must have level <= L
  /// and no two sources may share a target.
  RearrangementMap(int source_depth, int target_depth, std::vector<DyadicInterval> table);

  int source_depth() const { return source_depth_; }
  int target_depth() const { return target_depth_; }
  bool measure_preserving() const { return measure_preserving_; }

  /// True iff the map is onto D_0^L (forces L = N for level counts to match).
  bool bijective() const;

  DyadicInterval apply(const DyadicInterval& I) const;
  DyadicInterval apply_at(std::size_t heap_pos) const { return table_[heap_pos]; }
  IntervalCollection apply(const IntervalCollection& c) const;

  /// log2 of gamma_I = |I|/|tau(I)|, i.e. level(tau(I)) - level(I).
  int gamma_log2(const DyadicInterval& I) const { return apply(I).level - I.level; }

  /// Inverse map; requires bijective().
  RearrangementMap inverse() const;

  /// Composition (other after *this); requires matching depths.
  RearrangementMap then(const RearrangementMap& other) const;

  friend bool operator==(const RearrangementMap&, const RearrangementMap&) = default;

 private:
  int source_depth_ = 0;
  int target_depth_ = 0;
  bool measure_preserving_ = true;
  std::vector<DyadicInterval> table_;
};

/// tau = identity on D_0^N.
RearrangementMap build_identity(int depth);

/// The parity-shift permutation: even levels fixed; an odd-level interval in
/// [0,1/2) is translated by +1/2 and one in [1/2,1) by -1/2. An involution.
RearrangementMap build_parity_shift(int depth);

/// Block permutation on same-level blocks I_0,...,I_n listed in increasing
/// position: for k = 1..n the level-(B+k) subintervals of I_k move to the
/// matching positions in I_0, and for j = 0..n-1 the level-(B+k)
/// subintervals of I_j with k = j+1..n move to the matching positions in
/// I_{j+1} (B = block level). Identity elsewhere; a measure-preserving
/// bijection of D_0^depth. Requires depth >= B + n.
RearrangementMap build_block_perm(const std::vector<DyadicInterval>& blocks, int depth);

/// Glues block permutations of sizes n = 1, 2, ... into one permutation of
/// D_0^depth: the n-th group lives in [1 - 2^{1-n}, 1 - 2^{-n}); groups whose
/// moved intervals would fall below the grid are omitted.
RearrangementMap build_glued_blocks(int depth);

struct SemenovResult {
  Rational value;              // |tau(C)*| / |C*| of the witness
  IntervalCollection witness;  // maximizing collection (canonical tie-break)
  bool exact = false;          // true when the full subset space was searched
};

/// Exact Semenov constant max over non-empty C of |tau(C)*|/|C*| by full
/// subset enumeration. Requires a measure-preserving map and at most
/// `max_intervals` intervals in D_0^N (default 15, i.e. N <= 3).
SemenovResult semenov_exact(const RearrangementMap& tau, std::size_t max_intervals = 15);

struct SemenovSearchOptions {
  std::size_t anneal_steps = 20000;
  int anneal_restarts = 8;
  std::uint64_t seed = 1;
};

/// Certified lower bound for the Semenov constant: greedy growth from every
/// singleton plus simulated annealing over inclusion vectors; the returned
/// value is the exactly recomputed ratio of the returned witness.
SemenovResult semenov_heuristic(const RearrangementMap& tau, const SemenovSearchOptions& opts = {});

/// Exact value of sup_I |tau(Q(I) cap D_0^N)*| / |I|; a lower bound for the
/// Semenov constant (take C = Q(I)).
SemenovResult shadow_semenov(const RearrangementMap& tau);

struct DistortionResult {
  Rational expand;                    // sup over E of [tau(E)] / [E]
  Rational contract;                  // sup over E of [E] / [tau(E)]
  IntervalCollection expand_witness;
  IntervalCollection contract_witness;
  bool exact = false;
};

struct DistortionSampleOptions {
  int samples_per_density = 64;
  std::vector<double> densities = {0.1, 0.2, 0.35, 0.5, 0.65, 0.8};
  std::uint64_t seed = 1;
};

/// Two-sided Carleson distortion of a bijective map: exact mode enumerates
/// all non-empty E subset D_0^N (same cap as semenov_exact).
DistortionResult carleson_distortion_exact(const RearrangementMap& tau, std::size_t max_intervals = 15);

/// Sampled certified lower bounds for both distortion ratios.
DistortionResult carleson_distortion_sampled(const RearrangementMap& tau, const DistortionSampleOptions& opts = {});

}  // namespace dyadlab
