#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dyadlab/rational.hpp"

namespace dyadlab {

/// Node (level, index) of the binary tree over [0,1): represents the
/// half-open interval [index*2^-level, (index+1)*2^-level).
struct DyadicInterval {
  int level = 0;
  std::uint64_t index = 0;

  DyadicInterval() = default;
  DyadicInterval(int lvl, std::uint64_t idx);

  DyadicInterval left_child() const { return {level + 1, 2 * index}; }
  DyadicInterval right_child() const { return {level + 1, 2 * index + 1}; }
  DyadicInterval parent() const;

  /// True iff *this is contained in `outer` (as sets; equality counts).
  bool contained_in(const DyadicInterval& outer) const {
    return level >= outer.level && (index >> (level - outer.level)) == outer.index;
  }

  double left() const { return static_cast<double>(index) / static_cast<double>(std::uint64_t{1} << level); }
  double right() const { return static_cast<double>(index + 1) / static_cast<double>(std::uint64_t{1} << level); }

  /// Canonical text form "level:index", e.g. "3:5".
  std::string str() const { return std::to_string(level) + ":" + std::to_string(index); }
  static DyadicInterval parse(const std::string& text);

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
  friend bool operator<(const DyadicInterval& a, const DyadicInterval& b) {
    return a.level != b.level ? a.level < b.level : a.index < b.index;
  }
};

/// |I| = 2^-level, exact.
DyadRat measure(const DyadicInterval& I);

/// Number of intervals in D_0^N.
inline std::size_t interval_count(int depth) { return (std::size_t{1} << (depth + 1)) - 1; }

/// Heap position of an interval in the canonical (level, index) enumeration
/// of D_0^N: level k occupies [2^k - 1, 2^{k+1} - 1).
inline std::size_t heap_index(const DyadicInterval& I) { return (std::size_t{1} << I.level) - 1 + I.index; }

DyadicInterval interval_at(std::size_t heap_pos);

/// Finite set of dyadic intervals, stored sorted by (level, index) so that
/// serialization is canonical and membership is O(log n).
class IntervalCollection {
 public:
  IntervalCollection() = default;
  explicit IntervalCollection(std::vector<DyadicInterval> members);

  std::span<const DyadicInterval> members() const& { return members_; }
  std::span<const DyadicInterval> members() const&& = delete;  // would dangle
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(const DyadicInterval& I) const;

  /// Max level present (0 for the empty collection).
  int depth() const;

  /// Canonical order: lexicographic over the sorted (level, index) lists.
  static bool canonical_less(const IntervalCollection& a, const IntervalCollection& b);

  friend bool operator==(const IntervalCollection&, const IntervalCollection&) = default;

 private:
  std::vector<DyadicInterval> members_;
};

/// Q(I) truncated to D_0^N: all dyadic J with J contained in I and
/// level(J) <= N. Throws if level(I) > N.
IntervalCollection shadow(const DyadicInterval& I, int depth);

/// All of D_0^N.
IntervalCollection all_intervals(int depth);

/// Exact measure of the union of the members. Members contained in other
/// members are discarded; the remaining maximal intervals are pairwise
/// disjoint, so their measures add. Throws on the empty collection.
DyadRat union_measure(const IntervalCollection& c);

/// Exact Carleson constant sup_{I in E} (1/|I|) sum_{J in E, J subset I} |J|,
/// computed by accumulating each member's measure at all of its ancestors.
/// At least 1 for every non-empty E. Throws on the empty collection.
DyadRat carleson_constant(const IntervalCollection& e);

}  // namespace dyadlab
