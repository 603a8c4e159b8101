#include "dyadlab/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

namespace dyadlab {

namespace {
constexpr int kMaxLevel = 26;  // 2^{27} grid cells at most; keeps masks and sums in int64
}

DyadicInterval::DyadicInterval(int lvl, std::uint64_t idx) : level(lvl), index(idx) {
  if (lvl < 0 || lvl > kMaxLevel) throw std::invalid_argument("invalid-depth: interval level out of range");
  if (idx >= (std::uint64_t{1} << lvl)) throw std::invalid_argument("invalid-depth: interval index out of range");
}

DyadicInterval DyadicInterval::parent() const {
  if (level == 0) throw std::invalid_argument("invalid-depth: root interval has no parent");
  return {level - 1, index / 2};
}

DyadicInterval DyadicInterval::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("parse error: expected \"level:index\", got \"" + text + "\"");
  const int level = std::stoi(text.substr(0, colon));
  const std::uint64_t index = std::stoull(text.substr(colon + 1));
  return DyadicInterval(level, index);
}

DyadRat measure(const DyadicInterval& I) { return DyadRat::pow2(-I.level); }

DyadicInterval interval_at(std::size_t heap_pos) {
  const int level = std::bit_width(heap_pos + 1) - 1;
  return {level, heap_pos + 1 - (std::size_t{1} << level)};
}

IntervalCollection::IntervalCollection(std::vector<DyadicInterval> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool IntervalCollection::contains(const DyadicInterval& I) const {
  return std::binary_search(members_.begin(), members_.end(), I);
}

int IntervalCollection::depth() const { return members_.empty() ? 0 : members_.back().level; }

bool IntervalCollection::canonical_less(const IntervalCollection& a, const IntervalCollection& b) {
  return std::lexicographical_compare(a.members_.begin(), a.members_.end(), b.members_.begin(), b.members_.end());
}

IntervalCollection shadow(const DyadicInterval& I, int depth) {
  if (I.level > depth) throw std::invalid_argument("invalid-depth: shadow requires level(I) <= depth");
  std::vector<DyadicInterval> out;
  out.reserve((std::size_t{1} << (depth - I.level + 1)) - 1);
  for (int k = I.level; k <= depth; ++k) {
    const std::uint64_t first = I.index << (k - I.level);
    const std::uint64_t count = std::uint64_t{1} << (k - I.level);
    for (std::uint64_t i = 0; i < count; ++i) out.push_back({k, first + i});
  }
  return IntervalCollection(std::move(out));
}

IntervalCollection all_intervals(int depth) { return shadow(DyadicInterval{0, 0}, depth); }

DyadRat union_measure(const IntervalCollection& c) {
  if (c.empty()) throw std::invalid_argument("empty-collection: union_measure");
  DyadRat total;
  for (const auto& I : c.members()) {
    bool maximal = true;
    for (DyadicInterval a = I; a.level > 0;) {
      a = a.parent();
      if (c.contains(a)) {
        maximal = false;
        break;
      }
    }
    if (maximal) total += measure(I);
  }
  return total;
}

DyadRat carleson_constant(const IntervalCollection& e) {
  if (e.empty()) throw std::invalid_argument("empty-collection: carleson_constant");
  // packed[A] accumulates sum of |J| over members J below A, for every
  // ancestor A of a member (members included as their own ancestors).
  std::map<DyadicInterval, DyadRat> packed;
  for (const auto& J : e.members()) {
    const DyadRat m = measure(J);
    DyadicInterval a = J;
    packed[a] += m;
    while (a.level > 0) {
      a = a.parent();
      packed[a] += m;
    }
  }
  DyadRat best;  // result is >= 1, so 0 is a safe sentinel
  for (const auto& I : e.members()) {
    const DyadRat ratio = packed.at(I).times_pow2(I.level);  // divide by |I| = 2^{-level}
    if (best < ratio) best = ratio;
  }
  return best;
}

}  // namespace dyadlab
