#include "dyadlab/rearrangement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dyadlab {

namespace {

constexpr int kMaxMapDepth = 18;
constexpr std::size_t kHardEnumerationCap = 22;  // 2^22 subsets at most

std::uint64_t encode(const DyadicInterval& I) { return (std::uint64_t{1} << I.level) - 1 + I.index; }

/// Bitmask of the grid cells of resolution 2^-grid_level covered by I.
struct CellMask {
  std::vector<std::uint64_t> words;

  static CellMask empty(int grid_level) {
    const std::size_t cells = std::size_t{1} << grid_level;
    return {std::vector<std::uint64_t>((cells + 63) / 64, 0)};
  }
  static CellMask of(const DyadicInterval& I, int grid_level) {
    CellMask m = empty(grid_level);
    const std::size_t first = I.index << (grid_level - I.level);
    const std::size_t count = std::size_t{1} << (grid_level - I.level);
    for (std::size_t c = first; c < first + count; ++c) m.words[c / 64] |= std::uint64_t{1} << (c % 64);
    return m;
  }
  void or_with(const CellMask& o) {
    for (std::size_t w = 0; w < words.size(); ++w) words[w] |= o.words[w];
  }
  std::int64_t popcount() const {
    std::int64_t n = 0;
    for (std::uint64_t w : words) n += std::popcount(w);
    return n;
  }
};

struct MaskTable {
  int grid_level = 0;
  std::vector<CellMask> src;  // per heap index
  std::vector<CellMask> img;

  static MaskTable build(const RearrangementMap& tau) {
    MaskTable t;
    const std::size_t m = interval_count(tau.source_depth());
    t.grid_level = tau.source_depth();
    for (std::size_t i = 0; i < m; ++i) t.grid_level = std::max(t.grid_level, tau.apply_at(i).level);
    t.src.reserve(m);
    t.img.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      t.src.push_back(CellMask::of(interval_at(i), t.grid_level));
      t.img.push_back(CellMask::of(tau.apply_at(i), t.grid_level));
    }
    return t;
  }
};

IntervalCollection collection_from_mask(std::uint64_t mask) {
  std::vector<DyadicInterval> members;
  for (std::uint64_t m = mask; m != 0; m &= m - 1) members.push_back(interval_at(std::countr_zero(m)));
  return IntervalCollection(std::move(members));
}

/// Ratio |tau(C)*| / |C*| for the collection given by `mask`, as exact cell
/// counts on the common grid.
Rational mask_ratio(const MaskTable& t, std::uint64_t mask) {
  CellMask s = CellMask::empty(t.grid_level);
  CellMask g = CellMask::empty(t.grid_level);
  for (std::uint64_t m = mask; m != 0; m &= m - 1) {
    const std::size_t i = std::countr_zero(m);
    s.or_with(t.src[i]);
    g.or_with(t.img[i]);
  }
  return Rational(g.popcount(), s.popcount());
}

void keep_if_better(const Rational& value, std::uint64_t mask, Rational& best, std::uint64_t& best_mask) {
  if (best_mask == 0 || best < value) {
    best = value;
    best_mask = mask;
  } else if (value == best &&
             IntervalCollection::canonical_less(collection_from_mask(mask), collection_from_mask(best_mask))) {
    best_mask = mask;
  }
}

void require_measure_preserving(const RearrangementMap& tau, const char* what) {
  if (!tau.measure_preserving())
    throw std::invalid_argument(std::string("domain-mismatch: ") + what + " requires a measure-preserving map");
}

void apply_block_moves(std::vector<DyadicInterval>& table, const std::vector<DyadicInterval>& blocks, int depth) {
  const int n = static_cast<int>(blocks.size()) - 1;
  const int B = blocks[0].level;
  const auto move = [&](int level, const DyadicInterval& from, const DyadicInterval& to) {
    const std::int64_t shift = (static_cast<std::int64_t>(to.index) - static_cast<std::int64_t>(from.index))
                               << (level - B);
    const std::uint64_t first = from.index << (level - B);
    const std::uint64_t count = std::uint64_t{1} << (level - B);
    for (std::uint64_t i = first; i < first + count; ++i) {
      const DyadicInterval src{level, i};
      table[encode(src)] = DyadicInterval(level, static_cast<std::uint64_t>(static_cast<std::int64_t>(i) + shift));
    }
  };
  (void)depth;
  for (int k = 1; k <= n; ++k) move(B + k, blocks[k], blocks[0]);
  for (int j = 0; j + 1 <= n; ++j)
    for (int k = j + 1; k <= n; ++k) move(B + k, blocks[j], blocks[j + 1]);
}

}  // namespace

RearrangementMap::RearrangementMap(int source_depth, int target_depth, std::vector<DyadicInterval> table)
    : source_depth_(source_depth), target_depth_(target_depth), table_(std::move(table)) {
  if (source_depth < 0 || source_depth > kMaxMapDepth || target_depth < source_depth)
    throw std::invalid_argument("invalid-depth: rearrangement depths out of range");
  if (table_.size() != interval_count(source_depth))
    throw std::invalid_argument("invalid-depth: rearrangement table must cover D_0^N");
  std::vector<std::uint64_t> seen;
  seen.reserve(table_.size());
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (table_[i].level > target_depth_)
      throw std::invalid_argument("invalid-depth: rearrangement target level exceeds target depth");
    if (table_[i].level != interval_at(i).level) measure_preserving_ = false;
    seen.push_back(encode(table_[i]));
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::invalid_argument("domain-mismatch: rearrangement table is not injective");
}

bool RearrangementMap::bijective() const { return source_depth_ == target_depth_; }

DyadicInterval RearrangementMap::apply(const DyadicInterval& I) const {
  if (I.level > source_depth_) throw std::invalid_argument("invalid-depth: interval outside the map's domain");
  return table_[encode(I)];
}

IntervalCollection RearrangementMap::apply(const IntervalCollection& c) const {
  std::vector<DyadicInterval> out;
  out.reserve(c.size());
  for (const auto& I : c.members()) out.push_back(apply(I));
  return IntervalCollection(std::move(out));
}

RearrangementMap RearrangementMap::inverse() const {
  if (!bijective()) throw std::invalid_argument("domain-mismatch: inverse requires a bijective map");
  std::vector<DyadicInterval> inv(table_.size());
  for (std::size_t i = 0; i < table_.size(); ++i) inv[encode(table_[i])] = interval_at(i);
  return RearrangementMap(source_depth_, target_depth_, std::move(inv));
}

RearrangementMap RearrangementMap::then(const RearrangementMap& other) const {
  if (other.source_depth_ < target_depth_)
    throw std::invalid_argument("invalid-depth: composition depth mismatch");
  std::vector<DyadicInterval> out(table_.size());
  for (std::size_t i = 0; i < table_.size(); ++i) out[i] = other.apply(table_[i]);
  return RearrangementMap(source_depth_, other.target_depth_, std::move(out));
}

RearrangementMap build_identity(int depth) {
  std::vector<DyadicInterval> table(interval_count(depth));
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = interval_at(i);
  return RearrangementMap(depth, depth, std::move(table));
}

RearrangementMap build_parity_shift(int depth) {
  if (depth < 1) throw std::invalid_argument("invalid-depth: parity shift requires depth >= 1");
  std::vector<DyadicInterval> table(interval_count(depth));
  for (std::size_t i = 0; i < table.size(); ++i) {
    DyadicInterval I = interval_at(i);
    if (I.level % 2 == 1) {
      const std::uint64_t half = std::uint64_t{1} << (I.level - 1);
      I.index = I.index < half ? I.index + half : I.index - half;
    }
    table[i] = I;
  }
  return RearrangementMap(depth, depth, std::move(table));
}

RearrangementMap build_block_perm(const std::vector<DyadicInterval>& blocks, int depth) {
  if (blocks.size() < 2) throw std::invalid_argument("invalid-blocks: need at least two blocks");
  const int B = blocks[0].level;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (blocks[j].level != B) throw std::invalid_argument("invalid-blocks: blocks must share one level");
    if (j > 0 && blocks[j].index <= blocks[j - 1].index)
      throw std::invalid_argument("invalid-blocks: blocks must be disjoint and listed in increasing position");
  }
  const int n = static_cast<int>(blocks.size()) - 1;
  if (depth < B + n) throw std::invalid_argument("invalid-depth: grid too shallow for the block moves");

  std::vector<DyadicInterval> table(interval_count(depth));
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = interval_at(i);
  apply_block_moves(table, blocks, depth);
  return RearrangementMap(depth, depth, std::move(table));
}

RearrangementMap build_glued_blocks(int depth) {
  std::vector<DyadicInterval> table(interval_count(depth));
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = interval_at(i);
  for (int n = 1;; ++n) {
    const int m = std::bit_width(static_cast<unsigned>(n));  // 2^m >= n+1 blocks
    const int block_level = n + m;
    if (block_level + n > depth) break;
    const std::uint64_t base = ((std::uint64_t{1} << n) - 2) << m;
    std::vector<DyadicInterval> blocks;
    for (int j = 0; j <= n; ++j) blocks.emplace_back(block_level, base + j);
    apply_block_moves(table, blocks, depth);
  }
  return RearrangementMap(depth, depth, std::move(table));
}

SemenovResult semenov_exact(const RearrangementMap& tau, std::size_t max_intervals) {
  require_measure_preserving(tau, "semenov_exact");
  const std::size_t m = interval_count(tau.source_depth());
  if (m > std::min(max_intervals, kHardEnumerationCap))
    throw std::invalid_argument("too-large: exact Semenov search exceeds the brute-force cap; use semenov_heuristic");

  const MaskTable masks = MaskTable::build(tau);
  Rational best;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask)
    keep_if_better(mask_ratio(masks, mask), mask, best, best_mask);
  return {best, collection_from_mask(best_mask), true};
}

SemenovResult semenov_heuristic(const RearrangementMap& tau, const SemenovSearchOptions& opts) {
  require_measure_preserving(tau, "semenov_heuristic");
  const std::size_t m = interval_count(tau.source_depth());
  const MaskTable masks = MaskTable::build(tau);

  Rational best;
  IntervalCollection best_witness;
  const auto consider = [&](const Rational& value, const std::vector<std::size_t>& members) {
    std::vector<DyadicInterval> ivs;
    ivs.reserve(members.size());
    for (std::size_t i : members) ivs.push_back(interval_at(i));
    IntervalCollection c(std::move(ivs));
    if (best_witness.empty() || best < value ||
        (value == best && IntervalCollection::canonical_less(c, best_witness))) {
      best = value;
      best_witness = std::move(c);
    }
  };

  // Greedy growth from every singleton: add whichever interval improves the
  // exact cell-count ratio the most, until no addition improves it.
  for (std::size_t start = 0; start < m; ++start) {
    std::vector<bool> in(m, false);
    std::vector<std::size_t> members{start};
    in[start] = true;
    CellMask s = masks.src[start];
    CellMask g = masks.img[start];
    Rational current(g.popcount(), s.popcount());
    consider(current, members);
    for (;;) {
      Rational best_gain = current;
      std::size_t pick = m;
      for (std::size_t j = 0; j < m; ++j) {
        if (in[j]) continue;
        CellMask s2 = s;
        CellMask g2 = g;
        s2.or_with(masks.src[j]);
        g2.or_with(masks.img[j]);
        const Rational r(g2.popcount(), s2.popcount());
        if (best_gain < r) {
          best_gain = r;
          pick = j;
        }
      }
      if (pick == m) break;
      in[pick] = true;
      members.push_back(pick);
      s.or_with(masks.src[pick]);
      g.or_with(masks.img[pick]);
      current = best_gain;
      consider(current, members);
    }
  }

  // Simulated annealing over inclusion vectors.
  for (int restart = 0; restart < opts.anneal_restarts; ++restart) {
    std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + restart);
    std::vector<bool> in(m, false);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < m; ++i) in[i] = unif(rng) < 0.3;
    const auto ratio_of = [&](const std::vector<bool>& sel) -> std::pair<Rational, bool> {
      CellMask s = CellMask::empty(masks.grid_level);
      CellMask g = CellMask::empty(masks.grid_level);
      bool any = false;
      for (std::size_t i = 0; i < m; ++i)
        if (sel[i]) {
          any = true;
          s.or_with(masks.src[i]);
          g.or_with(masks.img[i]);
        }
      if (!any) return {Rational(), false};
      return {Rational(g.popcount(), s.popcount()), true};
    };
    auto [current, ok] = ratio_of(in);
    if (!ok) {
      in[0] = true;
      current = ratio_of(in).first;
    }
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    for (std::size_t step = 0; step < opts.anneal_steps; ++step) {
      const double temp = 0.5 * std::pow(0.02, static_cast<double>(step) / static_cast<double>(opts.anneal_steps));
      const std::size_t flip = pick(rng);
      in[flip] = !in[flip];
      const auto [cand, nonempty] = ratio_of(in);
      bool accept = false;
      if (nonempty) {
        const double delta = std::log(cand.to_double()) - std::log(current.to_double());
        accept = delta >= 0 || unif(rng) < std::exp(delta / temp);
      }
      if (!accept) {
        in[flip] = !in[flip];
        continue;
      }
      current = cand;
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < m; ++i)
        if (in[i]) members.push_back(i);
      consider(current, members);
    }
  }

  // Recompute the witness ratio through the exact rational path.
  const Rational certified = Rational::ratio(union_measure(tau.apply(best_witness)), union_measure(best_witness));
  return {certified, best_witness, false};
}

SemenovResult shadow_semenov(const RearrangementMap& tau) {
  require_measure_preserving(tau, "shadow_semenov");
  const int N = tau.source_depth();
  Rational best;
  IntervalCollection best_witness;
  for (std::size_t i = 0; i < interval_count(N); ++i) {
    const DyadicInterval I = interval_at(i);
    const IntervalCollection q = shadow(I, N);
    const Rational value = Rational::ratio(union_measure(tau.apply(q)), measure(I));
    if (best_witness.empty() || best < value) {
      best = value;
      best_witness = q;
    }
  }
  return {best, best_witness, true};
}

namespace {

/// Exact Carleson constant of the collection selected by `mask`, over the
/// (possibly relabeled) interval family `ivs`.
Rational masked_carleson(std::uint64_t mask, const std::vector<DyadicInterval>& ivs,
                         const std::vector<std::uint64_t>& contained, int grid_level) {
  Rational best;
  bool first = true;
  for (std::uint64_t m = mask; m != 0; m &= m - 1) {
    const std::size_t i = std::countr_zero(m);
    std::int64_t packed = 0;  // units of 2^-grid_level
    for (std::uint64_t inner = mask & contained[i]; inner != 0; inner &= inner - 1)
      packed += std::int64_t{1} << (grid_level - ivs[std::countr_zero(inner)].level);
    const Rational r(packed, std::int64_t{1} << (grid_level - ivs[i].level));
    if (first || best < r) {
      best = r;
      first = false;
    }
  }
  return best;
}

Rational rational_div(const Rational& a, const Rational& b) {
  return Rational(a.num() * b.den(), a.den() * b.num());
}

}  // namespace

DistortionResult carleson_distortion_exact(const RearrangementMap& tau, std::size_t max_intervals) {
  if (!tau.bijective()) throw std::invalid_argument("domain-mismatch: exact distortion requires a bijective map");
  const std::size_t m = interval_count(tau.source_depth());
  if (m > std::min(max_intervals, kHardEnumerationCap))
    throw std::invalid_argument("too-large: exact distortion search exceeds the brute-force cap");

  std::vector<DyadicInterval> src(m), img(m);
  int grid = tau.source_depth();
  for (std::size_t i = 0; i < m; ++i) {
    src[i] = interval_at(i);
    img[i] = tau.apply_at(i);
    grid = std::max(grid, img[i].level);
  }
  std::vector<std::uint64_t> src_contained(m, 0), img_contained(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (src[j].contained_in(src[i])) src_contained[i] |= std::uint64_t{1} << j;
      if (img[j].contained_in(img[i])) img_contained[i] |= std::uint64_t{1} << j;
    }

  Rational expand, contract;
  std::uint64_t expand_mask = 0, contract_mask = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    const Rational ce = masked_carleson(mask, src, src_contained, grid);
    const Rational ci = masked_carleson(mask, img, img_contained, grid);
    keep_if_better(rational_div(ci, ce), mask, expand, expand_mask);
    keep_if_better(rational_div(ce, ci), mask, contract, contract_mask);
  }
  return {expand, contract, collection_from_mask(expand_mask), collection_from_mask(contract_mask), true};
}

DistortionResult carleson_distortion_sampled(const RearrangementMap& tau, const DistortionSampleOptions& opts) {
  const std::size_t m = interval_count(tau.source_depth());
  DistortionResult out;
  bool first = true;
  std::size_t draw = 0;
  for (double density : opts.densities) {
    for (int s = 0; s < opts.samples_per_density; ++s, ++draw) {
      std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + draw);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::vector<DyadicInterval> members;
      for (std::size_t i = 0; i < m; ++i)
        if (unif(rng) < density) members.push_back(interval_at(i));
      if (members.empty()) continue;
      IntervalCollection e(std::move(members));
      const DyadRat ce = carleson_constant(e);
      const DyadRat ci = carleson_constant(tau.apply(e));
      const Rational expand = Rational::ratio(ci, ce);
      const Rational contract = Rational::ratio(ce, ci);
      if (first || out.expand < expand) {
        out.expand = expand;
        out.expand_witness = e;
      }
      if (first || out.contract < contract) {
        out.contract = contract;
        out.contract_witness = e;
      }
      first = false;
    }
  }
  if (first) throw std::invalid_argument("invalid-budget: distortion sampling drew no non-empty collection");
  return out;
}

}  // namespace dyadlab
