#include "dyadlab/extrapolation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dyadlab {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int default_grid(const RearrangementMap& tau, int level) {
  int g = level;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << level); ++i)
    g = std::max(g, tau.apply(DyadicInterval(level, i)).level);
  return g;
}

double mean_of(std::span<const double> cells) {
  double s = 0.0;
  for (double c : cells) s += c;
  return s / static_cast<double>(cells.size());
}

/// Level-(k-1) slice d_k of f, relabeled through tau, as step values on the
/// grid of 2^{target_depth+1} cells.
std::vector<Vec> relabeled_slice(const RearrangementMap& tau, const HaarExpansion& f, int level) {
  HaarExpansion slice(tau.target_depth(), f.space());
  const std::size_t base = (std::size_t{1} << level) - 1;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << level); ++i)
    slice.set_coeff(tau.apply(DyadicInterval(level, static_cast<std::uint64_t>(i))), f.coeff_at(base + i));
  return to_step(slice);
}

HaarExpansion random_expansion(int depth, const SpaceSpec& space, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  HaarExpansion f(depth, space);
  for (std::size_t i = 0; i < f.coefficient_count(); ++i) {
    Vec a(space.dim);
    for (double& c : a) c = gauss(rng);
    f.set_coeff_at(i, std::move(a));
  }
  return f;
}

double scalar_lp(std::span<const double> cells, double p) {
  double s = 0.0;
  const double w = 1.0 / static_cast<double>(cells.size());
  for (double c : cells) s += w * std::pow(std::abs(c), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

AdaptedSequence::AdaptedSequence(std::vector<std::vector<double>> levels_in) : levels(std::move(levels_in)) {
  if (levels.empty()) throw std::invalid_argument("invalid-sequence: adapted sequence needs at least Z_0");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k].size() != (std::size_t{1} << k))
      throw std::invalid_argument("invalid-sequence: Z_k must have 2^k values");
    for (double v : levels[k])
      if (!(v >= 0.0)) throw std::invalid_argument("invalid-sequence: Z_k must be nonnegative");
  }
  for (std::size_t k = 0; k + 1 < levels.size(); ++k)
    for (std::size_t i = 0; i < levels[k + 1].size(); ++i)
      if (levels[k + 1][i] < levels[k][i / 2] - 1e-15)
        throw std::invalid_argument("invalid-sequence: Z_k must be pointwise nondecreasing in k");
}

std::vector<double> p_shift(const RearrangementMap& tau, int level, std::span<const double> weights,
                            int grid_level) {
  if (level > tau.source_depth()) throw std::invalid_argument("invalid-depth: p_shift level exceeds the map's domain");
  if (weights.size() != (std::size_t{1} << level))
    throw std::invalid_argument("invalid-weights: p_shift needs 2^level weights");
  if (grid_level < 0) grid_level = default_grid(tau, level);

  std::vector<double> out(std::size_t{1} << grid_level, 0.0);
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << level); ++i) {
    const DyadicInterval target = tau.apply(DyadicInterval(level, i));
    if (target.level > grid_level) throw std::invalid_argument("invalid-depth: p_shift grid too coarse for a target");
    const std::size_t first = target.index << (grid_level - target.level);
    const std::size_t count = std::size_t{1} << (grid_level - target.level);
    for (std::size_t c = first; c < first + count; ++c) out[c] += weights[i];
  }
  return out;
}

std::vector<double> p_shift_step(const RearrangementMap& tau, int level, std::span<const double> cells,
                                 int grid_level) {
  const std::size_t n = std::size_t{1} << level;
  if (cells.size() < n || cells.size() % n != 0)
    throw std::invalid_argument("invalid-weights: step values incompatible with the level");
  const std::size_t block = cells.size() / n;
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = cells[i * block];
    for (std::size_t c = i * block; c < (i + 1) * block; ++c)
      if (cells[c] != weights[i])
        throw std::invalid_argument("invalid-weights: step values are not constant on the level intervals");
  }
  return p_shift(tau, level, weights, grid_level);
}

MaximalReport check_maximal_inequality(const RearrangementMap& tau, const AdaptedSequence& z, double kappa) {
  const int n = z.depth();
  if (n > tau.source_depth()) throw std::invalid_argument("invalid-depth: sequence deeper than the map's domain");
  int grid = n;
  for (int k = 0; k <= n; ++k) grid = std::max(grid, default_grid(tau, k));

  std::vector<double> sup(std::size_t{1} << grid, 0.0);
  for (int k = 0; k <= n; ++k) {
    const auto shifted = p_shift(tau, k, z.levels[k], grid);
    for (std::size_t c = 0; c < sup.size(); ++c) sup[c] = std::max(sup[c], shifted[c]);
  }
  MaximalReport report;
  report.kappa = kappa;
  report.lhs = mean_of(sup);
  report.rhs = mean_of(z.levels[n]);
  report.pass = report.lhs <= kappa * report.rhs + 1e-12;
  return report;
}

std::vector<double> a_square(const RearrangementMap& tau, const HaarExpansion& f) {
  if (!f.zero_mean()) throw std::invalid_argument("not-zero-mean: a_square");
  if (f.depth() > tau.source_depth()) throw std::invalid_argument("invalid-depth: expansion exceeds the map's domain");
  const std::size_t cells = cell_count(tau.target_depth());
  std::vector<double> acc(cells, 0.0);
  for (int level = 0; level <= f.depth(); ++level) {
    const auto slice = relabeled_slice(tau, f, level);
    for (std::size_t c = 0; c < cells; ++c) {
      const double v = f.space().norm(slice[c]);
      acc[c] += v * v;
    }
  }
  for (double& v : acc) v = std::sqrt(v);
  return acc;
}

std::vector<double> a_rademacher(const RearrangementMap& tau, const HaarExpansion& f, bool exact, int samples,
                                 std::uint64_t seed) {
  if (!f.zero_mean()) throw std::invalid_argument("not-zero-mean: a_rademacher");
  if (f.depth() > tau.source_depth()) throw std::invalid_argument("invalid-depth: expansion exceeds the map's domain");
  const int n = f.depth() + 1;  // number of level slices
  if (exact && n > 12) throw std::invalid_argument("too-large: exact Rademacher mode needs depth+1 <= 12");

  const std::size_t cells = cell_count(tau.target_depth());
  std::vector<std::vector<Vec>> slices;
  slices.reserve(n);
  for (int level = 0; level < n; ++level) slices.push_back(relabeled_slice(tau, f, level));

  const int d = f.space().dim;
  std::vector<double> acc(cells, 0.0);
  Vec s(d);
  const auto accumulate = [&](auto sign_of) {
    for (std::size_t c = 0; c < cells; ++c) {
      std::fill(s.begin(), s.end(), 0.0);
      for (int k = 0; k < n; ++k) {
        const double sign = sign_of(k);
        for (int j = 0; j < d; ++j) s[j] += sign * slices[k][c][j];
      }
      acc[c] += f.space().norm(s);
    }
  };

  if (exact) {
    for (std::uint64_t eps = 0; eps < (std::uint64_t{1} << n); ++eps)
      accumulate([&](int k) { return (eps >> k) & 1 ? -1.0 : 1.0; });
    for (double& v : acc) v /= static_cast<double>(std::uint64_t{1} << n);
  } else {
    if (samples <= 0) throw std::invalid_argument("invalid-budget: samples must be positive");
    std::mt19937_64 rng(seed);
    std::vector<double> signs(n);
    for (int t = 0; t < samples; ++t) {
      for (double& sg : signs) sg = (rng() & 1) ? -1.0 : 1.0;
      accumulate([&](int k) { return signs[k]; });
    }
    for (double& v : acc) v /= samples;
  }
  return acc;
}

HomogeneousOp square_function_op(const RearrangementMap& tau, int depth) {
  return {"square", depth, tau.target_depth() + 1,
          [tau](const HaarExpansion& f) { return a_square(tau, f); }};
}

HomogeneousOp rademacher_op(const RearrangementMap& tau, int depth, bool exact, int samples, std::uint64_t seed) {
  return {"rademacher", depth, tau.target_depth() + 1,
          [tau, exact, samples, seed](const HaarExpansion& f) { return a_rademacher(tau, f, exact, samples, seed); }};
}

MonotoneReport check_tau_monotone(const HomogeneousOp& a, const RearrangementMap& tau, const SpaceSpec& X, double c,
                                  int samples, std::uint64_t seed, double tol) {
  const int depth = a.depth;  // levels 1..depth+1 carry the slices d_k
  MonotoneReport report;
  report.samples = samples;
  int grid = depth;
  for (int k = 0; k <= depth; ++k) grid = std::max(grid, default_grid(tau, k));

  for (int t = 0; t < samples; ++t) {
    std::mt19937_64 rng(mix_seed(seed, t));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Nondecreasing nonnegative adapted multipliers: gamma_k lives on
    // D_{k-1} and gamma_{k+1} >= gamma_k pointwise.
    std::vector<std::vector<double>> gammas;  // gammas[k] on level k
    for (int level = 0; level <= depth; ++level) {
      std::vector<double> g(std::size_t{1} << level);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double prev = level == 0 ? 0.0 : gammas[level - 1][i / 2];
        g[i] = prev + unif(rng);
      }
      gammas.push_back(std::move(g));
    }

    const HaarExpansion f = random_expansion(depth, X, rng);
    HaarExpansion weighted(depth, X);
    for (std::size_t i = 0; i < f.coefficient_count(); ++i) {
      const DyadicInterval I = interval_at(i);
      Vec v = f.coeff_at(i);
      for (double& x : v) x *= gammas[I.level][I.index];
      weighted.set_coeff_at(i, std::move(v));
    }

    const auto lhs = a.eval(weighted);
    const auto base = a.eval(f);
    std::vector<double> envelope(std::size_t{1} << grid, 0.0);
    for (int level = 0; level <= depth; ++level) {
      const auto shifted = p_shift(tau, level, gammas[level], grid);
      for (std::size_t cidx = 0; cidx < envelope.size(); ++cidx)
        envelope[cidx] = std::max(envelope[cidx], std::abs(shifted[cidx]));
    }

    // Compare on the common refinement of the two grids.
    const std::size_t cells = std::max(lhs.size(), envelope.size());
    for (std::size_t cidx = 0; cidx < cells; ++cidx) {
      const std::size_t ai = cidx * lhs.size() / cells;
      const std::size_t ei = cidx * envelope.size() / cells;
      const double left = lhs[ai];
      const double right = c * envelope[ei] * base[ai];
      const double margin = left - right;
      if (margin > report.worst_margin) {
        report.worst_margin = margin;
        report.failing_sample = t;
        report.failing_cell = cidx;
        report.lhs = left;
        report.rhs = right;
      }
      if (margin > tol) report.pass = false;
    }
  }
  return report;
}

double homogeneous_norm_search(const HomogeneousOp& a, double r, const SpaceSpec& X,
                               const RatioSearchOptions& opts) {
  if (!(r >= 1.0)) throw std::invalid_argument("invalid-exponent: r must be >= 1");
  const std::size_t m = interval_count(a.depth);
  const std::size_t dim = m * static_cast<std::size_t>(X.dim);

  const auto expansion_of = [&](std::span<const double> x) {
    HaarExpansion f(a.depth, X);
    for (std::size_t i = 0; i < m; ++i)
      f.set_coeff_at(i, Vec(x.begin() + i * X.dim, x.begin() + (i + 1) * X.dim));
    return f;
  };
  const auto ratio = [&](std::span<const double> x) {
    const HaarExpansion f = expansion_of(x);
    const double den = lp_norm(f, r);
    if (den == 0.0) return 0.0;
    return scalar_lp(a.eval(f), r) / den;
  };

  double best = 0.0;
  for (int restart = 0; restart < opts.restarts; ++restart) {
    std::mt19937_64 rng(mix_seed(opts.seed, restart));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(dim);
    for (double& cx : x) cx = gauss(rng);
    double value = ratio(x);
    double step = 0.5;
    for (int it = 0; it < opts.max_iterations; ++it) {
      std::vector<double> grad(dim);
      const double h = 1e-6;
      for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
        xp[i] += h;
        xm[i] -= h;
        grad[i] = (ratio(xp) - ratio(xm)) / (2 * h);
      }
      double g2 = 0.0;
      for (double g : grad) g2 += g * g;
      if (std::sqrt(g2) < 1e-9 * std::max(1.0, value)) break;
      bool improved = false;
      double t = std::max(2.0 * step, 1e-6);
      for (int back = 0; back < 40; ++back) {
        std::vector<double> y = x;
        for (std::size_t i = 0; i < dim; ++i) y[i] += t * grad[i];
        const double fy = ratio(y);
        if (fy > value * (1.0 + 1e-12)) {
          x = std::move(y);
          value = fy;
          step = t;
          improved = true;
          break;
        }
        t *= 0.5;
      }
      if (!improved) break;
    }
    best = std::max(best, value);
  }
  return best;
}

ExtrapolationBoundReport check_extrapolation_bound(const HomogeneousOp& a, const SpaceSpec& X, double kappa, double c,
                                             double p, double q, const RatioSearchOptions& opts, double tolerance) {
  if (!(1.0 < q && q < p)) throw std::invalid_argument("invalid-exponents: need 1 < q < p");
  const double r = p * q / (p - q);  // 1/q = 1/r + 1/p

  ExtrapolationBoundReport report;
  report.q_norm_lower = homogeneous_norm_search(a, q, X, opts);
  RatioSearchOptions fine = opts;
  fine.restarts = std::max(opts.restarts, 32);
  fine.max_iterations = std::max(opts.max_iterations, 200);
  report.p_norm = homogeneous_norm_search(a, p, X, fine);
  report.factor = c * (3.0 * p / (q - 1.0)) * std::pow(kappa, 1.0 / r);
  report.bound = report.factor * report.p_norm;
  report.pass = report.q_norm_lower <= report.bound * (1.0 + tolerance);
  return report;
}

ConditionCReport check_condition_C(const CDecomposition& dec, const RearrangementMap& tau,
                                   std::span<const double> gamma, const SpaceSpec& X, int c3_samples,
                                   const SearchOptions& beta_search) {
  const int N = tau.source_depth();
  if (gamma.size() != interval_count(N)) throw std::invalid_argument("invalid-weights: gamma must cover D_0^N");
  for (double g : gamma)
    if (!(g > 0.0)) throw std::invalid_argument("invalid-weights: gamma must be positive");
  if (dec.root.level > N) throw std::invalid_argument("invalid-decomposition: root outside D_0^N");
  if (!(dec.p > 1.0)) throw std::invalid_argument("invalid-exponents: condition C needs p > 1");
  if (!(dec.p_star >= dec.p)) throw std::invalid_argument("invalid-exponents: condition C needs p_star >= p");

  // The parts must partition the shadow of the root exactly.
  const IntervalCollection whole = shadow(dec.root, N);
  std::vector<DyadicInterval> combined;
  for (const auto& part : dec.parts) {
    if (part.empty()) throw std::invalid_argument("invalid-decomposition: empty part");
    for (const auto& I : part.members()) combined.push_back(I);
  }
  if (combined.size() != whole.size()) throw std::invalid_argument("invalid-decomposition: parts do not partition the shadow");
  if (IntervalCollection(combined) != whole)
    throw std::invalid_argument("invalid-decomposition: parts do not partition the shadow");

  ConditionCReport report;
  const double root_measure = measure(dec.root).to_double();
  const double q = dec.p / (dec.p - 1.0);

  // (C1): sum of |K_i^*| against kappa |J_0|; measures exact.
  DyadRat c1_sum;
  for (const auto& part : dec.parts) c1_sum += union_measure(part);
  report.c1_sum = c1_sum.to_double();
  report.c1_bound = dec.kappa * root_measure;
  report.c1 = report.c1_sum <= report.c1_bound + 1e-12;

  // (C2): beta_i = sup ||D_q a_i||_p^q on the unit sphere of part i.
  double c2_sum = 0.0;
  for (const auto& part : dec.parts) {
    double beta;
    bool exact = true;
    double gmin = gamma[heap_index(*part.members().begin())], gmax = gmin;
    for (const auto& I : part.members()) {
      gmin = std::min(gmin, gamma[heap_index(I)]);
      gmax = std::max(gmax, gamma[heap_index(I)]);
    }
    if (gmin == gmax) {
      beta = gmax;  // D_q is gmax^{1/q} times the identity on the part
    } else if (dec.p == 2.0 && X.is_scalar()) {
      beta = gmax;  // diagonal in the orthonormal basis: sup gamma^{1/q}, to the q
    } else {
      std::vector<double> weights(interval_count(N), 0.0);
      std::vector<std::size_t> support;
      for (const auto& I : part.members()) {
        weights[heap_index(I)] = std::pow(gamma[heap_index(I)], 1.0 / q);
        support.push_back(heap_index(I));
      }
      DiagonalOp dq(N, std::move(weights));
      SearchOptions so = beta_search;
      so.support = std::move(support);
      const NormEstimate est = operator_norm_search(dq, dec.p, X, N, so);
      beta = std::pow(est.value, q);
      exact = false;
    }
    report.betas.push_back(beta);
    report.betas_exact = report.betas_exact && exact;
    c2_sum += beta * union_measure(tau.apply(part)).to_double();
  }
  report.c2_sum = c2_sum;
  report.c2_bound = dec.kappa * root_measure;
  report.c2 = report.c2_sum <= report.c2_bound + 1e-12;

  // (C3): sampled coefficient tuples at exponent p_star.
  report.c3 = true;
  report.c3_samples = c3_samples;
  for (int t = 0; t < c3_samples; ++t) {
    std::mt19937_64 rng(mix_seed(beta_search.seed, 5000 + t));
    std::normal_distribution<double> gauss(0.0, 1.0);
    HaarExpansion f(N, X);
    for (const auto& I : whole.members()) {
      Vec a(X.dim);
      for (double& cx : a) cx = gauss(rng);
      f.set_coeff(I, std::move(a));
    }
    double lhs = 0.0;
    for (const auto& part : dec.parts) {
      HaarExpansion fi(N, X);
      for (const auto& I : part.members()) fi.set_coeff(I, f.coeff(I));
      lhs += std::pow(lp_norm(fi, dec.p_star), dec.p_star);
    }
    lhs = std::pow(lhs, 1.0 / dec.p_star);
    const double rhs = dec.kappa * lp_norm(f, dec.p_star);
    const double margin = lhs - rhs;
    report.c3_worst_margin = std::max(report.c3_worst_margin, margin);
    if (margin > 1e-12 * (1.0 + rhs)) report.c3 = false;
  }

  report.pass = report.c1 && report.c2 && report.c3;
  return report;
}

APOp::APOp(Matrix s, SpaceSpec source, SpaceSpec target, RearrangementMap tau, std::vector<double> gamma, double p)
    : s_(std::move(s)), source_(source), target_(target), tau_(std::move(tau)), gamma_(std::move(gamma)), p_(p) {
  if (!(p >= 1.0)) throw std::invalid_argument("invalid-exponent: p must be >= 1");
  if (s_.size() != static_cast<std::size_t>(target_.dim)) throw std::invalid_argument("invalid-map: S row count must match dim(Y)");
  for (const auto& row : s_)
    if (row.size() != static_cast<std::size_t>(source_.dim))
      throw std::invalid_argument("invalid-map: S column count must match dim(X)");
  if (gamma_.size() != interval_count(tau_.source_depth()))
    throw std::invalid_argument("invalid-weights: gamma must cover D_0^N");
  for (double g : gamma_)
    if (!(g > 0.0)) throw std::invalid_argument("invalid-weights: gamma must be positive");
}

HaarExpansion APOp::apply(const HaarExpansion& f) const {
  if (!f.zero_mean()) throw std::invalid_argument("not-zero-mean: apply_A_p");
  if (f.depth() > tau_.source_depth()) throw std::invalid_argument("invalid-depth: expansion exceeds the map's domain");
  if (f.space() != source_) throw std::invalid_argument("invalid-map: expansion space mismatch");
  const HaarExpansion src = f.depth() == tau_.source_depth() ? f : f.extended(tau_.source_depth());
  HaarExpansion out(tau_.target_depth(), target_);
  for (std::size_t i = 0; i < src.coefficient_count(); ++i) {
    const Vec& a = src.coeff_at(i);
    const double weight = std::pow(gamma_[i], 1.0 / p_);
    Vec b(target_.dim, 0.0);
    for (int row = 0; row < target_.dim; ++row) {
      double acc = 0.0;
      for (int colidx = 0; colidx < source_.dim; ++colidx) acc += s_[row][colidx] * a[colidx];
      b[row] = weight * acc;
    }
    out.set_coeff(tau_.apply_at(i), std::move(b));
  }
  return out;
}

HaarExpansion APOp::apply_transpose(const HaarExpansion& g) const {
  if (g.depth() != tau_.target_depth()) throw std::invalid_argument("invalid-depth: transpose input depth mismatch");
  HaarExpansion out(tau_.source_depth(), source_);
  for (std::size_t i = 0; i < out.coefficient_count(); ++i) {
    const Vec& z = g.coeff(tau_.apply_at(i));
    const double weight = std::pow(gamma_[i], 1.0 / p_);
    Vec b(source_.dim, 0.0);
    for (int colidx = 0; colidx < source_.dim; ++colidx) {
      double acc = 0.0;
      for (int row = 0; row < target_.dim; ++row) acc += s_[row][colidx] * z[row];
      b[colidx] = weight * acc;
    }
    out.set_coeff_at(i, std::move(b));
  }
  return out;
}

HaarExpansion apply_A_p(const Matrix& s, const SpaceSpec& source, const SpaceSpec& target,
                        const RearrangementMap& tau, std::span<const double> gamma, double p,
                        const HaarExpansion& f) {
  return APOp(s, source, target, tau, std::vector<double>(gamma.begin(), gamma.end()), p).apply(f);
}

Atom random_supported_atom(int depth, const SpaceSpec& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, interval_count(depth) - 1);
  const DyadicInterval root = interval_at(pick(rng));
  std::normal_distribution<double> gauss(0.0, 1.0);

  HaarExpansion a(depth, space);
  const IntervalCollection support = shadow(root, depth);
  for (const auto& I : support.members()) {
    Vec v(space.dim);
    for (double& c : v) c = gauss(rng);
    a.set_coeff(I, std::move(v));
  }
  const auto step = to_step(a);
  double sup = 0.0;
  for (const auto& cell : step) sup = std::max(sup, space.norm(cell));
  const double target = 1.0 / measure(root).to_double();  // ||a||_inf |J_0| = 1
  if (sup > 0.0) {
    const double scale = target / sup;
    HaarExpansion scaled(depth, space);
    for (std::size_t i = 0; i < a.coefficient_count(); ++i) {
      Vec v = a.coeff_at(i);
      for (double& c : v) c *= scale;
      scaled.set_coeff_at(i, std::move(v));
    }
    a = std::move(scaled);
  }

  std::vector<int> nu(cell_count(depth), StoppingTimeGrid::kInfinity);
  const std::size_t first = root.index << (depth + 1 - root.level);
  const std::size_t count = std::size_t{1} << (depth + 1 - root.level);
  for (std::size_t c = first; c < first + count; ++c) nu[c] = root.level;
  return {std::move(a), StoppingTimeGrid(depth, std::move(nu))};
}

CDecomposition semenov_decomposition(const DyadicInterval& root, int depth, double p, double p_star, double kappa) {
  return {root, {shadow(root, depth)}, p, p_star, kappa};
}

H1ExtrapolationReport check_h1_extrapolation(const Matrix& s, const SpaceSpec& source, const SpaceSpec& target,
                                 const RearrangementMap& tau, std::span<const double> gamma, double p, double kappa,
                                 double p_star, std::vector<CDecomposition> decs, const H1ExtrapolationOptions& opts) {
  if (!(p > 1.0)) throw std::invalid_argument("invalid-exponents: need p > 1");
  if (!(p_star >= p)) throw std::invalid_argument("invalid-exponents: need p_star >= p");
  const int N = tau.source_depth();

  if (decs.empty()) {
    for (std::size_t i = 0; i < interval_count(N); ++i)
      decs.push_back(semenov_decomposition(interval_at(i), N, p, p_star, kappa));
  }

  H1ExtrapolationReport report;
  report.condition_c_pass = true;
  for (const auto& dec : decs) {
    SearchOptions beta_search;
    beta_search.seed = opts.seed;
    beta_search.restarts = 16;
    const auto cc = check_condition_C(dec, tau, gamma, source, opts.c3_samples, beta_search);
    if (!cc.pass) report.condition_c_pass = false;
  }

  const std::vector<double> gam(gamma.begin(), gamma.end());
  APOp a1(s, source, target, tau, gam, 1.0);
  APOp ap(s, source, target, tau, gam, p);

  // H^1 -> H^1 lower bound over random zero-mean expansions and atoms.
  double h1 = 0.0;
  for (int t = 0; t < opts.h1_samples; ++t) {
    std::mt19937_64 rng(mix_seed(opts.seed, 100000 + t));
    const HaarExpansion f = random_expansion(N, source, rng);
    const double den = h1_norm(f);
    if (den > 0.0) h1 = std::max(h1, h1_norm(a1.apply(f)) / den);
  }
  for (int t = 0; t < opts.atom_samples; ++t) {
    const Atom atom = random_supported_atom(N, source, mix_seed(opts.seed, 200000 + t));
    const double den = h1_norm(atom.expansion);
    if (den > 0.0) h1 = std::max(h1, h1_norm(a1.apply(atom.expansion)) / den);
  }
  report.h1_lower = h1;

  SearchOptions lp_opts = opts.lp_search;
  lp_opts.seed = mix_seed(opts.seed, 300000);
  report.lp_estimate = operator_norm_exact_small(ap, p, source, N, lp_opts).value;

  const double q_star = p_star / (p_star - 1.0);
  report.factor = (18.0 * p / (p - 1.0)) * std::pow(kappa, 1.0 + 1.0 / q_star);
  report.bound = report.factor * report.lp_estimate;
  report.pass = report.condition_c_pass && report.h1_lower <= report.bound * (1.0 + opts.tolerance);
  return report;
}

}  // namespace dyadlab
