#include "dyadlab/operators.hpp"

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

void require_zero_mean(const HaarExpansion& f, const char* what) {
  if (!f.zero_mean()) throw std::invalid_argument(std::string("not-zero-mean: ") + what);
}

/// Raw coefficient vector <-> zero-mean expansion over the given support.
struct CoefficientLayout {
  int depth;
  SpaceSpec space;
  std::vector<std::size_t> support;  // heap indices

  static CoefficientLayout full(int depth, const SpaceSpec& space) {
    CoefficientLayout l{depth, space, {}};
    l.support.resize(interval_count(depth));
    for (std::size_t i = 0; i < l.support.size(); ++i) l.support[i] = i;
    return l;
  }

  std::size_t dim() const { return support.size() * static_cast<std::size_t>(space.dim); }

  HaarExpansion expansion(std::span<const double> x) const {
    HaarExpansion f(depth, space);
    const int d = space.dim;
    for (std::size_t s = 0; s < support.size(); ++s)
      f.set_coeff_at(support[s], Vec(x.begin() + s * d, x.begin() + (s + 1) * d));
    return f;
  }

  std::vector<double> pack(const HaarExpansion& g) const {
    const int d = space.dim;
    std::vector<double> x(dim());
    for (std::size_t s = 0; s < support.size(); ++s) {
      const Vec& a = g.coeff_at(support[s]);
      for (int j = 0; j < d; ++j) x[s * d + j] = a[j];
    }
    return x;
  }
};

/// Transpose of to_step restricted to the Haar rows: coefficient I picks up
/// sum over cells of u_cell * h_I(cell).
HaarExpansion transpose_synthesis(std::span<const Vec> u, int depth, const SpaceSpec& space) {
  HaarExpansion z(depth, space);
  const int d = space.dim;
  for (int k = 0; k <= depth; ++k) {
    const std::size_t base = (std::size_t{1} << k) - 1;
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << k); ++i) {
      Vec acc(d, 0.0);
      const std::size_t first = i << (depth + 1 - k);
      const std::size_t half = std::size_t{1} << (depth - k);
      for (std::size_t c = first; c < first + 2 * half; ++c) {
        const double sign = c < first + half ? 1.0 : -1.0;
        for (int j = 0; j < d; ++j) acc[j] += sign * u[c][j];
      }
      z.set_coeff_at(base + i, std::move(acc));
    }
  }
  return z;
}

/// Gradient of ||cells||_p with respect to the cell values, scaled so that
/// transpose_synthesis of it gives the coefficient gradient.
std::vector<Vec> norm_cell_gradient(std::span<const Vec> cells, double p, const SpaceSpec& space, double norm_value) {
  const double w = 1.0 / static_cast<double>(cells.size());
  std::vector<Vec> u(cells.size(), Vec(space.dim, 0.0));
  if (norm_value <= 0.0) return u;
  const double outer = std::pow(norm_value, 1.0 - p);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double n = space.norm(cells[c]);
    if (n == 0.0) continue;
    const Vec g = space.norm_gradient(cells[c]);
    const double factor = outer * w * std::pow(n, p - 1.0);
    for (int j = 0; j < space.dim; ++j) u[c][j] = factor * g[j];
  }
  return u;
}

struct RayleighObjective {
  const LinearExpansionOp* op;
  double p;
  CoefficientLayout layout;

  double numerator(std::span<const double> x) const { return lp_norm(op->apply(layout.expansion(x)), p); }
  double denominator(std::span<const double> x) const { return lp_norm(layout.expansion(x), p); }
  double ratio(std::span<const double> x) const {
    const double d = denominator(x);
    return d == 0.0 ? 0.0 : numerator(x) / d;
  }

  std::vector<double> numerator_gradient(std::span<const double> x) const {
    const HaarExpansion f = layout.expansion(x);
    const HaarExpansion g = op->apply(f);
    const auto cells = to_step(g);
    const double value = lp_norm_cells(cells, p, g.space());
    const auto u = norm_cell_gradient(cells, p, g.space(), value);
    const HaarExpansion z = transpose_synthesis(u, g.depth(), g.space());
    return layout.pack(op->apply_transpose(z));
  }

  std::vector<double> denominator_gradient(std::span<const double> x) const {
    const HaarExpansion f = layout.expansion(x);
    const auto cells = to_step(f);
    const double value = lp_norm_cells(cells, p, f.space());
    const auto u = norm_cell_gradient(cells, p, f.space(), value);
    return layout.pack(transpose_synthesis(u, f.depth(), f.space()));
  }
};

double vec_norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Monotone projected-gradient ascent of num/den from one starting point.
/// Returns the best ratio; x is left at the best point, normalized.
double ascend(const RayleighObjective& obj, std::vector<double>& x, int max_iterations, double tol,
              long& iterations) {
  const auto normalize = [&](std::vector<double>& v) {
    const double d = obj.denominator(v);
    if (d == 0.0) return false;
    for (double& c : v) c /= d;
    return true;
  };
  if (!normalize(x)) return 0.0;
  double value = obj.numerator(x);
  double step = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    ++iterations;
    const auto gn = obj.numerator_gradient(x);
    const auto gd = obj.denominator_gradient(x);
    std::vector<double> dir(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dir[i] = gn[i] - value * gd[i];
    const double g2 = vec_norm2(dir);
    if (g2 <= tol * std::max(1.0, value)) break;

    bool improved = false;
    double t = std::max(step * 2.0, 1e-8);
    for (int back = 0; back < 60; ++back) {
      std::vector<double> y = x;
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * dir[i];
      if (normalize(y)) {
        const double fy = obj.numerator(y);
        if (fy > value + 1e-4 * t * g2 * g2) {
          x = std::move(y);
          value = fy;
          step = t;
          improved = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!improved) break;
  }
  return value;
}

}  // namespace

SignPattern::SignPattern(int depth_in, std::vector<double> values_in) : depth(depth_in), values(std::move(values_in)) {
  if (values.size() != interval_count(depth)) throw std::invalid_argument("invalid-depth: sign pattern must cover D_0^N");
  for (double v : values)
    if (!(v >= -1.0 && v <= 1.0)) throw std::invalid_argument("invalid-weights: sign pattern entries must lie in [-1,1]");
}

SignPattern SignPattern::constant(int depth, double value) {
  return SignPattern(depth, std::vector<double>(interval_count(depth), value));
}

RearrangementOp::RearrangementOp(RearrangementMap tau, double p) : tau_(std::move(tau)), p_(p) {
  if (!(p >= 1.0)) throw std::invalid_argument("invalid-exponent: p must be >= 1");
}

HaarExpansion RearrangementOp::apply(const HaarExpansion& f) const {
  require_zero_mean(f, "apply_rearrangement");
  if (f.depth() > tau_.source_depth()) throw std::invalid_argument("invalid-depth: expansion exceeds the map's domain");
  const HaarExpansion src = f.depth() == tau_.source_depth() ? f : f.extended(tau_.source_depth());
  HaarExpansion out(tau_.target_depth(), f.space());
  for (std::size_t i = 0; i < src.coefficient_count(); ++i) {
    const Vec& a = src.coeff_at(i);
    const double weight = std::exp2(static_cast<double>(tau_.gamma_log2(interval_at(i))) / p_);
    Vec b(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) b[j] = weight * a[j];
    out.set_coeff(tau_.apply_at(i), std::move(b));
  }
  return out;
}

HaarExpansion RearrangementOp::apply_transpose(const HaarExpansion& g) const {
  if (g.depth() != tau_.target_depth()) throw std::invalid_argument("invalid-depth: transpose input depth mismatch");
  HaarExpansion out(tau_.source_depth(), g.space());
  for (std::size_t i = 0; i < out.coefficient_count(); ++i) {
    const Vec& z = g.coeff(tau_.apply_at(i));
    const double weight = std::exp2(static_cast<double>(tau_.gamma_log2(interval_at(i))) / p_);
    Vec b(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) b[j] = weight * z[j];
    out.set_coeff_at(i, std::move(b));
  }
  return out;
}

MartingaleTransformOp::MartingaleTransformOp(SignPattern theta) : theta_(std::move(theta)) {}

HaarExpansion MartingaleTransformOp::apply(const HaarExpansion& f) const {
  if (f.depth() > theta_.depth) throw std::invalid_argument("invalid-depth: expansion exceeds the pattern's domain");
  const HaarExpansion src = f.depth() == theta_.depth ? f : f.extended(theta_.depth);
  HaarExpansion out(theta_.depth, f.space());
  out.set_mean(src.mean());
  for (std::size_t i = 0; i < src.coefficient_count(); ++i) {
    Vec b = src.coeff_at(i);
    for (double& c : b) c *= theta_.values[i];
    out.set_coeff_at(i, std::move(b));
  }
  return out;
}

DiagonalOp::DiagonalOp(int depth, std::vector<double> weights) : depth_(depth), weights_(std::move(weights)) {
  if (weights_.size() != interval_count(depth)) throw std::invalid_argument("invalid-weights: diagonal op must cover D_0^N");
}

HaarExpansion DiagonalOp::apply(const HaarExpansion& f) const {
  if (f.depth() > depth_) throw std::invalid_argument("invalid-depth: expansion exceeds the op's domain");
  const HaarExpansion src = f.depth() == depth_ ? f : f.extended(depth_);
  HaarExpansion out(depth_, f.space());
  out.set_mean(src.mean());
  for (std::size_t i = 0; i < src.coefficient_count(); ++i) {
    Vec b = src.coeff_at(i);
    for (double& c : b) c *= weights_[i];
    out.set_coeff_at(i, std::move(b));
  }
  return out;
}

HaarExpansion apply_rearrangement(const RearrangementMap& tau, double p, const HaarExpansion& f) {
  return RearrangementOp(tau, p).apply(f);
}

HaarExpansion apply_martingale_transform(const SignPattern& theta, const HaarExpansion& f) {
  return MartingaleTransformOp(theta).apply(f);
}

NormEstimate operator_norm_search(const LinearExpansionOp& op, double p, const SpaceSpec& X, int depth,
                                  const SearchOptions& opts) {
  if (!(p >= 1.0)) throw std::invalid_argument("invalid-exponent: p must be >= 1");
  if (opts.restarts <= 0) throw std::invalid_argument("invalid-budget: restarts must be positive");
  if (depth > op.source_depth()) throw std::invalid_argument("invalid-depth: search depth exceeds the op's domain");

  RayleighObjective obj{&op, p,
                        opts.support.empty() ? CoefficientLayout::full(depth, X)
                                             : CoefficientLayout{depth, X, opts.support}};
  const std::size_t dim = obj.layout.dim();

  NormEstimate best;
  best.kind = EstimateKind::lower_bound;
  best.restarts = opts.restarts;
  best.seed = opts.seed;
  std::vector<double> best_x;
  long iterations = 0;
  for (int restart = 0; restart < opts.restarts; ++restart) {
    std::mt19937_64 rng(mix_seed(opts.seed, restart));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(dim);
    for (double& c : x) c = gauss(rng);
    const double value = ascend(obj, x, opts.max_iterations, opts.tol, iterations);
    if (value > best.value) {
      best.value = value;
      best_x = x;
    }
  }
  best.iterations = iterations;
  if (!best_x.empty()) {
    best.witness = obj.layout.expansion(best_x);
    // The reported value is the witness ratio, recomputed from scratch.
    best.value = lp_norm(op.apply(best.witness), p) / lp_norm(best.witness, p);
  }
  return best;
}

NormEstimate operator_norm_exact_small(const LinearExpansionOp& op, double p, const SpaceSpec& X, int depth,
                                       const SearchOptions& opts) {
  if (p == 2.0 && X.is_scalar() && op.target_space(X).is_scalar()) {
    const std::size_t m = interval_count(depth);
    if (m > 4096) throw std::invalid_argument("too-large: exact norm needs interval_count(depth) <= 4096");
    const std::size_t mo = interval_count(op.target_depth());

    // Matrix in the orthonormal bases {h_I/|I|^{1/2}}: column i holds the
    // images' normalized coefficients.
    std::vector<std::vector<double>> col(m);
    for (std::size_t i = 0; i < m; ++i) {
      HaarExpansion e(depth, SpaceSpec::scalar());
      e.set_coeff_at(i, {std::exp2(0.5 * interval_at(i).level)});  // |I|^{-1/2}
      const HaarExpansion g = op.apply(e);
      col[i].resize(mo);
      for (std::size_t j = 0; j < mo; ++j) col[i][j] = g.coeff_at(j)[0] * std::exp2(-0.5 * interval_at(j).level);
    }
    const auto apply_mat = [&](std::span<const double> v, std::vector<double>& out) {
      out.assign(mo, 0.0);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < mo; ++j) out[j] += col[i][j] * v[i];
    };
    const auto apply_mat_t = [&](std::span<const double> w, std::vector<double>& out) {
      out.assign(m, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < mo; ++j) s += col[i][j] * w[j];
        out[i] = s;
      }
    };

    NormEstimate best;
    best.kind = EstimateKind::exact;
    best.seed = opts.seed;
    std::vector<double> best_v;
    for (int restart = 0; restart < 3; ++restart) {
      std::mt19937_64 rng(mix_seed(opts.seed, 977 + restart));
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<double> v(m), w, back;
      for (double& c : v) c = gauss(rng);
      double sigma = 0.0;
      for (long it = 0; it < 20000; ++it) {
        ++best.iterations;
        const double nv = vec_norm2(v);
        if (nv == 0.0) break;
        for (double& c : v) c /= nv;
        apply_mat(v, w);
        const double s = vec_norm2(w);
        apply_mat_t(w, back);
        v = back;
        if (std::abs(s - sigma) <= 1e-14 * std::max(1.0, s)) {
          sigma = s;
          break;
        }
        sigma = s;
      }
      if (sigma > best.value) {
        best.value = sigma;
        best_v = v;
      }
    }
    if (!best_v.empty()) {
      const double nv = vec_norm2(best_v);
      HaarExpansion witness(depth, SpaceSpec::scalar());
      for (std::size_t i = 0; i < m; ++i)
        witness.set_coeff_at(i, {best_v[i] / nv * std::exp2(0.5 * interval_at(i).level)});
      best.witness = witness;
    }
    return best;
  }

  SearchOptions fine = opts;
  fine.restarts = std::max(opts.restarts, 96);
  fine.max_iterations = std::max(opts.max_iterations, 600);
  fine.tol = std::min(opts.tol, 1e-12);
  return operator_norm_search(op, p, X, depth, fine);
}

NormEstimate operator_norm_sign_scan(const LinearExpansionOp& op, double p, int depth) {
  const std::size_t m = interval_count(depth);
  if (m > 12) throw std::invalid_argument("too-large: sign scan needs interval_count(depth) <= 12");
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= 3;

  NormEstimate best;
  best.kind = EstimateKind::lower_bound;
  HaarExpansion f(depth, SpaceSpec::scalar());
  for (std::size_t code = 1; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < m; ++i) {
      f.set_coeff_at(i, {static_cast<double>(static_cast<int>(c % 3) - 1)});
      c /= 3;
    }
    const double den = lp_norm(f, p);
    if (den == 0.0) continue;
    const double value = lp_norm(op.apply(f), p) / den;
    if (value > best.value) {
      best.value = value;
      best.witness = f;
    }
  }
  best.iterations = static_cast<long>(total);
  return best;
}

UmdEstimate umd_constant(const SpaceSpec& X, double p, int depth, bool exact_mode, const UmdOptions& opts) {
  const std::size_t m = interval_count(depth);

  if (p == 2.0 && X.is_scalar()) {
    // Every +-1 transform is an isometry in the orthonormal Haar basis.
    UmdEstimate out;
    out.theta = SignPattern::constant(depth, 1.0);
    out.norm.value = 1.0;
    out.norm.kind = EstimateKind::exact;
    out.norm.seed = opts.search.seed;
    out.norm.witness = haar_function({0, 0}, depth);
    return out;
  }

  const auto evaluate = [&](const SignPattern& theta, std::uint64_t stream) {
    MartingaleTransformOp op(theta);
    SearchOptions so = opts.search;
    so.seed = mix_seed(opts.search.seed, stream);
    NormEstimate est = operator_norm_search(op, p, X, depth, so);
    if (X.is_scalar() && m <= 12) {
      NormEstimate scan = operator_norm_sign_scan(op, p, depth);
      if (scan.value > est.value) {
        scan.seed = so.seed;
        est = scan;
      }
    }
    return est;
  };

  UmdEstimate best;
  best.norm.kind = EstimateKind::lower_bound;
  best.norm.seed = opts.search.seed;
  if (exact_mode) {
    if (m > opts.exact_cap) throw std::invalid_argument("too-large: exact UMD mode exceeds the sign-pattern cap");
    // theta and -theta give the same norm, so fix the first sign.
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (m - 1)); ++bits) {
      std::vector<double> theta(m, 1.0);
      for (std::size_t i = 0; i + 1 < m; ++i)
        if ((bits >> i) & 1) theta[i + 1] = -1.0;
      SignPattern pattern(depth, std::move(theta));
      const NormEstimate est = evaluate(pattern, bits);
      if (est.value > best.norm.value) {
        best.norm = est;
        best.theta = pattern;
      }
    }
  } else {
    for (int s = 0; s < opts.pattern_samples; ++s) {
      std::mt19937_64 rng(mix_seed(opts.search.seed, 7777 + s));
      std::vector<double> theta(m);
      for (double& t : theta) t = (rng() & 1) ? 1.0 : -1.0;
      if (s == 0) std::fill(theta.begin(), theta.end(), 1.0);  // guarantees >= 1
      SignPattern pattern(depth, std::move(theta));
      const NormEstimate est = evaluate(pattern, 7777 + s);
      if (est.value > best.norm.value) {
        best.norm = est;
        best.theta = pattern;
      }
    }
  }
  return best;
}

double rademacher_average(std::span<const Vec> a, const SpaceSpec& X, double p) {
  const std::size_t n = a.size();
  if (n > 20) throw std::invalid_argument("too-large: exact Rademacher enumeration needs n <= 20");
  const int d = X.dim;
  double acc = 0.0;
  Vec s(d);
  for (std::uint64_t eps = 0; eps < (std::uint64_t{1} << n); ++eps) {
    std::fill(s.begin(), s.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double sign = (eps >> k) & 1 ? -1.0 : 1.0;
      for (int j = 0; j < d; ++j) s[j] += sign * a[k][j];
    }
    acc += std::pow(X.norm(s), p);
  }
  return std::pow(acc / static_cast<double>(std::uint64_t{1} << n), 1.0 / p);
}

double rademacher_average_sampled(std::span<const Vec> a, const SpaceSpec& X, double p, int samples,
                                  std::uint64_t seed) {
  if (samples <= 0) throw std::invalid_argument("invalid-budget: samples must be positive");
  const int d = X.dim;
  std::mt19937_64 rng(seed);
  double acc = 0.0;
  Vec s(d);
  for (int t = 0; t < samples; ++t) {
    std::fill(s.begin(), s.end(), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double sign = (rng() & 1) ? -1.0 : 1.0;
      for (int j = 0; j < d; ++j) s[j] += sign * a[k][j];
    }
    acc += std::pow(X.norm(s), p);
  }
  return std::pow(acc / samples, 1.0 / p);
}

NormEstimate type_constant(const SpaceSpec& X, double p, int n, bool exact_mode, const TypeOptions& opts) {
  if (n < 1) throw std::invalid_argument("invalid-budget: need n >= 1 vectors");
  if (exact_mode && n > 12) throw std::invalid_argument("too-large: exact type mode needs n <= 12");
  const double q = opts.q > 0.0 ? opts.q : p;
  const int d = X.dim;
  const std::size_t dim = static_cast<std::size_t>(n) * d;

  const auto unpack = [&](std::span<const double> x) {
    std::vector<Vec> a(n, Vec(d));
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < d; ++j) a[k][j] = x[static_cast<std::size_t>(k) * d + j];
    return a;
  };
  const auto numerator = [&](std::span<const double> x) {
    const auto a = unpack(x);
    return exact_mode ? rademacher_average(a, X, p)
                      : rademacher_average_sampled(a, X, p, opts.sign_samples, mix_seed(opts.seed, 31));
  };
  const auto denominator = [&](std::span<const double> x) {
    const auto a = unpack(x);
    double s = 0.0;
    for (const Vec& v : a) s += std::pow(X.norm(v), q);
    return std::pow(s, 1.0 / q);
  };

  NormEstimate best;
  best.kind = EstimateKind::lower_bound;
  best.restarts = opts.restarts;
  best.seed = opts.seed;
  std::vector<double> best_x;

  // Central-difference ascent of the ratio on the denominator sphere.
  const auto ratio = [&](std::span<const double> x) {
    const double den = denominator(x);
    return den == 0.0 ? 0.0 : numerator(x) / den;
  };
  for (int restart = -1; restart < opts.restarts; ++restart) {
    std::vector<double> x(dim, 0.0);
    if (restart < 0) {
      // Structured start: the standard-basis tuple a_k = e_{k mod d}.
      for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k) * d + (k % d)] = 1.0;
    } else {
      std::mt19937_64 rng(mix_seed(opts.seed, restart));
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (double& c : x) c = gauss(rng);
    }
    double value = ratio(x);
    double step = 0.5;
    for (int it = 0; it < opts.max_iterations; ++it) {
      ++best.iterations;
      std::vector<double> grad(dim);
      const double h = 1e-6;
      for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
        xp[i] += h;
        xm[i] -= h;
        grad[i] = (ratio(xp) - ratio(xm)) / (2 * h);
      }
      const double g2 = vec_norm2(grad);
      if (g2 < 1e-10 * std::max(1.0, value)) break;
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
    if (value > best.value) {
      best.value = value;
      best_x = x;
    }
  }
  if (!best_x.empty()) {
    const double den = denominator(best_x);
    for (double& c : best_x) c /= den;
    best.witness_vectors = unpack(best_x);
    best.value = ratio(best_x);
  }
  return best;
}

double gradient_check_max_error(const LinearExpansionOp& op, double p, const SpaceSpec& X, int depth, int points,
                                std::uint64_t seed, double fd_step) {
  RayleighObjective obj{&op, p, CoefficientLayout::full(depth, X)};
  const std::size_t dim = obj.layout.dim();
  double worst = 0.0;
  for (int t = 0; t < points; ++t) {
    std::mt19937_64 rng(mix_seed(seed, t));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(dim);
    for (double& c : x) c = gauss(rng);
    const auto grad = obj.numerator_gradient(x);
    double err2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
      xp[i] += fd_step;
      xm[i] -= fd_step;
      const double fd = (obj.numerator(xp) - obj.numerator(xm)) / (2 * fd_step);
      err2 += (fd - grad[i]) * (fd - grad[i]);
      ref2 += fd * fd;
    }
    if (ref2 > 0.0) worst = std::max(worst, std::sqrt(err2 / ref2));
  }
  return worst;
}

BlockWitnessRow block_witness_ratio(int n, const SpaceSpec& X, double q) {
  if (n < 1) throw std::invalid_argument("invalid-budget: block witness needs n >= 1");
  if (X.dim < n) throw std::invalid_argument("invalid-map: block witness needs dim(X) >= n");
  const int block_level = std::bit_width(static_cast<unsigned>(n));  // 2^m >= n+1
  const int depth = block_level + n;
  std::vector<DyadicInterval> blocks;
  for (int j = 0; j <= n; ++j) blocks.emplace_back(block_level, static_cast<std::uint64_t>(j));
  const RearrangementMap tau = build_block_perm(blocks, depth);

  HaarExpansion f(depth, X);
  for (int k = 1; k <= n; ++k) {
    Vec ek(X.dim, 0.0);
    ek[k - 1] = 1.0;
    const int level = block_level + k;
    const std::uint64_t first = blocks[k].index << k;
    for (std::uint64_t i = first; i < first + (std::uint64_t{1} << k); ++i)
      f.set_coeff(DyadicInterval(level, i), ek);
  }

  BlockWitnessRow row;
  row.n = n;
  row.witness = f;
  row.lower_bound = lp_norm(apply_rearrangement(tau, q, f), q) / lp_norm(f, q);
  row.witness_ratio = std::pow(static_cast<double>(n), 1.0 / X.r - 1.0 / q);
  return row;
}

}  // namespace dyadlab
