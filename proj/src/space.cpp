#include "dyadlab/space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyadlab {

namespace {

constexpr int kMaxDepth = 24;

void require_dim(const Vec& v, int dim, const char* what) {
  if (static_cast<int>(v.size()) != dim) throw std::invalid_argument(std::string("invalid-map: ") + what + " has wrong dimension");
}

}  // namespace

SpaceSpec SpaceSpec::lr(double r, int d) {
  if (!(r >= 1.0)) throw std::invalid_argument("invalid-exponent: space exponent r must be >= 1");
  if (d < 1) throw std::invalid_argument("invalid-exponent: space dimension must be >= 1");
  return {r, d};
}

double SpaceSpec::norm(std::span<const double> v) const {
  if (dim == 1) return std::abs(v[0]);
  if (std::isinf(r)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (r == 1.0) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  }
  if (r == 2.0) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), r);
  return std::pow(s, 1.0 / r);
}

Vec SpaceSpec::norm_gradient(std::span<const double> v) const {
  Vec g(v.size(), 0.0);
  if (dim == 1) {
    g[0] = v[0] > 0 ? 1.0 : (v[0] < 0 ? -1.0 : 0.0);
    return g;
  }
  if (std::isinf(r)) {
    std::size_t arg = 0;
    double m = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (std::abs(v[j]) > m) {
        m = std::abs(v[j]);
        arg = j;
      }
    }
    if (m > 0) g[arg] = v[arg] > 0 ? 1.0 : -1.0;
    return g;
  }
  const double n = norm(v);
  if (n == 0.0) return g;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] == 0.0) continue;
    const double mag = r == 1.0 ? 1.0 : std::pow(std::abs(v[j]) / n, r - 1.0);
    g[j] = v[j] > 0 ? mag : -mag;
  }
  return g;
}

HaarExpansion::HaarExpansion(int depth, SpaceSpec space) : depth_(depth), space_(space) {
  if (depth < 0 || depth > kMaxDepth) throw std::invalid_argument("invalid-depth: expansion depth out of range");
  mean_.assign(space_.dim, 0.0);
  coeffs_.assign(interval_count(depth), Vec(space_.dim, 0.0));
}

void HaarExpansion::set_mean(Vec m) {
  require_dim(m, space_.dim, "mean");
  mean_ = std::move(m);
}

bool HaarExpansion::zero_mean() const {
  return std::all_of(mean_.begin(), mean_.end(), [](double x) { return x == 0.0; });
}

void HaarExpansion::set_coeff(const DyadicInterval& I, Vec a) {
  if (I.level > depth_) throw std::invalid_argument("invalid-depth: coefficient level exceeds expansion depth");
  set_coeff_at(heap_index(I), std::move(a));
}

void HaarExpansion::set_coeff_at(std::size_t heap_pos, Vec a) {
  require_dim(a, space_.dim, "coefficient");
  coeffs_[heap_pos] = std::move(a);
}

HaarExpansion HaarExpansion::extended(int new_depth) const {
  if (new_depth < depth_) throw std::invalid_argument("invalid-depth: extension must not truncate");
  HaarExpansion out(new_depth, space_);
  out.set_mean(mean_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out.coeffs_[i] = coeffs_[i];
  return out;
}

std::vector<Vec> to_step(const HaarExpansion& f) {
  const int N = f.depth();
  const std::size_t cells = cell_count(N);
  std::vector<Vec> out(cells, f.mean());
  const int d = f.space().dim;
  for (std::size_t c = 0; c < cells; ++c) {
    Vec& v = out[c];
    for (int k = 0; k <= N; ++k) {
      // Interval of level k containing the cell; +1 on its left half.
      const std::uint64_t idx = c >> (N + 1 - k);
      const double sign = ((c >> (N - k)) & 1) == 0 ? 1.0 : -1.0;
      const Vec& a = f.coeff_at((std::size_t{1} << k) - 1 + idx);
      for (int j = 0; j < d; ++j) v[j] += sign * a[j];
    }
  }
  return out;
}

HaarExpansion from_step(std::span<const Vec> cells, const SpaceSpec& space) {
  const std::size_t n = cells.size();
  if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("invalid-depth: cell count must be a power of two >= 2");
  int depth = -1;
  for (std::size_t m = n; m > 1; m >>= 1) ++depth;

  HaarExpansion out(depth, space);
  const int d = space.dim;
  std::vector<Vec> avg(cells.begin(), cells.end());
  for (int k = depth; k >= 0; --k) {
    std::vector<Vec> up(std::size_t{1} << k, Vec(d, 0.0));
    for (std::size_t i = 0; i < up.size(); ++i) {
      Vec a(d, 0.0);
      for (int j = 0; j < d; ++j) {
        up[i][j] = 0.5 * (avg[2 * i][j] + avg[2 * i + 1][j]);
        a[j] = 0.5 * (avg[2 * i][j] - avg[2 * i + 1][j]);
      }
      out.set_coeff_at((std::size_t{1} << k) - 1 + i, std::move(a));
    }
    avg = std::move(up);
  }
  out.set_mean(avg[0]);
  return out;
}

HaarExpansion haar_function(const DyadicInterval& I, int depth, bool left_positive) {
  if (I.level > depth) throw std::invalid_argument("invalid-depth: haar_function level exceeds depth");
  HaarExpansion out(depth, SpaceSpec::scalar());
  out.set_coeff(I, {left_positive ? 1.0 : -1.0});
  return out;
}

double lp_norm_cells(std::span<const Vec> cells, double p, const SpaceSpec& space) {
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("invalid-exponent: p must be finite and >= 1");
  const double w = 1.0 / static_cast<double>(cells.size());
  double s = 0.0;
  for (const Vec& v : cells) s += w * std::pow(space.norm(v), p);
  return std::pow(s, 1.0 / p);
}

double lp_norm(const HaarExpansion& f, double p) {
  const auto cells = to_step(f);
  return lp_norm_cells(cells, p, f.space());
}

std::vector<Vec> martingale_projection(const HaarExpansion& f, int n) {
  const int N = f.depth();
  if (n < 0 || n > N + 1) throw std::invalid_argument("invalid-depth: projection level must be in [0, depth+1]");
  auto cells = to_step(f);
  if (n == N + 1) return cells;
  const std::size_t block = std::size_t{1} << (N + 1 - n);
  const int d = f.space().dim;
  for (std::size_t start = 0; start < cells.size(); start += block) {
    Vec avg(d, 0.0);
    for (std::size_t c = start; c < start + block; ++c)
      for (int j = 0; j < d; ++j) avg[j] += cells[c][j];
    for (int j = 0; j < d; ++j) avg[j] /= static_cast<double>(block);
    for (std::size_t c = start; c < start + block; ++c) cells[c] = avg;
  }
  return cells;
}

double h1_norm(const HaarExpansion& f) {
  if (!f.zero_mean()) throw std::invalid_argument("not-zero-mean: h1_norm requires mean(f) = 0");
  const int N = f.depth();
  const std::size_t cells = cell_count(N);
  std::vector<double> maximal(cells, 0.0);
  for (int n = 0; n <= N + 1; ++n) {
    const auto proj = martingale_projection(f, n);
    for (std::size_t c = 0; c < cells; ++c) maximal[c] = std::max(maximal[c], f.space().norm(proj[c]));
  }
  double s = 0.0;
  for (double m : maximal) s += m;
  return s / static_cast<double>(cells);
}

StoppingTimeGrid::StoppingTimeGrid(int depth_in, std::vector<int> values_in) : depth(depth_in), values(std::move(values_in)) {
  if (values.size() != cell_count(depth)) throw std::invalid_argument("invalid-depth: stopping time cell count mismatch");
  for (int v : values)
    if (v != kInfinity && (v < 0 || v > depth + 1)) throw std::invalid_argument("invalid-sequence: stopping time value out of range");
  if (!adapted()) throw std::invalid_argument("invalid-sequence: stopping time is not adapted");
}

bool StoppingTimeGrid::adapted() const {
  // {nu <= n} must be constant on every level-n interval.
  for (int n = 0; n <= depth + 1; ++n) {
    const std::size_t block = std::size_t{1} << (depth + 1 - n);
    for (std::size_t start = 0; start < values.size(); start += block) {
      const bool first = values[start] <= n;
      for (std::size_t c = start + 1; c < start + block; ++c)
        if ((values[c] <= n) != first) return false;
    }
  }
  return true;
}

AtomCheck validate_atom(const Atom& atom, double tol) {
  const HaarExpansion& a = atom.expansion;
  const int N = a.depth();
  if (atom.nu.depth != N) throw std::invalid_argument("invalid-depth: stopping time depth mismatch");
  const std::size_t cells = cell_count(N);

  for (int n = 0; n <= N + 1; ++n) {
    const auto proj = martingale_projection(a, n);
    for (std::size_t c = 0; c < cells; ++c) {
      if (n <= atom.nu.values[c] && a.space().norm(proj[c]) > tol) {
        return {false, "a", n, c};
      }
    }
  }

  const auto step = to_step(a);
  double sup = 0.0;
  std::size_t finite_cells = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    sup = std::max(sup, a.space().norm(step[c]));
    if (atom.nu.values[c] != StoppingTimeGrid::kInfinity) ++finite_cells;
  }
  const double prob = static_cast<double>(finite_cells) / static_cast<double>(cells);
  if (sup * prob > 1.0 + tol) return {false, "b", -1, 0};
  return {};
}

double h1at_upper_bound(const HaarExpansion& f, const std::vector<std::pair<double, Atom>>& decomposition) {
  const int N = f.depth();
  const int d = f.space().dim;
  const std::size_t cells = cell_count(N);
  std::vector<Vec> sum(cells, Vec(d, 0.0));
  double total = 0.0;
  double scale = 1.0;
  for (const auto& [mu, atom] : decomposition) {
    const auto check = validate_atom(atom);
    if (!check.ok) throw std::invalid_argument("invalid-atom: decomposition atom violates clause (" + check.violated + ")");
    if (atom.expansion.depth() != N) throw std::invalid_argument("invalid-depth: atom depth mismatch");
    const auto step = to_step(atom.expansion);
    for (std::size_t c = 0; c < cells; ++c) {
      for (int j = 0; j < d; ++j) sum[c][j] += mu * step[c][j];
      scale = std::max(scale, std::abs(mu) * f.space().norm(step[c]));
    }
    total += std::abs(mu);
  }
  const auto target = to_step(f);
  for (std::size_t c = 0; c < cells; ++c)
    for (int j = 0; j < d; ++j)
      if (std::abs(sum[c][j] - target[c][j]) > 1e-9 * scale)
        throw std::invalid_argument("mismatch: decomposition does not reproduce f on the grid");
  return total;
}

}  // namespace dyadlab
