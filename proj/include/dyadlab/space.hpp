#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dyadlab/dyadic.hpp"

namespace dyadlab {

/// Element of the coefficient space X.
using Vec = std::vector<double>;

/// The coefficient space X: the sequence space l_r^d. Scalars are d = 1
/// (the exponent is then irrelevant). r may be infinity (max norm).
struct SpaceSpec {
  double r = 2.0;
  int dim = 1;

  static SpaceSpec scalar() { return {2.0, 1}; }
  static SpaceSpec lr(double r, int d);

  bool is_scalar() const { return dim == 1; }

  double norm(std::span<const double> v) const;

  /// d(norm)/dv at v, defined a.e.; zero vector maps to zero.
  Vec norm_gradient(std::span<const double> v) const;

  friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;
};

/// Mean value plus Haar coefficients a_I in X for I in D_0^N. The dual view
/// is a step function on the 2^{N+1} cells of resolution 2^{-(N+1)}.
/// Coefficients are stored heap-indexed (see heap_index); absent = zero.
class HaarExpansion {
 public:
  HaarExpansion() = default;
  HaarExpansion(int depth, SpaceSpec space);

  int depth() const { return depth_; }
  const SpaceSpec& space() const { return space_; }
  std::size_t coefficient_count() const { return coeffs_.size(); }

  const Vec& mean() const { return mean_; }
  void set_mean(Vec m);
  bool zero_mean() const;

  const Vec& coeff(const DyadicInterval& I) const { return coeffs_[heap_index(I)]; }
  const Vec& coeff_at(std::size_t heap_pos) const { return coeffs_[heap_pos]; }
  void set_coeff(const DyadicInterval& I, Vec a);
  void set_coeff_at(std::size_t heap_pos, Vec a);

  /// Raw coefficient storage, heap-indexed; used by the norm searches.
  std::span<const Vec> coeffs() const { return coeffs_; }

  /// Same coefficients viewed at a deeper truncation (zero padding).
  HaarExpansion extended(int new_depth) const;

  friend bool operator==(const HaarExpansion&, const HaarExpansion&) = default;

 private:
  int depth_ = 0;
  SpaceSpec space_ = SpaceSpec::scalar();
  Vec mean_;
  std::vector<Vec> coeffs_;
};

/// Number of grid cells of a depth-N expansion: 2^{N+1}.
inline std::size_t cell_count(int depth) { return std::size_t{1} << (depth + 1); }

/// Step-function view: value on each cell of resolution 2^{-(N+1)}.
std::vector<Vec> to_step(const HaarExpansion& f);

/// Haar analysis of a step function with 2^{depth+1} cells (exact up to
/// rounding; inverse of to_step).
HaarExpansion from_step(std::span<const Vec> cells, const SpaceSpec& space);

/// The L_infinity-normalized Haar function of I as a depth-`depth` scalar
/// expansion: +1 on the left half of I, -1 on the right half, 0 outside.
/// `left_positive = false` flips the sign convention.
HaarExpansion haar_function(const DyadicInterval& I, int depth, bool left_positive = true);

/// ||f||_{L^p_X} by exact quadrature over the grid cells. Requires p >= 1.
double lp_norm(const HaarExpansion& f, double p);
double lp_norm_cells(std::span<const Vec> cells, double p, const SpaceSpec& space);

/// E(f|F_n) as step values: cellwise average over the level-n intervals,
/// 0 <= n <= depth+1.
std::vector<Vec> martingale_projection(const HaarExpansion& f, int n);

/// H^1 norm: integral of the martingale maximal function
/// max_{n=0..N+1} ||E(f|F_n)(t)||_X. Requires mean(f) = 0.
double h1_norm(const HaarExpansion& f);

/// Stopping time on the grid: one value in {0,...,N+1} or infinity per cell.
/// Adapted: {nu <= n} must be a union of level-n intervals for every n.
struct StoppingTimeGrid {
  static constexpr int kInfinity = std::numeric_limits<int>::max();

  int depth = 0;
  std::vector<int> values;  // one per grid cell

  StoppingTimeGrid() = default;
  StoppingTimeGrid(int depth, std::vector<int> values);

  bool adapted() const;
};

struct Atom {
  HaarExpansion expansion;
  StoppingTimeGrid nu;
};

struct AtomCheck {
  bool ok = true;
  std::string violated;  // "a" or "b" (empty when ok)
  int n = -1;            // offending projection level for clause (a)
  std::size_t cell = 0;  // offending grid cell for clause (a)
};

/// Checks Definition-style atom clauses on the grid:
///  (a) E(a|F_n) = 0 on {n <= nu} for every n = 0..N+1,
///  (b) ||a||_{L^inf_X} * |{nu < inf}| <= 1.
/// Reports the first violation; never throws.
AtomCheck validate_atom(const Atom& atom, double tol = 1e-12);

/// Verifies sum_k mu_k a^k = f on the grid and returns sum_k |mu_k|, an
/// upper bound for the atomic H^1 norm. Throws if an atom fails
/// validate_atom or the decomposition does not reproduce f.
double h1at_upper_bound(const HaarExpansion& f, const std::vector<std::pair<double, Atom>>& decomposition);

}  // namespace dyadlab
