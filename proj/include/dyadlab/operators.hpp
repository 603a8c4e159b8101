#pragma once

#include <cstdint>
#include <vector>

#include "dyadlab/rearrangement.hpp"
#include "dyadlab/space.hpp"

namespace dyadlab {

enum class EstimateKind { exact, lower_bound, upper_bound };

/// A numeric estimate tagged with its certification status and the search
/// metadata needed to reproduce it. Lower bounds always carry a witness
/// whose recomputed Rayleigh ratio equals `value` (to rounding).
struct NormEstimate {
  double value = 0.0;
  EstimateKind kind = EstimateKind::lower_bound;
  int restarts = 0;
  long iterations = 0;
  std::uint64_t seed = 0;
  HaarExpansion witness;              // expansion witness (norm searches)
  std::vector<Vec> witness_vectors;   // vector-tuple witness (type constant)
};

/// Haar multiplier pattern theta_I, heap-indexed over D_0^depth.
struct SignPattern {
  int depth = 0;
  std::vector<double> values;

  SignPattern() = default;
  SignPattern(int depth, std::vector<double> values);

  static SignPattern constant(int depth, double value);
};

/// Linear map acting coefficientwise on Haar expansions. apply_transpose is
/// the transpose with respect to the raw coefficient dot product; the norm
/// searches use it for analytic gradients.
class LinearExpansionOp {
 public:
  virtual ~LinearExpansionOp() = default;
  virtual int source_depth() const = 0;
  virtual int target_depth() const = 0;
  virtual SpaceSpec target_space(const SpaceSpec& source) const { return source; }
  virtual HaarExpansion apply(const HaarExpansion& f) const = 0;
  virtual HaarExpansion apply_transpose(const HaarExpansion& g) const = 0;
};

/// Id_X (x) T_{p,tau}: coefficient at tau(I) is a_I * gamma_I^{1/p}. For a
/// measure-preserving tau the weight is 1 and the p-dependence disappears.
class RearrangementOp final : public LinearExpansionOp {
 public:
  RearrangementOp(RearrangementMap tau, double p);

  int source_depth() const override { return tau_.source_depth(); }
  int target_depth() const override { return tau_.target_depth(); }
  HaarExpansion apply(const HaarExpansion& f) const override;
  HaarExpansion apply_transpose(const HaarExpansion& g) const override;

  const RearrangementMap& map() const { return tau_; }
  double exponent() const { return p_; }

 private:
  RearrangementMap tau_;
  double p_;
};

/// Martingale transform f -> sum theta_I a_I h_I; the mean is untouched.
class MartingaleTransformOp final : public LinearExpansionOp {
 public:
  explicit MartingaleTransformOp(SignPattern theta);

  int source_depth() const override { return theta_.depth; }
  int target_depth() const override { return theta_.depth; }
  HaarExpansion apply(const HaarExpansion& f) const override;
  HaarExpansion apply_transpose(const HaarExpansion& g) const override { return apply(g); }

 private:
  SignPattern theta_;
};

class IdentityOp final : public LinearExpansionOp {
 public:
  explicit IdentityOp(int depth) : depth_(depth) {}
  int source_depth() const override { return depth_; }
  int target_depth() const override { return depth_; }
  HaarExpansion apply(const HaarExpansion& f) const override { return f; }
  HaarExpansion apply_transpose(const HaarExpansion& g) const override { return g; }

 private:
  int depth_;
};

/// Diagonal coefficient multiplier (used for the weighted-norm factors
/// beta_i of condition C).
class DiagonalOp final : public LinearExpansionOp {
 public:
  DiagonalOp(int depth, std::vector<double> weights);
  int source_depth() const override { return depth_; }
  int target_depth() const override { return depth_; }
  HaarExpansion apply(const HaarExpansion& f) const override;
  HaarExpansion apply_transpose(const HaarExpansion& g) const override { return apply(g); }

 private:
  int depth_;
  std::vector<double> weights_;
};

HaarExpansion apply_rearrangement(const RearrangementMap& tau, double p, const HaarExpansion& f);
HaarExpansion apply_martingale_transform(const SignPattern& theta, const HaarExpansion& f);

struct SearchOptions {
  int restarts = 64;
  int max_iterations = 300;
  double tol = 1e-11;
  std::uint64_t seed = 1;
  std::vector<std::size_t> support;  // heap indices to optimize over; empty = all
};

/// Lower bound for ||op||_{L^p -> L^p} over depth-`depth` zero-mean
/// expansions with coefficients in X: projected gradient ascent on the
/// coefficient sphere, random restarts, Armijo backtracking. The returned
/// value is recomputed from the witness.
NormEstimate operator_norm_search(const LinearExpansionOp& op, double p, const SpaceSpec& X, int depth,
                                  const SearchOptions& opts = {});

/// Exact operator norm for p = 2 and scalar X (largest singular value of the
/// matrix in the orthonormal basis {h_I/|I|^{1/2}}, by power iteration with
/// tolerance 1e-14). For other (p, X) falls back to a dense multi-start
/// search and reports a lower bound.
NormEstimate operator_norm_exact_small(const LinearExpansionOp& op, double p, const SpaceSpec& X, int depth,
                                       const SearchOptions& opts = {});

/// Best Rayleigh ratio over scalar coefficient vectors with entries in
/// {-1, 0, +1}: a cheap exhaustive lower bound used to cross-check the
/// searches at tiny depth. Requires scalar X and interval_count(depth) <= 12.
NormEstimate operator_norm_sign_scan(const LinearExpansionOp& op, double p, int depth);

struct UmdEstimate {
  NormEstimate norm;
  SignPattern theta;  // transform attaining the reported value
};

struct UmdOptions {
  std::size_t exact_cap = 7;  // max |D_0^N| for full sign-pattern enumeration
  int pattern_samples = 64;   // random mode
  SearchOptions search;
};

/// Depth-N truncated UMD_p constant: sup over theta in {-1,+1}^{D_0^N} of
/// the transform norm (extreme points suffice). Exact mode enumerates all
/// patterns; random mode samples them and reports a lower bound.
UmdEstimate umd_constant(const SpaceSpec& X, double p, int depth, bool exact_mode, const UmdOptions& opts = {});

/// Exact Rademacher average (E ||sum_k eps_k a_k||^p)^{1/p} over all 2^n
/// sign vectors (n <= 20), or a sampled average.
double rademacher_average(std::span<const Vec> a, const SpaceSpec& X, double p);
double rademacher_average_sampled(std::span<const Vec> a, const SpaceSpec& X, double p, int samples,
                                  std::uint64_t seed);

struct TypeOptions {
  int restarts = 32;
  int max_iterations = 200;
  std::uint64_t seed = 1;
  int sign_samples = 4096;  // sampled mode
  double q = 0.0;           // normalization exponent; 0 means q = p
};

/// Lower bound of the type-p constant of X restricted to n vectors:
/// maximizes ||sum r_k a_k||_{L^p_X} / (sum ||a_k||^q)^{1/q} by multi-start
/// ascent. Exact Rademacher enumeration for n <= 12, sampled beyond.
NormEstimate type_constant(const SpaceSpec& X, double p, int n, bool exact_mode, const TypeOptions& opts = {});

/// Largest relative error between the analytic gradient of the norm
/// objective ||op f||_p and central finite differences, over random points.
double gradient_check_max_error(const LinearExpansionOp& op, double p, const SpaceSpec& X, int depth, int points,
                                std::uint64_t seed, double fd_step = 1e-6);

struct BlockWitnessRow {
  int n = 0;
  double lower_bound = 0.0;    // Rayleigh ratio of the witness, from the grid
  double witness_ratio = 0.0;  // closed form n^{1/r - 1/q}
  HaarExpansion witness;
};

/// The divergence witness for the glued block permutation: coefficients
/// a_k = e_k on the k-th block family, evaluated in L^q_{l_r^d}. The grid
/// computation must reproduce n^{1/r - 1/q}.
BlockWitnessRow block_witness_ratio(int n, const SpaceSpec& X, double q);

}  // namespace dyadlab
