#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dyadlab/operators.hpp"
#include "dyadlab/rearrangement.hpp"
#include "dyadlab/space.hpp"

namespace dyadlab {

/// Levels Z_0 <= Z_1 <= ... <= Z_n, Z_k nonnegative and constant on the
/// intervals of D_k (levels[k] holds the 2^k values).
struct AdaptedSequence {
  std::vector<std::vector<double>> levels;

  AdaptedSequence() = default;
  explicit AdaptedSequence(std::vector<std::vector<double>> levels);

  int depth() const { return static_cast<int>(levels.size()) - 1; }
};

/// P_{k,tau}(gamma) = sum over I in D_k of gamma(I) * indicator(tau(I)),
/// evaluated on the grid of resolution 2^-grid_level (defaults to the
/// smallest grid resolving all targets).
std::vector<double> p_shift(const RearrangementMap& tau, int level, std::span<const double> weights,
                            int grid_level = -1);

/// Same, with gamma supplied as step values that must be constant on the
/// level-`level` intervals.
std::vector<double> p_shift_step(const RearrangementMap& tau, int level, std::span<const double> cells,
                                 int grid_level = -1);

struct MaximalReport {
  double lhs = 0.0;  // integral of sup_k P_{k,tau}(Z_k)
  double rhs = 0.0;  // integral of Z_n
  double kappa = 0.0;
  bool pass = false;
};

/// Checks the maximal inequality: integral of sup_k P_{k,tau}(Z_k) is at
/// most kappa times the integral of Z_n (additive tolerance 1e-12). The
/// caller certifies that kappa is a Semenov constant for tau.
MaximalReport check_maximal_inequality(const RearrangementMap& tau, const AdaptedSequence& z, double kappa);

/// The square function of the relabeled level slices:
/// t -> (sum_k ||(T_tau d_k)(t)||_X^2)^{1/2} with d_k the level-(k-1) slice.
std::vector<double> a_square(const RearrangementMap& tau, const HaarExpansion& f);

/// Rademacher average t -> E_eps ||sum_k eps_k (T_tau d_k)(t)||_X, exact
/// over all sign vectors (depth+1 <= 12) or sampled.
std::vector<double> a_rademacher(const RearrangementMap& tau, const HaarExpansion& f, bool exact = true,
                                 int samples = 256, std::uint64_t seed = 1);

/// Homogeneous operator mapping a zero-mean expansion of the given depth to
/// a nonnegative step function with 2^{grid_level} cells.
struct HomogeneousOp {
  std::string name;
  int depth = 0;
  int grid_level = 0;
  std::function<std::vector<double>(const HaarExpansion&)> eval;
};

HomogeneousOp square_function_op(const RearrangementMap& tau, int depth);
HomogeneousOp rademacher_op(const RearrangementMap& tau, int depth, bool exact = true, int samples = 256,
                            std::uint64_t seed = 1);

struct MonotoneReport {
  bool pass = true;
  int samples = 0;
  double worst_margin = 0.0;  // max over samples and cells of lhs - rhs
  int failing_sample = -1;
  std::size_t failing_cell = 0;
  double lhs = 0.0, rhs = 0.0;  // at the worst cell
};

/// Samples random nondecreasing nonnegative adapted multipliers gamma_k and
/// random slices d_k, and checks the pointwise domination
/// A(sum gamma_k d_k) <= c * sup_k |P_{k-1,tau}(gamma_k)| * A(sum d_k)
/// on every grid cell, up to `tol`.
MonotoneReport check_tau_monotone(const HomogeneousOp& a, const RearrangementMap& tau, const SpaceSpec& X, double c,
                                  int samples, std::uint64_t seed, double tol = 1e-10);

struct RatioSearchOptions {
  int restarts = 24;
  int max_iterations = 120;
  std::uint64_t seed = 1;
};

/// Lower bound of ||A||_r = sup ||A(f)||_{L^r} / ||f||_{L^r_X} over
/// zero-mean expansions, by multi-start finite-difference ascent.
double homogeneous_norm_search(const HomogeneousOp& a, double r, const SpaceSpec& X,
                               const RatioSearchOptions& opts = {});

struct ExtrapolationBoundReport {
  double q_norm_lower = 0.0;  // searched lower bound of ||A||_q
  double p_norm = 0.0;        // dense estimate of ||A||_p
  double factor = 0.0;        // c * 3p/(q-1) * kappa^{1/r}
  double bound = 0.0;         // factor * p_norm
  bool pass = false;
};

/// One-sided check of the extrapolation constant: the searched ||A||_q lower
/// bound must not exceed c * (3p/(q-1)) * kappa^{1/r} * ||A||_p * (1+tol),
/// where 1/q = 1/r + 1/p. Requires 1 < q < p.
ExtrapolationBoundReport check_extrapolation_bound(const HomogeneousOp& a, const SpaceSpec& X, double kappa, double c,
                                             double p, double q, const RatioSearchOptions& opts = {},
                                             double tolerance = 0.05);

/// Decomposition of the shadow of root into parts K_i, with the exponents
/// attached by condition C(X, p, kappa).
struct CDecomposition {
  DyadicInterval root;
  std::vector<IntervalCollection> parts;
  double p = 2.0;
  double p_star = 2.0;
  double kappa = 1.0;
};

struct ConditionCReport {
  bool c1 = false, c2 = false, c3 = false;
  double c1_sum = 0.0, c1_bound = 0.0;
  std::vector<double> betas;
  bool betas_exact = true;
  double c2_sum = 0.0, c2_bound = 0.0;
  int c3_samples = 0;
  double c3_worst_margin = 0.0;
  bool pass = false;
};

/// Checks (C1)-(C3) for one decomposition against the supplied map and
/// weights gamma_I (heap-indexed over D_0^N). The beta_i are exact for
/// uniform weights on a part (and for p = 2, scalar X); otherwise they are
/// searched lower bounds, so C2 failures are certified.
ConditionCReport check_condition_C(const CDecomposition& dec, const RearrangementMap& tau,
                                   std::span<const double> gamma, const SpaceSpec& X, int c3_samples = 64,
                                   const SearchOptions& beta_search = {});

using Matrix = std::vector<std::vector<double>>;

/// A_p(sum a_I h_I) = sum S(a_I) gamma_I^{1/p} h_{tau(I)} as a linear op
/// from X-valued to Y-valued expansions.
class APOp final : public LinearExpansionOp {
 public:
  APOp(Matrix s, SpaceSpec source, SpaceSpec target, RearrangementMap tau, std::vector<double> gamma, double p);

  int source_depth() const override { return tau_.source_depth(); }
  int target_depth() const override { return tau_.target_depth(); }
  SpaceSpec target_space(const SpaceSpec&) const override { return target_; }
  HaarExpansion apply(const HaarExpansion& f) const override;
  HaarExpansion apply_transpose(const HaarExpansion& g) const override;

 private:
  Matrix s_;
  SpaceSpec source_, target_;
  RearrangementMap tau_;
  std::vector<double> gamma_;
  double p_;
};

HaarExpansion apply_A_p(const Matrix& s, const SpaceSpec& source, const SpaceSpec& target,
                        const RearrangementMap& tau, std::span<const double> gamma, double p,
                        const HaarExpansion& f);

/// An atom supported by one stopping interval: random coefficients on the
/// shadow of a random J_0, scaled so that ||a||_inf * |J_0| = 1, with
/// nu = level(J_0) on J_0 and infinity elsewhere.
Atom random_supported_atom(int depth, const SpaceSpec& space, std::uint64_t seed);

struct H1ExtrapolationReport {
  bool condition_c_pass = false;
  double h1_lower = 0.0;    // searched lower bound of ||A_1: H^1 -> H^1||
  double lp_estimate = 0.0; // estimate of ||A_p||
  double factor = 0.0;      // 18p/(p-1) * kappa^{1+1/q_*}
  double bound = 0.0;
  bool pass = false;
};

struct H1ExtrapolationOptions {
  int h1_samples = 200;
  int atom_samples = 200;
  int c3_samples = 32;
  std::uint64_t seed = 1;
  double tolerance = 0.05;
  SearchOptions lp_search;
};

/// Checks the H^1 extrapolation bound: the H^1 -> H^1 lower bound of A_1
/// must stay below 18p/(p-1) * kappa^{1+1/q_*} * ||A_p|| * (1+tol). If
/// `decs` is empty, single-part decompositions (one per root) are used.
/// Condition C is certified for every root first.
H1ExtrapolationReport check_h1_extrapolation(const Matrix& s, const SpaceSpec& source, const SpaceSpec& target,
                                 const RearrangementMap& tau, std::span<const double> gamma, double p, double kappa,
                                 double p_star, std::vector<CDecomposition> decs = {},
                                 const H1ExtrapolationOptions& opts = {});

/// The single-part decomposition of one root (the Semenov case): the whole
/// shadow as K_1.
CDecomposition semenov_decomposition(const DyadicInterval& root, int depth, double p, double p_star, double kappa);

}  // namespace dyadlab
