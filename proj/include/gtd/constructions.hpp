#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gtd/decompositions.hpp"
#include "gtd/networks.hpp"
#include "gtd/tensor.hpp"

namespace gtd {

// Outcome of a constructive procedure's self-check: named witness values
// (ranks, residuals, determinants) and a verdict at the stated tolerance.
struct Certificate {
  std::string claim;
  bool pass = false;
  std::map<std::string, double> witnesses;
  double tolerance = 0.0;
  std::uint64_t seed = 0;

  void require(const std::string& name, bool ok, double value) {
    witnesses[name] = value;
    if (!ok) pass = false;
  }
};

// A direction under which the given points have pairwise distinct
// projections, found by seeded sampling (the failure set has measure zero).
// The direction is unit length with its first nonzero coordinate positive,
// and the minimum projection gap is at least 1e-9. Throws RetryError after
// 64 attempts, which signals near-duplicate inputs.
std::vector<double> separating_direction(
    const std::vector<std::vector<double>>& points, std::uint64_t seed);

struct NondegenerateReprs {
  ReprFamily family;
  Matrix f;
  double det = 0.0;
  Certificate cert;
};

enum class NeuronKind { relu, sigmoid };

// Standard-neuron representation functions with certified non-singular F
// for the given distinct templates. The relu construction sorts the
// template projections p_1 < ... < p_M along a separating direction and
// places biases at the interval midpoints, -p_M < b_M < ... < -p_1 < b_1
// (b_1 half the first gap above -p_1), which makes F lower triangular with
// positive diagonal after row sorting. The sigmoid construction reuses the
// same affine arguments and doubles a scale alpha from 1 until
// |det F| >= 1e-8 (cap 2^40).
NondegenerateReprs nondegenerate_reprs(const Templates& t, NeuronKind kind,
                                       std::uint64_t seed);

// Templates under which the given linearly independent representation
// functions produce |det F| >= 1e-10, found by seeded sampling in
// [-1,1]^dim with up to 256 retries.
Templates templates_for_reprs(const ReprFamily& r, int dim,
                              std::uint64_t seed);

struct DepthEffWitness {
  HtParams params;
  Matrix matricized;
  int rank = 0;
  Certificate cert;
};

// The explicit relu-max deep weight setting whose matricized grid tensor
// holds c = min{r0, M} everywhere except c^{N/2} diagonal entries holding
// c-1:
//   level-0 vectors F^{-1} ebar_c for channels c <= M (zero beyond),
//   interior weights all-ones on channel 1 only, output weights all-ones.
// The certificate checks this structure entrywise and that the numerical
// rank is at least c^{N/2}; the exact computed rank is recorded as a
// witness. Any shallow relu-max realization needs
// Z >= c^{N/2} * 2 / (M*N).
DepthEffWitness depth_eff_ht_weights(int m, int r0, int n, const Matrix& f);

enum class TrivialVariant { unshared, shared, cross_product };

struct TrivialWeights {
  TrivialVariant variant = TrivialVariant::unshared;
  HtParams deep;                              // unshared view of the setting
  std::optional<SharedHtParams> shared_deep;  // set for the shared variant
  CpParams shallow;                           // Z = 1 realizer
  PoolOperator shallow_op = PoolOperator::relu_max();
  Certificate cert;
};

// Deep relu-max weight settings that stay shallow-realizable with a single
// hidden channel:
//   unshared:      F^{-1} ones at odd locations, zeros at even; the deep
//                  tensor is the constant prod(r_l) and the realizer puts
//                  prod(r_l)*ones through location 1.
//   shared:        F^{-1} [1..M] everywhere; the deep tensor is basic and
//                  the realizer replicates F^{-1} u at all locations.
//   cross_product: same deep setting as unshared, realized by a *product*
//                  pooling shallow net (F^{-1} ones at locations i > 1).
// The certificate checks entrywise equality deep vs realizer, then re-checks
// after perturb_seeds rounds of uniform noise (magnitude eps, halved once on
// failure) applied to every deep weight and to F, with the realizer
// re-solved from the perturbed tensor. Rank-1 persistence is certified for
// the unshared and cross variants; basic-ness for the shared variant.
TrivialWeights trivial_ht_weights(int m, const std::vector<int>& widths,
                                  int n, const Matrix& f, TrivialVariant v,
                                  std::uint64_t seed, int perturb_seeds = 20,
                                  double eps = 1e-3);

// Detects whether A equals the relu-max chain of a single vector with
// itself: candidate u_d = A(d,...,d); requires u non-decreasing and
// A(d_1..d_N) == max{0, max_i u_{d_i}} everywhere within tol. Returns the
// clipped-at-zero representative, or nullopt.
std::optional<std::vector<double>> is_basic(const Tensor& a,
                                            double tol = 1e-9);

struct PiecewiseAffine {
  std::vector<std::vector<double>> w;  // [k][D], all equal to the direction
  std::vector<double> b;
  std::vector<double> a;
  double max_residual = 0.0;  // relative
  Certificate cert;
};

// One-hidden-layer ReLU interpolation through k distinct points: shared
// direction u from separating_direction, sorted projections q_1 < ... < q_k,
//   b_1 = -q_1 + 1, b_j = -q_{j-1},
//   a_1 = c_1,      a_j = (c_j - c_{j-1}) / (q_j - q_{j-1}) - sum_{t<j} a_t,
// so that sum_j a_j max{0, u.v_i + b_j} = c_i for every i. The certificate
// substitutes every point back and requires relative residual <= 1e-8.
// Triples are returned in sorted-projection order.
PiecewiseAffine piecewise_affine_interpolate(
    const std::vector<std::vector<double>>& points,
    std::span<const double> targets, std::uint64_t seed);

struct FcUniversal {
  FcParams params;
  Certificate cert;
};

// Fully-connected weights reproducing an arbitrary grid tensor, Z = M^N.
// Requires F with one constant nonzero column and pairwise distinct rows
// (checked). Grid points become flattened feature matrices with the
// constant column removed, the interpolation above supplies the hidden
// affine pieces, and each bias folds back into the removed column via
// b_z = c * sum_i hidden[z](i, j). Certificate: fc grid equals the target
// on every grid point.
FcUniversal fc_universal_weights(const Tensor& target, const Matrix& f,
                                 std::uint64_t seed);

struct IndicatorCp {
  CpParams params;
  Certificate cert;
};

// Z = 2 relu-max realization of the indicator of one grid entry:
// output (+1, -1), channel 1 all F^{-1} ones, channel 2 F^{-1} ebar_{d_i}
// (ebar holding 0 at the entry's index and 1 elsewhere). Certificate:
// generalized_cp under relu-max equals the indicator.
IndicatorCp indicator_cp(const MultiIndex& index, int m, int n,
                         const Matrix& f);

}  // namespace gtd
