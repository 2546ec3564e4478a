#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "gtd/decompositions.hpp"
#include "gtd/operators.hpp"
#include "gtd/tensor.hpp"

namespace gtd {

using Patch = std::vector<double>;

// M fixed template vectors in R^s, pairwise distinct (exact comparison;
// duplicates are rejected). Grid tensors discretize score functions on the
// grid of all template combinations.
class Templates {
 public:
  explicit Templates(std::vector<Patch> vectors);

  int count() const { return static_cast<int>(x_.size()); }
  int dim() const { return x_.empty() ? 0 : static_cast<int>(x_[0].size()); }
  const Patch& vec(int d) const { return x_[static_cast<std::size_t>(d)]; }
  const std::vector<Patch>& all() const { return x_; }

 private:
  std::vector<Patch> x_;
};

enum class ReprKind {
  relu_neuron,      // f(x) = max{0, w.x + b}
  sigmoid_neuron,   // f(x) = logistic(alpha*(w.x + b))
  raw_coordinates,  // f_d(x) = x_d
  identity_onehot,  // f_d(x) = [x == template_d], gives F = I on the grid
  monomial,         // f_d(x) = x_1^(d-1); linearly independent test family
};

struct ReprFunction {
  ReprKind kind = ReprKind::raw_coordinates;
  std::vector<double> w;  // relu/sigmoid weight, or the template for onehot
  double b = 0.0;
  double alpha = 1.0;     // sigmoid scale
  int index = 0;          // coordinate / monomial degree

  double eval(std::span<const double> x) const;
};

// The family of M representation functions applied patch-wise by the first
// network layer.
class ReprFamily {
 public:
  explicit ReprFamily(std::vector<ReprFunction> funcs);

  static ReprFamily relu_neurons(std::vector<std::vector<double>> w,
                                 std::vector<double> b);
  static ReprFamily sigmoid_neurons(std::vector<std::vector<double>> w,
                                    std::vector<double> b, double alpha);
  static ReprFamily raw_coordinates(int m);
  static ReprFamily identity_onehot(const Templates& t);
  static ReprFamily monomials(int m);

  int size() const { return static_cast<int>(funcs_.size()); }
  const ReprFunction& func(int d) const {
    return funcs_[static_cast<std::size_t>(d)];
  }
  double eval(int d, std::span<const double> x) const {
    return funcs_[static_cast<std::size_t>(d)].eval(x);
  }
  // All M representation values of a patch.
  std::vector<double> rep(std::span<const double> x) const;

 private:
  std::vector<ReprFunction> funcs_;
};

// F_{ij} = f_{theta_j}(x^(i)): representation values on the templates.
// Permuting the templates permutes F's rows identically.
Matrix build_repr_matrix(const Templates& t, const ReprFamily& r);

// --- Forward passes -------------------------------------------------------
//
// Spatial layout is one-dimensional: N patch locations in a line. Pooling
// at level l pairs locations (2j-1, 2j); nothing in the math uses 2-D
// adjacency. Each score function below, evaluated on grid points, equals
// the corresponding decomposition entry.

// Shallow network: per-location 1x1 conv (Z channels), then one global
// activation-pooling over all N locations, then the output weights.
// Single-output form uses p.output; the multi-head form evaluates one score
// per row of `heads` (each of length Z) over the same conv weights.
double shallow_score(std::span<const Patch> patches, const CpParams& p,
                     const ReprFamily& reps, const PoolOperator& g);
std::vector<double> shallow_scores(std::span<const Patch> patches,
                                   const CpParams& p,
                                   std::span<const std::vector<double>> heads,
                                   const ReprFamily& reps,
                                   const PoolOperator& g);

// Deep network: L = log2(N) hidden layers of 1x1 conv + activation +
// size-2 pooling, then the output weights.
double deep_score(std::span<const Patch> patches, const HtParams& p,
                  const ReprFamily& reps, const PoolOperator& g);
std::vector<double> deep_scores(std::span<const Patch> patches,
                                const HtParams& p,
                                std::span<const std::vector<double>> heads,
                                const ReprFamily& reps, const PoolOperator& g);

// Shallow network with the conv receptive field widened from a single
// location to a window of K locations. ReLU activation and average pooling
// are fixed for this architecture. conv[z][i] is an M x K matrix: column j
// weights the representation of the patch at window slot j.
//
// Window geometry: slot j of the window around location i sits at
// rho(j;i) = i + (j-1) - floor((K-1)/2) (1-based); slots outside [1,N] are
// zero-padded, i.e. contribute a zero representation row. K must be < N.
struct WxhParams {
  int k = 0;
  std::vector<std::vector<Matrix>> conv;  // [z][i], each m x k
  std::vector<double> output;             // [Z]

  int z() const { return static_cast<int>(conv.size()); }
  int n() const { return conv.empty() ? 0 : static_cast<int>(conv[0].size()); }
  void validate(int m) const;
};

double wxh_score(std::span<const Patch> patches, const WxhParams& p,
                 const ReprFamily& reps);

// Grid tensor of the widened-window network, assembled from the
// per-location window tensors
//   B^i_{c_1..c_K} = sum_z (out_z / N) * max{0, sum_j (F conv[z][i])_{c_j, j}}
// with out-of-bounds window slots reading a zero row. Matches exhaustive
// grid evaluation of wxh_score.
Tensor wxh_grid_tensor(const WxhParams& p, const Matrix& f, int n);

// The non-universality analysis of this architecture applies when
// K < N/2 + 1 - log_M(N); larger windows are allowed but leave that regime.
double wxh_regime_bound(int n, int m);

// Fully-connected network: hidden unit z computes
// max{0, <rep-matrix of X, hidden[z]>} over the whole spatial extent
// (hidden[z] is N x M); ReLU activation is fixed.
struct FcParams {
  std::vector<Matrix> hidden;  // [z], each n x m
  std::vector<double> output;  // [Z]

  int z() const { return static_cast<int>(hidden.size()); }
  void validate(int n, int m) const;
};

double fc_score(std::span<const Patch> patches, const FcParams& p,
                const ReprFamily& reps);

// Grid evaluation of the fully-connected score directly from F: on grid
// point (d_1..d_N) the rep-matrix is rows d_1..d_N of F.
Tensor fc_grid_tensor(const FcParams& p, const Matrix& f, int n);

// Grid tensor of an arbitrary score function: entry (d_1..d_N) holds
// score(x^(d_1), ..., x^(d_N)). M^N entries; the element guard applies.
using ScoreFn = std::function<double(std::span<const Patch>)>;
Tensor grid_tensor(const ScoreFn& score, const Templates& t, int n);

}  // namespace gtd
