#pragma once

#include <vector>

#include "gtd/operators.hpp"
#include "gtd/tensor.hpp"

namespace gtd {

// Weights of the generalized CP form
//   A = sum_z out[z] * (F conv[z][0]) (x)g ... (x)g (F conv[z][N-1])
// conv[z][i] has length m (the mode dimension), out has length Z. Z may be
// zero (the empty sum is the zero tensor), which is why n is stored rather
// than derived.
struct CpParams {
  int m = 0;
  int n = 0;
  std::vector<std::vector<std::vector<double>>> conv;  // [z][i][m]
  std::vector<double> output;                          // [Z]

  int z() const { return static_cast<int>(conv.size()); }
  void validate() const;
};

// Shared-coefficient CP: one vector per channel, repeated across all N
// locations.
struct SharedCpParams {
  int m = 0;
  int n = 0;
  std::vector<std::vector<double>> conv;  // [z][m]
  std::vector<double> output;             // [Z]

  int z() const { return static_cast<int>(conv.size()); }
  void validate() const;
};

// Weights of the generalized HT form over N = 2^L locations:
//   level-0 vectors level0[j][c] in R^m         j in [N],      c in [r_0]
//   level-l vectors levels[l-1][j][c] in R^{r_{l-1}}
//                                               l in [L-1], j in [N/2^l],
//                                               c in [r_l]
//   output in R^{r_{L-1}}
struct HtParams {
  int m = 0;
  int n = 0;                 // power of two, >= 2
  std::vector<int> widths;   // r_0..r_{L-1}
  std::vector<std::vector<std::vector<double>>> level0;
  std::vector<std::vector<std::vector<std::vector<double>>>> levels;
  std::vector<double> output;

  int level_count() const { return static_cast<int>(widths.size()); }
  void validate() const;
};

struct SharedHtParams {
  int m = 0;
  int n = 0;
  std::vector<int> widths;
  std::vector<std::vector<double>> level0;               // [c][m]
  std::vector<std::vector<std::vector<double>>> levels;  // [l-1][c][r_{l-1}]
  std::vector<double> output;

  void validate() const;
};

// Full-tensor evaluations (order N, dimension m per mode). The element
// guard applies; beyond it use the per-entry evaluators or the matricized
// forms below.
Tensor generalized_cp(const CpParams& p, const Matrix& f,
                      const PoolOperator& g);
Tensor generalized_ht(const HtParams& p, const Matrix& f,
                      const PoolOperator& g);
Tensor shared_cp(const SharedCpParams& p, const Matrix& f,
                 const PoolOperator& g);
Tensor shared_ht(const SharedHtParams& p, const Matrix& f,
                 const PoolOperator& g);

// Single-entry evaluation, no materialization.
double cp_entry(const CpParams& p, const Matrix& f, const PoolOperator& g,
                const MultiIndex& index);
double ht_entry(const HtParams& p, const Matrix& f, const PoolOperator& g,
                const MultiIndex& index);

// Matricized forms, built directly in matrix space via the generalized
// Kronecker product; the order-N tensor is never materialized. These agree
// bit-for-bit with matricize() of the full-tensor paths: both sides fold
// the CP chain as g(odd positions, even positions) and the HT paths share
// one recursion tree, so no floating-point reassociation sneaks in.
Matrix matricized_cp(const CpParams& p, const Matrix& f,
                     const PoolOperator& g);
Matrix matricized_ht(const HtParams& p, const Matrix& f,
                     const PoolOperator& g);

// Replicates shared weights across locations.
CpParams unshare(const SharedCpParams& p);
HtParams unshare(const SharedHtParams& p);

// The CP-to-HT reduction: widths all Z, interior weights set to channel
// indicators, level-0 vectors taken from the CP channels. The produced HT
// tensor equals the CP tensor for every registered operator (associativity
// is the only property used). n must be a power of two.
HtParams ht_from_cp(const CpParams& p);

enum class CpKind { product, relu_max };

// Exact CP realization of an arbitrary tensor (order N, dimension m per
// mode) given an invertible F:
//   product:  one channel per entry, conv vectors F^{-1} e_{d_i}, output
//             weight the entry value; Z = m^N.
//   relu-max: two channels per nonzero entry via the indicator pair
//             (F^{-1} ones, F^{-1} ebar_{d_i}) with output weights
//             (+value, -value); zero entries are skipped, Z = 2 * nnz.
// Entries are enumerated row-major ascending, so the output is
// deterministic. A singular F fails the solve residual check.
CpParams cp_from_tensor(const Tensor& a, CpKind kind, const Matrix& f);

}  // namespace gtd
