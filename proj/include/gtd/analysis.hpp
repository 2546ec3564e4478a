#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "gtd/operators.hpp"
#include "gtd/tensor.hpp"

namespace gtd {

struct RankResult {
  int rank = 0;
  std::vector<double> singular_values;  // non-increasing
  double tolerance = 0.0;
};

// Numerical rank: the count of singular values above the tolerance.
// Default tolerance is max(rows,cols) * eps * sigma_max with an absolute
// floor of 1e-12. Rank near the tolerance is the main numerical hazard of
// this library, hence the explicit spectrum in the result.
RankResult numerical_rank(const Matrix& m,
                          std::optional<double> tol = std::nullopt);

// Minimal squared Frobenius distance from m to the set of rank-<=r
// matrices: sum_{i>r} sigma_i^2. r must lie in [0, min(rows, cols)].
double approx_gap(const Matrix& m, int r);

struct HistogramConfig {
  int levels = 3;                      // L; input size N = 2^L
  int m = 3;                           // mode dimension
  std::vector<int> widths;             // r_0..r_{L-1}
  int trials = 1000;
  std::uint64_t seed = 0;
  PoolOperator op = PoolOperator::relu_max();
  std::string f_label = "identity";    // recorded in the CSV header
};

struct Histogram {
  HistogramConfig config;
  std::map<int, int> bins;  // rank -> count
  // Per-trial spectra kept so borderline bins can be audited after the fact.
  std::vector<std::vector<double>> spectra;
  std::vector<int> trial_ranks;

  int median_rank() const;
};

// Monte Carlo rank experiment: per trial, every weight of an unshared
// hierarchical decomposition (widths r_0..r_{L-1}, dimension m, operator op)
// is drawn independently and uniformly from [-1,1]; the matricized
// decomposition is formed directly (the order-N tensor is never
// materialized) and its numerical rank is recorded.
//
// The per-trial RNG is seeded by mix_seed(config.seed, trial), and weights
// are drawn level 0 first (location-major, then channel), then levels
// 1..L-1, then the output weights. The stream is fixed, so bins are
// independent of trial execution order and of --jobs.
Histogram rank_histogram(const HistogramConfig& config,
                         const Matrix& f, int jobs = 1);

// CSV: "# key=value" comment lines for the config, then "rank,count" rows
// for occupied bins in ascending rank order.
void write_histogram_csv(const Histogram& h, std::ostream& out);

struct RankCombinationResult {
  bool pass = false;
  int trials = 0;
  int failures = 0;
  int max_input_rank = 0;
  int min_combined_rank = 0;
};

// Draws alpha uniform on [-1,1]^m and checks
// rank(sum_i alpha_i A_i) >= max_i rank(A_i) in every trial. The underlying
// statement holds with probability 1; this is its statistical check.
RankCombinationResult rank_combination_test(const std::vector<Matrix>& mats,
                                            int trials, std::uint64_t seed);

}  // namespace gtd
