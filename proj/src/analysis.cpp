#include "gtd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "gtd/decompositions.hpp"
#include "gtd/errors.hpp"
#include "gtd/linalg.hpp"
#include "gtd/rng.hpp"

namespace gtd {

RankResult numerical_rank(const Matrix& m, std::optional<double> tol) {
  RankResult result;
  result.singular_values = linalg::singular_values(m);
  const double smax =
      result.singular_values.empty() ? 0.0 : result.singular_values.front();
  if (tol) {
    result.tolerance = *tol;
  } else {
    const double eps = std::numeric_limits<double>::epsilon();
    result.tolerance =
        std::max(static_cast<double>(std::max(m.rows(), m.cols())) * eps * smax,
                 1e-12);
  }
  for (double s : result.singular_values)
    if (s > result.tolerance) ++result.rank;
  return result;
}

double approx_gap(const Matrix& m, int r) {
  const int min_dim = std::min(m.rows(), m.cols());
  if (r < 0 || r > min_dim)
    throw Error("approx_gap rank target out of [0, min(rows, cols)]");
  const std::vector<double> sv = linalg::singular_values(m);
  double gap = 0.0;
  // Ascending accumulation keeps the small tail singular values from being
  // absorbed by the large ones.
  for (int i = static_cast<int>(sv.size()) - 1; i >= r; --i)
    gap += sv[static_cast<std::size_t>(i)] * sv[static_cast<std::size_t>(i)];
  return gap;
}

int Histogram::median_rank() const {
  // Lower median of the recorded rank counts.
  int total = 0;
  for (const auto& [rank, count] : bins) total += count;
  int midpoint = (total + 1) / 2;
  int seen = 0;
  for (const auto& [rank, count] : bins) {
    seen += count;
    if (seen >= midpoint) return rank;
  }
  return 0;
}

namespace {

HtParams draw_ht_params(int m, int levels, const std::vector<int>& widths,
                        SplitMix64& rng) {
  HtParams p;
  p.m = m;
  p.n = 1 << levels;
  p.widths = widths;
  p.level0.resize(static_cast<std::size_t>(p.n));
  for (int j = 0; j < p.n; ++j) {
    p.level0[static_cast<std::size_t>(j)].resize(
        static_cast<std::size_t>(widths[0]));
    for (int c = 0; c < widths[0]; ++c) {
      auto& v = p.level0[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
      v.resize(static_cast<std::size_t>(m));
      for (double& x : v) x = rng.symmetric();
    }
  }
  p.levels.resize(static_cast<std::size_t>(levels - 1));
  for (int l = 1; l < levels; ++l) {
    const int locations = p.n >> l;
    auto& level = p.levels[static_cast<std::size_t>(l - 1)];
    level.resize(static_cast<std::size_t>(locations));
    for (int j = 0; j < locations; ++j) {
      level[static_cast<std::size_t>(j)].resize(
          static_cast<std::size_t>(widths[static_cast<std::size_t>(l)]));
      for (int c = 0; c < widths[static_cast<std::size_t>(l)]; ++c) {
        auto& v = level[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
        v.resize(static_cast<std::size_t>(widths[static_cast<std::size_t>(l - 1)]));
        for (double& x : v) x = rng.symmetric();
      }
    }
  }
  p.output.resize(static_cast<std::size_t>(widths.back()));
  for (double& x : p.output) x = rng.symmetric();
  return p;
}

}  // namespace

Histogram rank_histogram(const HistogramConfig& config, const Matrix& f,
                         int jobs) {
  if (config.trials < 1) throw Error("rank_histogram needs trials >= 1");
  if (config.levels < 1) throw Error("rank_histogram needs levels >= 1");
  if (static_cast<int>(config.widths.size()) != config.levels)
    throw Error("rank_histogram needs one width per level");
  const int n = 1 << config.levels;
  // Guard the matricized size up front rather than mid-run.
  std::size_t half = 1;
  for (int i = 0; i < n / 2; ++i) {
    half *= static_cast<std::size_t>(config.m);
    if (half * half > element_guard())
      throw SizeGuardError("matricized decomposition exceeds the element guard");
  }

  Histogram h;
  h.config = config;
  h.trial_ranks.assign(static_cast<std::size_t>(config.trials), 0);
  h.spectra.assign(static_cast<std::size_t>(config.trials), {});

  auto run_range = [&](int begin, int end) {
    for (int t = begin; t < end; ++t) {
      SplitMix64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(t)));
      const HtParams p =
          draw_ht_params(config.m, config.levels, config.widths, rng);
      const Matrix mat = matricized_ht(p, f, config.op);
      RankResult r = numerical_rank(mat);
      h.trial_ranks[static_cast<std::size_t>(t)] = r.rank;
      h.spectra[static_cast<std::size_t>(t)] = std::move(r.singular_values);
    }
  };

  const int workers = std::max(1, jobs);
  if (workers == 1) {
    run_range(0, config.trials);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (config.trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(config.trials, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  for (int rank : h.trial_ranks) ++h.bins[rank];
  return h;
}

void write_histogram_csv(const Histogram& h, std::ostream& out) {
  out << "# levels=" << h.config.levels << "\n";
  out << "# m=" << h.config.m << "\n";
  out << "# widths=";
  for (std::size_t i = 0; i < h.config.widths.size(); ++i)
    out << (i ? "," : "") << h.config.widths[i];
  out << "\n";
  out << "# trials=" << h.config.trials << "\n";
  out << "# seed=" << h.config.seed << "\n";
  out << "# operator=" << h.config.op.token() << "\n";
  out << "# f=" << h.config.f_label << "\n";
  out << "rank,count\n";
  for (const auto& [rank, count] : h.bins)
    out << rank << "," << count << "\n";
}

RankCombinationResult rank_combination_test(const std::vector<Matrix>& mats,
                                            int trials, std::uint64_t seed) {
  if (mats.empty()) throw Error("rank_combination_test needs matrices");
  const int rows = mats.front().rows();
  const int cols = mats.front().cols();
  for (const Matrix& m : mats)
    if (m.rows() != rows || m.cols() != cols)
      throw ShapeError("rank_combination_test requires equal shapes");

  RankCombinationResult result;
  result.trials = trials;
  for (const Matrix& m : mats)
    result.max_input_rank =
        std::max(result.max_input_rank, numerical_rank(m).rank);
  result.min_combined_rank = std::numeric_limits<int>::max();

  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    Matrix combo(rows, cols);
    for (const Matrix& m : mats) {
      const double alpha = rng.symmetric();
      for (std::size_t i = 0; i < combo.size(); ++i)
        combo.storage()[i] += alpha * m.data()[i];
    }
    const int rank = numerical_rank(combo).rank;
    result.min_combined_rank = std::min(result.min_combined_rank, rank);
    if (rank < result.max_input_rank) ++result.failures;
  }
  result.pass = result.failures == 0;
  return result;
}

}  // namespace gtd
