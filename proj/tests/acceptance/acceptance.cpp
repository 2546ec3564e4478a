// Acceptance suite: one line per criterion, exit 0 only if every criterion
// holds at its stated tolerance.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gtd/analysis.hpp"
#include "gtd/claims.hpp"
#include "gtd/constructions.hpp"
#include "gtd/decompositions.hpp"
#include "gtd/errors.hpp"
#include "gtd/networks.hpp"
#include "gtd/rng.hpp"
#include "gtd/tensor.hpp"

namespace fs = std::filesystem;
using namespace gtd;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d %s  %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<double> random_vec(int len, SplitMix64& rng) {
  std::vector<double> v(static_cast<std::size_t>(len));
  for (double& x : v) x = rng.symmetric();
  return v;
}

CpParams random_cp(int m, int n, int z, SplitMix64& rng) {
  CpParams p;
  p.m = m;
  p.n = n;
  p.conv.resize(static_cast<std::size_t>(z));
  for (auto& channel : p.conv) {
    channel.resize(static_cast<std::size_t>(n));
    for (auto& v : channel) v = random_vec(m, rng);
  }
  p.output = random_vec(z, rng);
  return p;
}

HtParams random_ht(int m, int n, const std::vector<int>& widths,
                   SplitMix64& rng) {
  HtParams p;
  p.m = m;
  p.n = n;
  p.widths = widths;
  const int levels = static_cast<int>(widths.size());
  p.level0.resize(static_cast<std::size_t>(n));
  for (auto& loc : p.level0) {
    loc.resize(static_cast<std::size_t>(widths[0]));
    for (auto& v : loc) v = random_vec(m, rng);
  }
  p.levels.resize(static_cast<std::size_t>(levels - 1));
  for (int l = 1; l < levels; ++l) {
    auto& level = p.levels[static_cast<std::size_t>(l - 1)];
    level.resize(static_cast<std::size_t>(n >> l));
    for (auto& loc : level) {
      loc.resize(static_cast<std::size_t>(widths[static_cast<std::size_t>(l)]));
      for (auto& v : loc)
        v = random_vec(widths[static_cast<std::size_t>(l - 1)], rng);
    }
  }
  p.output = random_vec(widths.back(), rng);
  return p;
}

SharedCpParams random_shared_cp(int m, int n, int z, SplitMix64& rng) {
  SharedCpParams p;
  p.m = m;
  p.n = n;
  p.conv.resize(static_cast<std::size_t>(z));
  for (auto& v : p.conv) v = random_vec(m, rng);
  p.output = random_vec(z, rng);
  return p;
}

SharedHtParams random_shared_ht(int m, int n, const std::vector<int>& widths,
                                SplitMix64& rng) {
  SharedHtParams p;
  p.m = m;
  p.n = n;
  p.widths = widths;
  const int levels = static_cast<int>(widths.size());
  p.level0.resize(static_cast<std::size_t>(widths[0]));
  for (auto& v : p.level0) v = random_vec(m, rng);
  p.levels.resize(static_cast<std::size_t>(levels - 1));
  for (int l = 1; l < levels; ++l) {
    auto& level = p.levels[static_cast<std::size_t>(l - 1)];
    level.resize(static_cast<std::size_t>(widths[static_cast<std::size_t>(l)]));
    for (auto& v : level)
      v = random_vec(widths[static_cast<std::size_t>(l - 1)], rng);
  }
  p.output = random_vec(widths.back(), rng);
  return p;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

std::string format(const char* fmt, ...) {
  char buffer[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buffer, sizeof buffer, fmt, args);
  va_end(args);
  return buffer;
}

// 1. Exhaustive network-vs-decomposition oracle equivalence at m=2, n=4 for
//    all three operators; matricized paths bit-identical to
//    matricize-of-tensor. Under 10 seconds.
void criterion_1() {
  const double start = now_seconds();
  const std::uint64_t seed = 42;

  SplitMix64 trng(seed);
  std::vector<Patch> vecs;
  for (int i = 0; i < 2; ++i) vecs.push_back(random_vec(3, trng));
  const Templates templates(vecs);
  const NondegenerateReprs nd =
      nondegenerate_reprs(templates, NeuronKind::relu, seed);
  const Matrix& f = nd.f;

  double worst = 0.0;
  bool matricized_exact = true;
  SplitMix64 rng(seed + 1);
  for (const PoolOperator& g : PoolOperator::all()) {
    for (int trial = 0; trial < 5; ++trial) {
      const CpParams cp = random_cp(2, 4, 3, rng);
      const Tensor cp_tensor = generalized_cp(cp, f, g);
      const Tensor cp_grid = grid_tensor(
          [&](std::span<const Patch> patches) {
            return shallow_score(patches, cp, nd.family, g);
          },
          templates, 4);
      worst = std::max(worst, max_abs_diff(cp_grid, cp_tensor));
      matricized_exact =
          matricized_exact && matricized_cp(cp, f, g) == matricize(cp_tensor);

      const HtParams ht = random_ht(2, 4, {2, 3}, rng);
      const Tensor ht_tensor = generalized_ht(ht, f, g);
      const Tensor ht_grid = grid_tensor(
          [&](std::span<const Patch> patches) {
            return deep_score(patches, ht, nd.family, g);
          },
          templates, 4);
      worst = std::max(worst, max_abs_diff(ht_grid, ht_tensor));
      matricized_exact =
          matricized_exact && matricized_ht(ht, f, g) == matricize(ht_tensor);
    }
  }
  const double elapsed = now_seconds() - start;
  const bool pass = worst <= 1e-12 && matricized_exact && elapsed < 10.0;
  report(1, pass,
         format("oracle equivalence: max grid err %.2e (<= 1e-12), matricized "
                "paths %s, %.2f s (< 10 s)",
                worst, matricized_exact ? "bit-exact" : "MISMATCH", elapsed));
}

// 2. Universality constructions: cp_from_tensor round trips, exact
//    indicators, fully-connected reproduction.
void criterion_2() {
  const std::uint64_t seed = 42;
  const Matrix f2 = Matrix::identity(2);

  double round_trip = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
    Tensor target(Shape{2, 2, 2});
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = rng.symmetric();
    const CpParams product = cp_from_tensor(target, CpKind::product, f2);
    round_trip = std::max(
        round_trip,
        max_abs_diff(generalized_cp(product, f2, PoolOperator::product()), target));
    const CpParams relu = cp_from_tensor(target, CpKind::relu_max, f2);
    round_trip = std::max(
        round_trip,
        max_abs_diff(generalized_cp(relu, f2, PoolOperator::relu_max()), target));
  }

  double indicator_err = 0.0;
  MultiIndex idx = MultiIndex::ones(4);
  const Shape shape{2, 2, 2, 2};
  do {
    const IndicatorCp ind = indicator_cp(idx, 2, 4, f2);
    indicator_err = std::max(indicator_err, ind.cert.witnesses.at("max_err"));
  } while (idx.advance(shape));

  const Matrix f_fc(2, 2, {1.0, 0.0, 1.0, 1.0});
  double fc_err = 0.0;
  int z_used = 0;
  for (int trial = 0; trial < 10; ++trial) {
    SplitMix64 rng(mix_seed(seed ^ 0xfcULL, static_cast<std::uint64_t>(trial)));
    Tensor target(Shape{2, 2, 2});
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = rng.symmetric();
    const FcUniversal fc = fc_universal_weights(target, f_fc, seed + trial);
    fc_err = std::max(fc_err, fc.cert.witnesses.at("grid_err"));
    z_used = fc.params.z();
  }

  const bool pass =
      round_trip <= 1e-9 && indicator_err == 0.0 && fc_err <= 1e-9 && z_used == 8;
  report(2, pass,
         format("universality: 50x round-trip err %.2e (<= 1e-9), indicator "
                "err %.2e (exact), 10x fc err %.2e (<= 1e-9, Z=%d)",
                round_trip, indicator_err, fc_err, z_used));
}

// 3. relu-sum rank ceilings: shallow <= 2, deep <= 2*M^(N/4), widened
//    windows <= N*M^(K-1); 100 seeded draws each, zero violations.
void criterion_3() {
  const std::uint64_t seed = 42;
  const int m = 2, n = 8, k = 2;
  const Matrix f = Matrix::identity(m);
  const PoolOperator op = PoolOperator::relu_sum();

  int max_shallow = 0, max_deep = 0, max_wxh = 0;
  for (int trial = 0; trial < 100; ++trial) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
    const CpParams cp = random_cp(m, n, 4, rng);
    max_shallow =
        std::max(max_shallow, numerical_rank(matricized_cp(cp, f, op)).rank);
    const HtParams ht = random_ht(m, n, {3, 3, 3}, rng);
    max_deep =
        std::max(max_deep, numerical_rank(matricized_ht(ht, f, op)).rank);

    WxhParams wp;
    wp.k = k;
    wp.conv.resize(3);
    for (auto& channel : wp.conv)
      for (int i = 0; i < n; ++i)
        channel.push_back(Matrix(m, k, random_vec(m * k, rng)));
    wp.output = random_vec(3, rng);
    max_wxh = std::max(
        max_wxh, numerical_rank(matricize(wxh_grid_tensor(wp, f, n))).rank);
  }

  const int deep_ceiling = 2 * m * m;  // 2 * M^(N/4) = 8
  const int wxh_ceiling = n * m;       // N * M^(K-1) = 16
  const bool pass =
      max_shallow <= 2 && max_deep <= deep_ceiling && max_wxh <= wxh_ceiling;
  report(3, pass,
         format("relu-sum ceilings: shallow max %d (<= 2), deep max %d (<= %d), "
                "wxh max %d (<= %d), 100 draws each",
                max_shallow, max_deep, deep_ceiling, max_wxh, wxh_ceiling));
}

// 4. Product pooling: random deep weights hit rank min{r0,M}^(N/2) in at
//    least 99% of 200 trials at N=4 and N=8, and every such matrix exceeds
//    the relu-max shallow ceiling for all Z below the threshold.
void criterion_4() {
  const std::uint64_t seed = 42;
  bool pass = true;
  std::string detail = "product depth efficiency:";
  for (int levels : {2, 3}) {
    const int m = 2, width = 2;
    const int n = 1 << levels;
    HistogramConfig config;
    config.levels = levels;
    config.m = m;
    config.widths.assign(static_cast<std::size_t>(levels), width);
    config.trials = 200;
    config.seed = seed;
    config.op = PoolOperator::product();
    const Histogram h = rank_histogram(config, Matrix::identity(m), 1);

    int expected = 1;
    for (int i = 0; i < n / 2; ++i) expected *= std::min(width, m);
    int hits = 0;
    bool ceilings_ok = true;
    const double z_bound = expected * 2.0 / (m * n);
    for (int rank : h.trial_ranks) {
      if (rank != expected) continue;
      ++hits;
      for (int z = 1; z < z_bound; ++z)
        if (!(rank > z * m * n / 2.0)) ceilings_ok = false;
    }
    const double fraction = static_cast<double>(hits) / config.trials;
    pass = pass && fraction >= 0.99 && ceilings_ok;
    detail += format(" N=%d rank=%d in %.1f%% (>= 99%%)%s;", n, expected,
                     100.0 * fraction,
                     ceilings_ok ? ", above all shallow ceilings" : " CEILING VIOLATION");
  }
  report(4, pass, detail);
}

// 5. The explicit relu-max witness: 2J-I with rank exactly 4 at
//    m=r0=2, n=4; rank >= 27 at m=r0=3, n=8; positive approximation gap at
//    the shallow ceiling.
void criterion_5() {
  const DepthEffWitness w1 = depth_eff_ht_weights(2, 2, 4, Matrix::identity(2));
  bool two_j_minus_i = true;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (w1.matricized(i, j) != (i == j ? 1.0 : 2.0)) two_j_minus_i = false;

  const DepthEffWitness w2 = depth_eff_ht_weights(3, 3, 8, Matrix::identity(3));
  const double gap_n4 = approx_gap(w1.matricized, 1);
  const double gap_n8 = approx_gap(w2.matricized, 24);  // Z=2 ceiling = 24

  const bool pass = two_j_minus_i && w1.rank == 4 && w2.rank >= 27 &&
                    gap_n4 > 1e-6 && gap_n8 > 1e-6;
  report(5, pass,
         format("relu-max witness: n=4 matrix %s rank %d (= 4), n=8 rank %d "
                "(>= 27), gaps %.3g / %.3g (> 1e-6)",
                two_j_minus_i ? "= 2J-I," : "WRONG,", w1.rank, w2.rank, gap_n4,
                gap_n8));
}

// 6. Incompleteness: trivial weight settings in all three variants are
//    exactly Z=1 realizable and stay so under 20 seeded 1e-3 perturbations
//    (rank 1 for the unshared and cross variants, basic for shared).
void criterion_6() {
  const std::uint64_t seed = 42;
  bool pass = true;
  std::string detail = "incompleteness:";
  struct Case {
    TrivialVariant variant;
    const char* name;
    int m;
    std::vector<int> widths;
    int n;
  };
  const std::vector<Case> cases = {
      {TrivialVariant::unshared, "unshared", 3, {2, 2}, 4},
      {TrivialVariant::unshared, "unshared-n8", 2, {2, 2, 2}, 8},
      {TrivialVariant::shared, "shared", 3, {2, 2}, 4},
      {TrivialVariant::cross_product, "cross", 3, {2, 2}, 4},
  };
  for (const Case& c : cases) {
    const TrivialWeights t = trivial_ht_weights(
        c.m, c.widths, c.n, Matrix::identity(c.m), c.variant, seed);
    const double base = t.cert.witnesses.at("realizer_err");
    const double noisy = t.cert.witnesses.at("perturbed_err");
    const bool ok = t.cert.pass && base <= 1e-9 && noisy <= 1e-6;
    pass = pass && ok;
    // The shared variant's deep tensor is basic (a max-chain of one ramp
    // vector), which is Z=1 realizable but not rank 1; the rank-1
    // persistence applies to the unshared and cross settings.
    const char* shape = c.variant == TrivialVariant::shared
                            ? "basic"
                            : "rank 1";
    detail += format(" %s err %.1e/%.1e, %s kept, %s;", c.name, base, noisy,
                     shape, ok ? "ok" : "FAIL");
  }
  report(6, pass, detail + " 20 seeds at eps 1e-3");
}

// 7. The rank-histogram experiment: widths 2/4/8, 1000 trials each,
//    relu-max, identity F; medians strictly increase, upper-tail mass grows,
//    max rank <= 81, single-threaded under 5 minutes.
void criterion_7() {
  const double start = now_seconds();
  const ClaimSpec* spec = find_claim("rank-histogram-shift");
  const ClaimResult result = run_claim(*spec, 42);
  const double elapsed = now_seconds() - start;
  const bool pass = result.pass && elapsed < 300.0;
  report(7, pass,
         format("rank histograms: medians %g < %g < %g, tail %0.3f -> %0.3f, "
                "max %g (<= 81), %.1f s (< 300 s)",
                result.witnesses.at("median_r2"), result.witnesses.at("median_r4"),
                result.witnesses.at("median_r8"), result.witnesses.at("tail_r2"),
                result.witnesses.at("tail_r8"), result.witnesses.at("max_rank"),
                elapsed));
}

// 8. The interpolation construction: 100 random instances within 1e-8
//    relative residual and the exact worked scalar example.
void criterion_8() {
  const std::uint64_t seed = 42;
  double worst = 0.0;
  bool all_pass = true;
  for (int trial = 0; trial < 100; ++trial) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
    const int k = 1 + static_cast<int>(rng.below(16));
    const int dim = 1 + static_cast<int>(rng.below(4));
    std::vector<std::vector<double>> points;
    for (int i = 0; i < k; ++i) points.push_back(random_vec(dim, rng));
    const std::vector<double> targets = random_vec(k, rng);
    const PiecewiseAffine pa =
        piecewise_affine_interpolate(points, targets, rng.next());
    worst = std::max(worst, pa.max_residual);
    all_pass = all_pass && pa.cert.pass;
  }

  const PiecewiseAffine worked = piecewise_affine_interpolate(
      {{1.0}, {2.0}}, std::vector<double>{5.0, 7.0}, seed);
  const bool worked_exact = worked.b[0] == 0.0 && worked.b[1] == -1.0 &&
                            worked.a[0] == 5.0 && worked.a[1] == -3.0;

  const bool pass = all_pass && worst <= 1e-8 && worked_exact;
  report(8, pass,
         format("interpolation: 100 instances, max relative residual %.2e "
                "(<= 1e-8), worked example a=(5,-3) b=(0,-1) %s",
                worst, worked_exact ? "exact" : "WRONG"));
}

// 9. Shared-weight invariants: symmetry under all 24 permutations and
//    half-swap invariance, 50 random draws each, within 1e-12.
void criterion_9() {
  const std::uint64_t seed = 42;
  const int m = 2, n = 4;
  const Matrix f = Matrix::identity(m);

  std::vector<std::vector<int>> perms;
  std::vector<int> perm{0, 1, 2, 3};
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  double sym_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
    const PoolOperator& g = PoolOperator::all()[trial % 3];
    const Tensor t = shared_cp(random_shared_cp(m, n, 3, rng), f, g);
    for (const auto& pm : perms)
      sym_err = std::max(sym_err, max_abs_diff(t, permute_modes(t, pm)));
  }

  const std::vector<int> half_swap{2, 3, 0, 1};
  double swap_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    SplitMix64 rng(mix_seed(seed ^ 0x99ULL, static_cast<std::uint64_t>(trial)));
    const PoolOperator& g = PoolOperator::all()[trial % 3];
    const Tensor t = shared_ht(random_shared_ht(m, n, {2, 2}, rng), f, g);
    swap_err = std::max(swap_err, max_abs_diff(t, permute_modes(t, half_swap)));
  }

  const bool pass = sym_err <= 1e-12 && swap_err <= 1e-12;
  report(9, pass,
         format("shared invariants: symmetry err %.2e, half-swap err %.2e "
                "(both <= 1e-12, 50 draws each)",
                sym_err, swap_err));
}

// 10. Determinism of the CLI artifacts: repeated `verify --seed 42` and
//     `rank-hist --seed 42` runs produce byte-identical outputs.
std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_10() {
  const fs::path dir = fs::temp_directory_path() / "gtd_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = GTD_CLI_PATH;

  auto run = [&](const std::string& args) {
    const std::string command =
        cli + " " + args + " > /dev/null 2> /dev/null";
    return std::system(command.c_str());
  };

  const fs::path report1 = dir / "verify1.json";
  const fs::path report2 = dir / "verify2.json";
  const int v1 = run("verify --seed 42 --out " + report1.string());
  const int v2 = run("verify --seed 42 --out " + report2.string());
  const bool verify_ok = v1 == 0 && v2 == 0 && !slurp(report1).empty() &&
                         slurp(report1) == slurp(report2);

  const fs::path hist1 = dir / "hist1";
  const fs::path hist2 = dir / "hist2";
  const std::string hist_args = "rank-hist --levels 3 --m 3 --ranks 2,4,8 "
                                "--trials 200 --seed 42 --operator relu-max";
  const int h1 = run(hist_args + " --out " + hist1.string());
  const int h2 = run(hist_args + " --out " + hist2.string() + " --jobs 2");
  bool hist_ok = h1 == 0 && h2 == 0;
  for (int width : {2, 4, 8}) {
    const std::string name = "rank_hist_L3_M3_r" + std::to_string(width) + ".csv";
    const std::string a = slurp(hist1 / name);
    hist_ok = hist_ok && !a.empty() && a == slurp(hist2 / name);
  }

  report(10, verify_ok && hist_ok,
         format("determinism: verify reports %s, histogram CSVs %s (jobs 1 "
                "vs 2)",
                verify_ok ? "byte-identical" : "DIFFER",
                hist_ok ? "byte-identical" : "DIFFER"));
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  const double start = now_seconds();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("acceptance: %s (%d failures, %.1f s total)\n",
              g_failures == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT",
              g_failures, now_seconds() - start);
  return g_failures == 0 ? 0 : 1;
}
