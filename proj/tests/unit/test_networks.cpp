#include <doctest.h>

#include <cmath>

#include "gtd/analysis.hpp"
#include "gtd/constructions.hpp"
#include "gtd/decompositions.hpp"
#include "gtd/errors.hpp"
#include "gtd/networks.hpp"
#include "gtd/rng.hpp"

using namespace gtd;

namespace {

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

double max_abs_diff(const Tensor& a, const Tensor& b) {
  REQUIRE(a.shape() == b.shape());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

// Distinct templates in R^3 plus certified relu representations.
struct Setup {
  Templates templates;
  ReprFamily reps;
  Matrix f;
};

Setup certified_setup(int m, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Patch> vecs;
  for (int i = 0; i < m; ++i) vecs.push_back(random_vec(3, rng));
  Templates t(vecs);
  NondegenerateReprs nd = nondegenerate_reprs(t, NeuronKind::relu, seed);
  return {std::move(t), std::move(nd.family), std::move(nd.f)};
}

}  // namespace

TEST_CASE("identity-onehot representations give the identity matrix") {
  const Templates t({{0.5, 1.0}, {2.0, -1.0}, {0.0, 0.0}});
  const ReprFamily onehot = ReprFamily::identity_onehot(t);
  CHECK(build_repr_matrix(t, onehot) == Matrix::identity(3));
}

TEST_CASE("relu neuron representation matrix matches the worked values") {
  const Templates t({{0.0}, {1.0}, {2.0}});
  const ReprFamily reps = ReprFamily::relu_neurons(
      {{1.0}, {1.0}, {1.0}}, {0.5, -0.5, -1.5});
  const Matrix f = build_repr_matrix(t, reps);
  const Matrix expected(3, 3, {0.5, 0.0, 0.0, 1.5, 0.5, 0.0, 2.5, 1.5, 0.5});
  CHECK(f == expected);
}

TEST_CASE("permuting templates permutes the rows of F") {
  const Setup s = certified_setup(3, 77);
  std::vector<Patch> reordered{s.templates.vec(2), s.templates.vec(0),
                               s.templates.vec(1)};
  const Matrix f2 = build_repr_matrix(Templates(reordered), s.reps);
  for (int j = 0; j < 3; ++j) {
    CHECK(f2(0, j) == s.f(2, j));
    CHECK(f2(1, j) == s.f(0, j));
    CHECK(f2(2, j) == s.f(1, j));
  }
}

TEST_CASE("shallow network grid tensor equals the CP decomposition") {
  const Setup s = certified_setup(2, 101);
  SplitMix64 rng(5);
  for (const PoolOperator& g : PoolOperator::all()) {
    const CpParams p = random_cp(2, 4, 3, rng);
    const Tensor grid = grid_tensor(
        [&](std::span<const Patch> patches) {
          return shallow_score(patches, p, s.reps, g);
        },
        s.templates, 4);
    CHECK(max_abs_diff(grid, generalized_cp(p, s.f, g)) <= 1e-12);
  }
}

TEST_CASE("deep network grid tensor equals the HT decomposition") {
  const Setup s = certified_setup(2, 103);
  SplitMix64 rng(7);
  for (const PoolOperator& g : PoolOperator::all()) {
    const HtParams p = random_ht(2, 4, {2, 3}, rng);
    const Tensor grid = grid_tensor(
        [&](std::span<const Patch> patches) {
          return deep_score(patches, p, s.reps, g);
        },
        s.templates, 4);
    CHECK(max_abs_diff(grid, generalized_ht(p, s.f, g)) <= 1e-12);
  }
}

TEST_CASE("reduced deep weights match the shallow network off the grid") {
  const Setup s = certified_setup(2, 107);
  SplitMix64 rng(9);
  const CpParams cp = random_cp(2, 4, 3, rng);
  const HtParams ht = ht_from_cp(cp);
  for (const PoolOperator& g : PoolOperator::all()) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Patch> patches;
      for (int i = 0; i < 4; ++i) patches.push_back(random_vec(3, rng));
      const double shallow = shallow_score(patches, cp, s.reps, g);
      const double deep = deep_score(patches, ht, s.reps, g);
      CHECK(std::fabs(shallow - deep) <= 1e-12);
    }
  }
}

TEST_CASE("relu-max zeroes out channels whose conv values are negative") {
  const ReprFamily coords = ReprFamily::raw_coordinates(2);
  HtParams p;
  p.m = 2;
  p.n = 4;
  p.widths = {2, 2};
  p.level0.assign(4, std::vector<std::vector<double>>(
                         2, std::vector<double>{-1.0, -1.0}));
  p.levels = {{{{1.0, 1.0}, {1.0, 1.0}}, {{1.0, 1.0}, {1.0, 1.0}}}};
  p.output = {1.0, 1.0};
  // Positive patches against negative conv weights: every conv value is
  // negative, so each pooling step clips to zero all the way up.
  const std::vector<Patch> patches(4, Patch{0.5, 0.25});
  CHECK(deep_score(patches, p, coords, PoolOperator::relu_max()) == 0.0);
}

TEST_CASE("coordinate projections on basis templates give F = I") {
  const Templates basis({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}});
  CHECK(build_repr_matrix(basis, ReprFamily::raw_coordinates(3)) ==
        Matrix::identity(3));
}

TEST_CASE("all-zero weights give zero scores under relu operators") {
  const Setup s = certified_setup(2, 109);
  CpParams p;
  p.m = 2;
  p.n = 4;
  p.conv.assign(2, std::vector<std::vector<double>>(
                       4, std::vector<double>(2, 0.0)));
  p.output = {0.0, 0.0};
  std::vector<Patch> patches(4, Patch{0.3, -0.2, 0.9});
  CHECK(shallow_score(patches, p, s.reps, PoolOperator::relu_max()) == 0.0);
  CHECK(shallow_score(patches, p, s.reps, PoolOperator::relu_sum()) == 0.0);
}

TEST_CASE("product operator with one channel multiplies conv values") {
  const ReprFamily coords = ReprFamily::raw_coordinates(2);
  CpParams p;
  p.m = 2;
  p.n = 3;
  p.conv = {{{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}};
  p.output = {1.0};
  const std::vector<Patch> patches{{2.0, 5.0}, {3.0, 4.0}, {1.0, 1.0}};
  // conv values: 2, 4, 2 -> product 16
  CHECK(shallow_score(patches, p, coords, PoolOperator::product()) == 16.0);
}

TEST_CASE("relu-sum scores scale linearly in the output weights") {
  const Setup s = certified_setup(2, 113);
  SplitMix64 rng(11);
  const CpParams p = random_cp(2, 4, 3, rng);
  CpParams doubled = p;
  for (double& w : doubled.output) w *= 2.0;
  std::vector<Patch> patches;
  for (int i = 0; i < 4; ++i) patches.push_back(random_vec(3, rng));
  const double base = shallow_score(patches, p, s.reps, PoolOperator::relu_sum());
  const double twice =
      shallow_score(patches, doubled, s.reps, PoolOperator::relu_sum());
  CHECK(twice == doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("multiple output heads evaluate against shared conv weights") {
  const Setup s = certified_setup(2, 127);
  SplitMix64 rng(13);
  const CpParams p = random_cp(2, 4, 3, rng);
  const std::vector<std::vector<double>> heads{{1.0, 0.0, 0.0},
                                               {0.0, 2.0, -1.0}};
  std::vector<Patch> patches;
  for (int i = 0; i < 4; ++i) patches.push_back(random_vec(3, rng));
  const auto scores =
      shallow_scores(patches, p, heads, s.reps, PoolOperator::relu_max());
  REQUIRE(scores.size() == 2);
  CpParams h1 = p;
  h1.output = heads[0];
  CpParams h2 = p;
  h2.output = heads[1];
  CHECK(scores[0] == shallow_score(patches, h1, s.reps, PoolOperator::relu_max()));
  CHECK(scores[1] == shallow_score(patches, h2, s.reps, PoolOperator::relu_max()));
}

namespace {

WxhParams random_wxh(int m, int n, int k, int z, SplitMix64& rng) {
  WxhParams p;
  p.k = k;
  p.conv.resize(static_cast<std::size_t>(z));
  for (auto& channel : p.conv)
    for (int i = 0; i < n; ++i)
      channel.push_back(Matrix(m, k, random_vec(m * k, rng)));
  p.output = random_vec(z, rng);
  return p;
}

}  // namespace

TEST_CASE("window size one reduces to the shallow relu-sum network over N") {
  const Setup s = certified_setup(2, 131);
  SplitMix64 rng(17);
  const int n = 4;
  const WxhParams wp = random_wxh(2, n, 1, 3, rng);
  CpParams cp;
  cp.m = 2;
  cp.n = n;
  cp.conv.resize(wp.conv.size());
  for (std::size_t z = 0; z < wp.conv.size(); ++z)
    for (int i = 0; i < n; ++i) {
      std::vector<double> column(2);
      for (int d = 0; d < 2; ++d) column[static_cast<std::size_t>(d)] = wp.conv[z][static_cast<std::size_t>(i)](d, 0);
      cp.conv[z].push_back(column);
    }
  cp.output = wp.output;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Patch> patches;
    for (int i = 0; i < n; ++i) patches.push_back(random_vec(3, rng));
    const double widened = wxh_score(patches, wp, s.reps);
    const double shallow =
        shallow_score(patches, cp, s.reps, PoolOperator::relu_sum());
    CHECK(widened == doctest::Approx(shallow / n).epsilon(1e-12));
  }
}

TEST_CASE("wxh grid tensor matches exhaustive score evaluation") {
  // Standard-basis templates with raw coordinates give F = I, so the grid
  // formula and the live forward pass must coincide.
  const int m = 2, n = 4, k = 2;
  const Templates basis({{1.0, 0.0}, {0.0, 1.0}});
  const ReprFamily coords = ReprFamily::raw_coordinates(m);
  SplitMix64 rng(19);
  const WxhParams p = random_wxh(m, n, k, 2, rng);
  const Tensor direct = wxh_grid_tensor(p, Matrix::identity(m), n);
  const Tensor via_scores = grid_tensor(
      [&](std::span<const Patch> patches) {
        return wxh_score(patches, p, coords);
      },
      basis, n);
  CHECK(max_abs_diff(direct, via_scores) <= 1e-12);
}

TEST_CASE("wxh grid tensors stay below the N*M^(K-1) rank bound") {
  SplitMix64 rng(23);
  const int m = 2, n = 8, k = 2;
  int bound = n;
  for (int i = 0; i < k - 1; ++i) bound *= m;
  for (int trial = 0; trial < 30; ++trial) {
    const WxhParams p = random_wxh(m, n, k, 3, rng);
    const Tensor grid = wxh_grid_tensor(p, Matrix::identity(m), n);
    CHECK(numerical_rank(matricize(grid)).rank <= bound);
  }
}

TEST_CASE("wxh zero output weights give the zero tensor") {
  SplitMix64 rng(29);
  WxhParams p = random_wxh(2, 4, 2, 2, rng);
  for (double& w : p.output) w = 0.0;
  const Tensor grid = wxh_grid_tensor(p, Matrix::identity(2), 4);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(grid[i] == 0.0);
}

TEST_CASE("wxh rejects windows as large as the spatial extent") {
  SplitMix64 rng(31);
  const WxhParams p = random_wxh(2, 4, 4, 1, rng);
  CHECK_THROWS_AS(wxh_grid_tensor(p, Matrix::identity(2), 4), ShapeError);
  CHECK(wxh_regime_bound(8, 2) == doctest::Approx(2.0));
}

TEST_CASE("fully-connected scores and grid tensors") {
  const int m = 2, n = 3;
  const Templates basis({{1.0, 0.0}, {0.0, 1.0}});
  const ReprFamily coords = ReprFamily::raw_coordinates(m);
  SplitMix64 rng(37);

  FcParams p;
  p.hidden = {Matrix(n, m, random_vec(n * m, rng)),
              Matrix(n, m, random_vec(n * m, rng))};
  p.output = random_vec(2, rng);

  const Tensor direct = fc_grid_tensor(p, Matrix::identity(m), n);
  const Tensor via_scores = grid_tensor(
      [&](std::span<const Patch> patches) { return fc_score(patches, p, coords); },
      basis, n);
  CHECK(max_abs_diff(direct, via_scores) <= 1e-12);

  // Zero hidden weights: constant zero score.
  FcParams zero;
  zero.hidden = {Matrix(n, m)};
  zero.output = {3.0};
  const std::vector<Patch> patches{{0.2, 0.4}, {1.0, -1.0}, {0.0, 0.0}};
  CHECK(fc_score(patches, zero, coords) == 0.0);

  // Output weights scale scores linearly.
  FcParams scaled = p;
  for (double& w : scaled.output) w *= -2.5;
  CHECK(fc_score(patches, scaled, coords) ==
        doctest::Approx(-2.5 * fc_score(patches, p, coords)).epsilon(1e-12));
}

TEST_CASE("grid tensor of a constant score is constant") {
  const Templates basis({{1.0, 0.0}, {0.0, 1.0}});
  const Tensor t = grid_tensor(
      [](std::span<const Patch>) { return 2.5; }, basis, 3);
  CHECK(t.shape() == Shape{2, 2, 2});
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == 2.5);
}

TEST_CASE("templates must be pairwise distinct") {
  CHECK_THROWS_AS(Templates({{1.0, 2.0}, {1.0, 2.0}}), ShapeError);
  CHECK_THROWS_AS(Templates({{1.0}, {1.0, 2.0}}), ShapeError);
}
