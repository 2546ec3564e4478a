#include "gtd/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtd/analysis.hpp"
#include "gtd/errors.hpp"
#include "gtd/linalg.hpp"
#include "gtd/rng.hpp"

namespace gtd {

namespace {

std::vector<double> ones(int m) {
  return std::vector<double>(static_cast<std::size_t>(m), 1.0);
}

std::vector<double> zeros(int m) {
  return std::vector<double>(static_cast<std::size_t>(m), 0.0);
}

// 1 everywhere except 0 at position d (0-based).
std::vector<double> ebar(int m, int d) {
  std::vector<double> v = ones(m);
  v[static_cast<std::size_t>(d)] = 0.0;
  return v;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

}  // namespace

std::vector<double> separating_direction(
    const std::vector<std::vector<double>>& points, std::uint64_t seed) {
  if (points.empty()) throw Error("separating_direction needs points");
  const std::size_t dim = points[0].size();
  for (const auto& v : points)
    if (v.size() != dim)
      throw ShapeError("separating_direction points must share one dimension");

  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<double> w(dim);
    double norm2 = 0.0;
    for (double& x : w) {
      x = rng.symmetric();
      norm2 += x * x;
    }
    const double norm = std::sqrt(norm2);
    if (norm < 1e-6) continue;
    for (double& x : w) x /= norm;
    // Canonical sign keeps the output a deterministic function of the draw.
    for (double x : w) {
      if (x == 0.0) continue;
      if (x < 0.0)
        for (double& y : w) y = -y;
      break;
    }

    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        double diff = 0.0;
        for (std::size_t d = 0; d < dim; ++d)
          diff += w[d] * (points[i][d] - points[j][d]);
        min_gap = std::min(min_gap, std::fabs(diff));
      }
    if (min_gap >= 1e-9) return w;
  }
  throw RetryError(
      "no separating direction after 64 attempts; points are nearly "
      "coincident");
}

NondegenerateReprs nondegenerate_reprs(const Templates& t, NeuronKind kind,
                                       std::uint64_t seed) {
  const int m = t.count();
  const std::vector<double> w = separating_direction(t.all(), seed);

  std::vector<double> proj(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i)
    for (int d = 0; d < t.dim(); ++d)
      proj[static_cast<std::size_t>(i)] +=
          w[static_cast<std::size_t>(d)] * t.vec(i)[static_cast<std::size_t>(d)];

  std::vector<double> sorted = proj;
  std::sort(sorted.begin(), sorted.end());

  // -p_M < b_M < ... < -p_1 < b_1 with each bias at its interval midpoint;
  // b_1 sits half the first gap above -p_1 (0.5 when there is one template).
  std::vector<double> biases(static_cast<std::size_t>(m), 0.0);
  biases[0] = -sorted[0] + (m >= 2 ? (sorted[1] - sorted[0]) / 2.0 : 0.5);
  for (int j = 1; j < m; ++j)
    biases[static_cast<std::size_t>(j)] =
        -(sorted[static_cast<std::size_t>(j)] +
          sorted[static_cast<std::size_t>(j - 1)]) /
        2.0;

  std::vector<std::vector<double>> weights(static_cast<std::size_t>(m), w);

  Certificate cert;
  cert.seed = seed;
  cert.pass = true;

  if (kind == NeuronKind::relu) {
    cert.claim = "nondegenerate-reprs-relu";
    ReprFamily family = ReprFamily::relu_neurons(weights, biases);
    Matrix f = build_repr_matrix(t, family);
    const double det = linalg::determinant(f);
    cert.tolerance = 0.0;
    cert.require("abs_det", std::fabs(det) > 0.0, std::fabs(det));

    // Sorting templates by projection must expose a lower-triangular F with
    // a strictly positive diagonal.
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return proj[static_cast<std::size_t>(a)] < proj[static_cast<std::size_t>(b)];
    });
    double above = 0.0;
    double min_diag = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double v = f(order[static_cast<std::size_t>(i)], j);
        if (j > i) above = std::max(above, std::fabs(v));
        if (j == i) min_diag = std::min(min_diag, v);
      }
    }
    cert.require("upper_part", above == 0.0, above);
    cert.require("min_diag", min_diag > 0.0, min_diag);
    return {std::move(family), std::move(f), det, std::move(cert)};
  }

  cert.claim = "nondegenerate-reprs-sigmoid";
  cert.tolerance = 1e-8;
  double alpha = 1.0;
  while (true) {
    ReprFamily family = ReprFamily::sigmoid_neurons(weights, biases, alpha);
    Matrix f = build_repr_matrix(t, family);
    const double det = linalg::determinant(f);
    if (std::fabs(det) >= 1e-8) {
      cert.require("abs_det", true, std::fabs(det));
      cert.require("alpha", true, alpha);
      return {std::move(family), std::move(f), det, std::move(cert)};
    }
    if (alpha >= std::ldexp(1.0, 40))
      throw RetryError("sigmoid scale exceeded 2^40 without |det F| >= 1e-8");
    alpha *= 2.0;
  }
}

Templates templates_for_reprs(const ReprFamily& r, int dim,
                              std::uint64_t seed) {
  const int m = r.size();
  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < 256; ++attempt) {
    std::vector<Patch> vecs(static_cast<std::size_t>(m));
    for (Patch& v : vecs) {
      v.resize(static_cast<std::size_t>(dim));
      for (double& x : v) x = rng.symmetric();
    }
    Templates t(std::move(vecs));
    const Matrix f = build_repr_matrix(t, r);
    if (std::fabs(linalg::determinant(f)) >= 1e-10) return t;
  }
  throw RetryError(
      "no templates with |det F| >= 1e-10 after 256 attempts; the "
      "representation functions look linearly dependent");
}

DepthEffWitness depth_eff_ht_weights(int m, int r0, int n, const Matrix& f) {
  if (m < 1 || r0 < 1) throw ShapeError("need m >= 1 and r0 >= 1");
  HtParams p;
  p.m = m;
  p.n = n;
  int levels = 0;
  while ((1 << levels) < n) ++levels;
  if ((1 << levels) != n || n < 2)
    throw ShapeError("n must be a power of two >= 2");
  p.widths.assign(static_cast<std::size_t>(levels), r0);

  p.level0.resize(static_cast<std::size_t>(n));
  for (auto& loc : p.level0) {
    loc.resize(static_cast<std::size_t>(r0));
    for (int c = 0; c < r0; ++c)
      loc[static_cast<std::size_t>(c)] =
          c < m ? linalg::solve(f, ebar(m, c)) : zeros(m);
  }
  p.levels.resize(static_cast<std::size_t>(levels - 1));
  for (int l = 1; l < levels; ++l) {
    auto& level = p.levels[static_cast<std::size_t>(l - 1)];
    level.resize(static_cast<std::size_t>(n >> l));
    for (auto& loc : level) {
      loc.resize(static_cast<std::size_t>(r0));
      for (int c = 0; c < r0; ++c)
        loc[static_cast<std::size_t>(c)] = c == 0 ? ones(r0) : zeros(r0);
    }
  }
  p.output = ones(r0);

  DepthEffWitness witness{std::move(p), Matrix(1, 1), 0, {}};
  witness.matricized = matricized_ht(witness.params, f, PoolOperator::relu_max());

  const int c = std::min(r0, m);
  std::int64_t diag_cells = 1;
  for (int i = 0; i < n / 2; ++i) diag_cells *= c;

  // Expected structure: the value c everywhere, c-1 on the diagonal cells
  // whose base-m digits all stay below c.
  const Matrix& w = witness.matricized;
  double structure_err = 0.0;
  for (int r = 0; r < w.rows(); ++r) {
    bool digits_below = true;
    int rr = r;
    for (int i = 0; i < n / 2; ++i) {
      if (rr % m >= c) digits_below = false;
      rr /= m;
    }
    for (int cc = 0; cc < w.cols(); ++cc) {
      const double expected =
          (r == cc && digits_below) ? static_cast<double>(c - 1)
                                    : static_cast<double>(c);
      structure_err = std::max(structure_err, std::fabs(w(r, cc) - expected));
    }
  }

  const RankResult rank = numerical_rank(witness.matricized);
  witness.rank = rank.rank;

  Certificate& cert = witness.cert;
  cert.claim = "depth-eff-witness";
  cert.tolerance = 1e-9;
  cert.pass = true;
  cert.require("structure_err", structure_err <= cert.tolerance, structure_err);
  cert.require("rank", rank.rank >= diag_cells, static_cast<double>(rank.rank));
  cert.require("rank_lower_bound", true, static_cast<double>(diag_cells));

  // Separation against the shallow ceiling Z*M*N/2 for every channel count
  // below the claimed threshold.
  const double z_bound =
      static_cast<double>(diag_cells) * 2.0 / (static_cast<double>(m) * n);
  cert.require("z_lower_bound", true, z_bound);
  for (int z = 1; z < z_bound; ++z) {
    const double ceiling = static_cast<double>(z) * m * n / 2.0;
    cert.require("exceeds_ceiling_z" + std::to_string(z),
                 witness.rank > ceiling, ceiling);
  }
  return witness;
}

std::optional<std::vector<double>> is_basic(const Tensor& a, double tol) {
  const int n = a.order();
  const int m = a.dim(0);
  for (int i = 0; i < n; ++i)
    if (a.dim(i) != m)
      throw ShapeError("is_basic requires equal dimensions per mode");

  std::vector<double> u(static_cast<std::size_t>(m), 0.0);
  MultiIndex diag = MultiIndex::ones(n);
  for (int d = 0; d < m; ++d) {
    for (int i = 0; i < n; ++i) diag[i] = d + 1;
    const double value = a.at(diag);
    if (value < -tol) return std::nullopt;
    u[static_cast<std::size_t>(d)] = value > 0.0 ? value : 0.0;
  }
  for (int d = 1; d < m; ++d)
    if (u[static_cast<std::size_t>(d)] < u[static_cast<std::size_t>(d - 1)] - tol)
      return std::nullopt;

  MultiIndex idx = MultiIndex::ones(n);
  std::size_t flat = 0;
  do {
    double expected = 0.0;
    for (int i = 0; i < n; ++i)
      expected = std::max(expected, u[static_cast<std::size_t>(idx[i] - 1)]);
    if (std::fabs(a[flat++] - expected) > tol) return std::nullopt;
  } while (idx.advance(a.shape()));
  return u;
}

namespace {

struct TrivialSetting {
  HtParams deep;
  std::optional<SharedHtParams> shared_deep;
};

TrivialSetting build_trivial_deep(int m, const std::vector<int>& widths,
                                  int n, const Matrix& f, TrivialVariant v) {
  int levels = 0;
  while ((1 << levels) < n) ++levels;
  if ((1 << levels) != n || n < 2)
    throw ShapeError("n must be a power of two >= 2");
  if (static_cast<int>(widths.size()) != levels)
    throw ShapeError("need one width per level");

  if (v == TrivialVariant::shared) {
    SharedHtParams p;
    p.m = m;
    p.n = n;
    p.widths = widths;
    std::vector<double> ramp(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d) ramp[static_cast<std::size_t>(d)] = d + 1;
    const std::vector<double> solved = linalg::solve(f, ramp);
    p.level0.assign(static_cast<std::size_t>(widths[0]), solved);
    p.levels.resize(static_cast<std::size_t>(levels - 1));
    for (int l = 1; l < levels; ++l)
      p.levels[static_cast<std::size_t>(l - 1)].assign(
          static_cast<std::size_t>(widths[static_cast<std::size_t>(l)]),
          ones(widths[static_cast<std::size_t>(l - 1)]));
    p.output = ones(widths.back());
    return {unshare(p), std::move(p)};
  }

  HtParams p;
  p.m = m;
  p.n = n;
  p.widths = widths;
  const std::vector<double> ones_solve = linalg::solve(f, ones(m));
  p.level0.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    p.level0[static_cast<std::size_t>(j)].assign(
        static_cast<std::size_t>(widths[0]),
        j % 2 == 0 ? ones_solve : zeros(m));  // 1-based odd locations
  p.levels.resize(static_cast<std::size_t>(levels - 1));
  for (int l = 1; l < levels; ++l) {
    auto& level = p.levels[static_cast<std::size_t>(l - 1)];
    level.resize(static_cast<std::size_t>(n >> l));
    for (int j = 0; j < (n >> l); ++j)
      level[static_cast<std::size_t>(j)].assign(
          static_cast<std::size_t>(widths[static_cast<std::size_t>(l)]),
          j % 2 == 0 ? ones(widths[static_cast<std::size_t>(l - 1)])
                     : zeros(widths[static_cast<std::size_t>(l - 1)]));
  }
  p.output = ones(widths.back());
  return {std::move(p), std::nullopt};
}

// Z = 1 shallow parameters reproducing a tensor of the form
// v (x) ones (x) ... (x) ones, with v read off the first mode.
CpParams resolve_realizer(const Tensor& deep, int m, int n, const Matrix& f,
                          TrivialVariant v) {
  CpParams shallow;
  shallow.m = m;
  shallow.n = n;
  shallow.output = {1.0};
  shallow.conv.resize(1);
  auto& channel = shallow.conv[0];

  if (v == TrivialVariant::shared) {
    const auto u = is_basic(deep);
    if (!u) throw Error("shared trivial tensor is not basic");
    channel.assign(static_cast<std::size_t>(n), linalg::solve(f, *u));
    return shallow;
  }

  std::vector<double> v_first(static_cast<std::size_t>(m));
  MultiIndex idx = MultiIndex::ones(n);
  for (int d = 0; d < m; ++d) {
    idx[0] = d + 1;
    v_first[static_cast<std::size_t>(d)] = deep.at(idx);
  }
  channel.resize(static_cast<std::size_t>(n));
  channel[0] = linalg::solve(f, v_first);
  for (int i = 1; i < n; ++i)
    channel[static_cast<std::size_t>(i)] =
        v == TrivialVariant::cross_product ? linalg::solve(f, ones(m))
                                           : zeros(m);
  return shallow;
}

void perturb(std::vector<double>& v, SplitMix64& rng, double eps) {
  for (double& x : v) x += rng.uniform(-eps, eps);
}

Matrix perturbed_f(const Matrix& f, SplitMix64& rng, double eps) {
  Matrix out = f;
  for (double& x : out.storage()) x += rng.uniform(-eps, eps);
  return out;
}

}  // namespace

TrivialWeights trivial_ht_weights(int m, const std::vector<int>& widths,
                                  int n, const Matrix& f, TrivialVariant v,
                                  std::uint64_t seed, int perturb_seeds,
                                  double eps) {
  TrivialSetting setting = build_trivial_deep(m, widths, n, f, v);
  const PoolOperator relu_max = PoolOperator::relu_max();
  const PoolOperator shallow_op = v == TrivialVariant::cross_product
                                      ? PoolOperator::product()
                                      : relu_max;

  TrivialWeights out;
  out.variant = v;
  out.deep = setting.deep;
  out.shared_deep = setting.shared_deep;
  out.shallow_op = shallow_op;

  Certificate& cert = out.cert;
  cert.claim = "trivial-ht-weights";
  cert.seed = seed;
  cert.tolerance = 1e-9;
  cert.pass = true;

  const Tensor deep_tensor = generalized_ht(out.deep, f, relu_max);
  out.shallow = resolve_realizer(deep_tensor, m, n, f, v);
  const Tensor shallow_tensor = generalized_cp(out.shallow, f, shallow_op);
  const double base_err = max_abs_diff(deep_tensor, shallow_tensor);
  cert.require("realizer_err", base_err <= 1e-9, base_err);

  if (v == TrivialVariant::shared) {
    cert.require("basic", is_basic(deep_tensor).has_value(), 1.0);
  } else {
    const int rank = numerical_rank(matricize(deep_tensor)).rank;
    cert.require("matricized_rank", rank == 1, static_cast<double>(rank));
  }

  // Stability of the realization under noise on every deep weight and on F.
  // A failed round retries once at half the magnitude.
  double worst_perturbed_err = 0.0;
  int failed_rounds = 0;
  double eps_used = eps;
  for (int s = 0; s < perturb_seeds; ++s) {
    SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(s)));
    bool round_ok = false;
    double round_eps = eps;
    for (int attempt = 0; attempt < 2 && !round_ok; ++attempt) {
      const Matrix f_noisy = perturbed_f(f, rng, round_eps);
      Tensor noisy_tensor(Shape{1});
      if (v == TrivialVariant::shared) {
        SharedHtParams noisy = *setting.shared_deep;
        for (auto& vec : noisy.level0) perturb(vec, rng, round_eps);
        for (auto& level : noisy.levels)
          for (auto& vec : level) perturb(vec, rng, round_eps);
        perturb(noisy.output, rng, round_eps);
        noisy_tensor = shared_ht(noisy, f_noisy, relu_max);
      } else {
        HtParams noisy = setting.deep;
        for (auto& loc : noisy.level0)
          for (auto& vec : loc) perturb(vec, rng, round_eps);
        for (auto& level : noisy.levels)
          for (auto& loc : level)
            for (auto& vec : loc) perturb(vec, rng, round_eps);
        perturb(noisy.output, rng, round_eps);
        noisy_tensor = generalized_ht(noisy, f_noisy, relu_max);
      }

      bool shape_ok = true;
      if (v == TrivialVariant::shared) {
        shape_ok = is_basic(noisy_tensor).has_value();
      } else {
        shape_ok = numerical_rank(matricize(noisy_tensor)).rank == 1;
      }
      if (shape_ok) {
        const CpParams realizer = resolve_realizer(noisy_tensor, m, n, f, v);
        const Tensor realized = generalized_cp(realizer, f, shallow_op);
        const double err = max_abs_diff(noisy_tensor, realized);
        worst_perturbed_err = std::max(worst_perturbed_err, err);
        round_ok = err <= 1e-6;
      }
      if (!round_ok) round_eps /= 2.0;
      eps_used = std::min(eps_used, round_eps);
    }
    if (!round_ok) ++failed_rounds;
  }
  cert.require("perturbed_err", failed_rounds == 0, worst_perturbed_err);
  cert.require("perturb_rounds", true, static_cast<double>(perturb_seeds));
  cert.require("eps", true, eps_used);
  return out;
}

PiecewiseAffine piecewise_affine_interpolate(
    const std::vector<std::vector<double>>& points,
    std::span<const double> targets, std::uint64_t seed) {
  const int k = static_cast<int>(points.size());
  if (k < 1) throw Error("need at least one point");
  if (static_cast<int>(targets.size()) != k)
    throw ShapeError("need one target per point");

  const std::vector<double> u = separating_direction(points, seed);
  std::vector<double> q(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < k; ++i)
    for (std::size_t d = 0; d < u.size(); ++d)
      q[static_cast<std::size_t>(i)] +=
          u[d] * points[static_cast<std::size_t>(i)][d];

  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return q[static_cast<std::size_t>(a)] < q[static_cast<std::size_t>(b)];
  });

  PiecewiseAffine out;
  out.w.assign(static_cast<std::size_t>(k), u);
  out.b.resize(static_cast<std::size_t>(k));
  out.a.resize(static_cast<std::size_t>(k));

  auto qs = [&](int j) { return q[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])]; };
  auto cs = [&](int j) { return targets[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])]; };

  out.b[0] = -qs(0) + 1.0;
  out.a[0] = cs(0);
  double a_sum = out.a[0];
  for (int j = 1; j < k; ++j) {
    out.b[static_cast<std::size_t>(j)] = -qs(j - 1);
    const double slope = (cs(j) - cs(j - 1)) / (qs(j) - qs(j - 1));
    out.a[static_cast<std::size_t>(j)] = slope - a_sum;
    a_sum += out.a[static_cast<std::size_t>(j)];
  }

  Certificate& cert = out.cert;
  cert.claim = "piecewise-affine-interpolation";
  cert.seed = seed;
  cert.tolerance = 1e-8;
  cert.pass = true;
  for (int i = 0; i < k; ++i) {
    double value = 0.0;
    for (int j = 0; j < k; ++j) {
      const double arg = q[static_cast<std::size_t>(i)] +
                         out.b[static_cast<std::size_t>(j)];
      if (arg > 0.0) value += out.a[static_cast<std::size_t>(j)] * arg;
    }
    const double c = targets[static_cast<std::size_t>(i)];
    const double rel =
        std::fabs(value - c) / std::max(1.0, std::fabs(c));
    out.max_residual = std::max(out.max_residual, rel);
  }
  cert.require("max_relative_residual", out.max_residual <= cert.tolerance,
               out.max_residual);
  return out;
}

FcUniversal fc_universal_weights(const Tensor& target, const Matrix& f,
                                 std::uint64_t seed) {
  const int n = target.order();
  const int m = f.rows();
  if (f.cols() != m) throw ShapeError("representation matrix must be square");
  for (int i = 0; i < n; ++i)
    if (target.dim(i) != m)
      throw ShapeError("target dimensions must all equal m");

  // Structural preconditions: a constant nonzero column and distinct rows.
  int const_col = -1;
  for (int j = 0; j < m && const_col < 0; ++j) {
    bool constant = f(0, j) != 0.0;
    for (int i = 1; i < m && constant; ++i)
      if (f(i, j) != f(0, j)) constant = false;
    if (constant) const_col = j;
  }
  if (const_col < 0)
    throw Error("F must have a constant nonzero column");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      bool equal = true;
      for (int d = 0; d < m && equal; ++d)
        if (f(i, d) != f(j, d)) equal = false;
      if (equal) throw Error("F must have pairwise distinct rows");
    }
  const double c = f(0, const_col);

  FcUniversal out;
  Certificate& cert = out.cert;
  cert.claim = "fc-universal-weights";
  cert.seed = seed;
  cert.tolerance = 1e-9;
  cert.pass = true;

  if (m == 1) {
    // One grid point; one unit through the constant column suffices.
    Matrix hidden(n, 1);
    hidden(0, 0) = 1.0 / c;
    out.params.hidden = {std::move(hidden)};
    out.params.output = {target[0]};
  } else {
    // Grid points as flattened feature matrices with the constant column
    // removed; they are pairwise distinct because F's rows are.
    const int d_flat = n * (m - 1);
    std::vector<std::vector<double>> points;
    std::vector<double> values;
    MultiIndex idx = MultiIndex::ones(n);
    std::size_t flat = 0;
    do {
      std::vector<double> v(static_cast<std::size_t>(d_flat));
      int pos = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
          if (j == const_col) continue;
          v[static_cast<std::size_t>(pos++)] = f(idx[i] - 1, j);
        }
      points.push_back(std::move(v));
      values.push_back(target[flat++]);
    } while (idx.advance(target.shape()));

    const PiecewiseAffine pa =
        piecewise_affine_interpolate(points, values, seed);
    cert.require("interp_residual", pa.cert.pass, pa.max_residual);

    const int z_count = static_cast<int>(points.size());
    out.params.hidden.reserve(static_cast<std::size_t>(z_count));
    for (int z = 0; z < z_count; ++z) {
      Matrix a(n, m);
      int pos = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
          if (j == const_col) continue;
          a(i, j) = pa.w[static_cast<std::size_t>(z)]
                        [static_cast<std::size_t>(pos++)];
        }
      // Fold the bias into the removed column: b_z = c * sum_i a(i, col).
      a(0, const_col) = pa.b[static_cast<std::size_t>(z)] / c;
      out.params.hidden.push_back(std::move(a));
    }
    out.params.output = pa.a;
  }

  const Tensor realized = fc_grid_tensor(out.params, f, n);
  const double err = max_abs_diff(realized, target);
  cert.require("grid_err", err <= cert.tolerance, err);
  cert.require("z", true, static_cast<double>(out.params.z()));
  return out;
}

IndicatorCp indicator_cp(const MultiIndex& index, int m, int n,
                         const Matrix& f) {
  if (index.order() != n) throw ShapeError("index order must equal n");
  for (int i = 0; i < n; ++i)
    if (index[i] < 1 || index[i] > m)
      throw ShapeError("index entries must lie in [1, m]");

  IndicatorCp out;
  out.params.m = m;
  out.params.n = n;
  out.params.output = {1.0, -1.0};
  out.params.conv.resize(2);
  const std::vector<double> ones_solve = linalg::solve(f, ones(m));
  out.params.conv[0].assign(static_cast<std::size_t>(n), ones_solve);
  out.params.conv[1].resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out.params.conv[1][static_cast<std::size_t>(i)] =
        linalg::solve(f, ebar(m, index[i] - 1));

  Certificate& cert = out.cert;
  cert.claim = "indicator-cp";
  cert.tolerance = 1e-9;
  cert.pass = true;
  const Tensor realized =
      generalized_cp(out.params, f, PoolOperator::relu_max());
  Tensor expected(Shape(static_cast<std::size_t>(n), m));
  expected.at(index) = 1.0;
  const double err = max_abs_diff(realized, expected);
  cert.require("max_err", err <= cert.tolerance, err);
  return out;
}

}  // namespace gtd
