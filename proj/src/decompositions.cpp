#include "gtd/decompositions.hpp"

#include <cmath>
#include <string>

#include "gtd/errors.hpp"
#include "gtd/linalg.hpp"

namespace gtd {

namespace {

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

int log2_exact(int n) {
  int l = 0;
  while ((1 << l) < n) ++l;
  return l;
}

void check_vector(const std::vector<double>& v, int len, const char* what) {
  if (static_cast<int>(v.size()) != len)
    throw ShapeError(std::string(what) + " has length " +
                     std::to_string(v.size()) + ", expected " +
                     std::to_string(len));
}

Shape cube_shape(int m, int n) {
  return Shape(static_cast<std::size_t>(n), m);
}

// Post-representation vectors F * conv for one CP channel set.
std::vector<std::vector<double>> apply_f(
    const Matrix& f, const std::vector<std::vector<double>>& vecs) {
  std::vector<std::vector<double>> out;
  out.reserve(vecs.size());
  for (const auto& v : vecs) out.push_back(linalg::apply(f, v));
  return out;
}

}  // namespace

void CpParams::validate() const {
  if (m < 1 || n < 1) throw ShapeError("CP params need m >= 1 and n >= 1");
  if (output.size() != conv.size())
    throw ShapeError("CP output weights must have one entry per channel");
  for (const auto& channel : conv) {
    if (static_cast<int>(channel.size()) != n)
      throw ShapeError("CP channel must carry one vector per location");
    for (const auto& v : channel) check_vector(v, m, "CP conv vector");
  }
}

void SharedCpParams::validate() const {
  if (m < 1 || n < 1)
    throw ShapeError("shared CP params need m >= 1 and n >= 1");
  if (output.size() != conv.size())
    throw ShapeError("shared CP output weights must have one entry per channel");
  for (const auto& v : conv) check_vector(v, m, "shared CP conv vector");
}

void HtParams::validate() const {
  if (m < 1) throw ShapeError("HT params need m >= 1");
  if (!is_power_of_two(n) || n < 2)
    throw ShapeError("HT input size must be a power of two >= 2");
  const int levels_expected = log2_exact(n);
  if (static_cast<int>(widths.size()) != levels_expected)
    throw ShapeError("HT widths must list r_0..r_{L-1} with L = log2(n)");
  for (int w : widths)
    if (w < 1) throw ShapeError("HT widths must be >= 1");
  if (static_cast<int>(level0.size()) != n)
    throw ShapeError("HT level-0 weights must cover all n locations");
  for (const auto& loc : level0) {
    if (static_cast<int>(loc.size()) != widths[0])
      throw ShapeError("HT level-0 weights must have r_0 channels");
    for (const auto& v : loc) check_vector(v, m, "HT level-0 vector");
  }
  if (static_cast<int>(levels.size()) != levels_expected - 1)
    throw ShapeError("HT interior levels must cover l = 1..L-1");
  for (int l = 1; l < levels_expected; ++l) {
    const auto& level = levels[static_cast<std::size_t>(l - 1)];
    if (static_cast<int>(level.size()) != (n >> l))
      throw ShapeError("HT level " + std::to_string(l) +
                       " must cover n/2^l locations");
    for (const auto& loc : level) {
      if (static_cast<int>(loc.size()) != widths[static_cast<std::size_t>(l)])
        throw ShapeError("HT level " + std::to_string(l) +
                         " must have r_l channels");
      for (const auto& v : loc)
        check_vector(v, widths[static_cast<std::size_t>(l - 1)],
                     "HT interior vector");
    }
  }
  check_vector(output, widths.back(), "HT output weights");
}

void SharedHtParams::validate() const { unshare(*this).validate(); }

CpParams unshare(const SharedCpParams& p) {
  p.validate();
  CpParams out;
  out.m = p.m;
  out.n = p.n;
  out.output = p.output;
  out.conv.resize(p.conv.size());
  for (std::size_t z = 0; z < p.conv.size(); ++z)
    out.conv[z].assign(static_cast<std::size_t>(p.n), p.conv[z]);
  return out;
}

HtParams unshare(const SharedHtParams& p) {
  HtParams out;
  out.m = p.m;
  out.n = p.n;
  out.widths = p.widths;
  out.level0.assign(static_cast<std::size_t>(p.n), p.level0);
  out.levels.resize(p.levels.size());
  for (std::size_t l = 0; l < p.levels.size(); ++l)
    out.levels[l].assign(static_cast<std::size_t>(p.n >> (l + 1)),
                         p.levels[l]);
  out.output = p.output;
  return out;
}

namespace {

// Left fold of the channel values at the odd positions (1-based 1,3,5,...),
// then the even positions, then one final g. This grouping mirrors the
// matricized form, so the tensor and matrix routes produce bit-identical
// values under every operator.
double cp_chain_value(const std::vector<std::vector<double>>& post_f,
                      const PoolOperator& g, const MultiIndex& index) {
  const int n = static_cast<int>(post_f.size());
  double odd = post_f[0][static_cast<std::size_t>(index[0] - 1)];
  for (int i = 2; i < n; i += 2)
    odd = g(odd, post_f[static_cast<std::size_t>(i)]
                       [static_cast<std::size_t>(index[i] - 1)]);
  if (n == 1) return odd;
  double even = post_f[1][static_cast<std::size_t>(index[1] - 1)];
  for (int i = 3; i < n; i += 2)
    even = g(even, post_f[static_cast<std::size_t>(i)]
                         [static_cast<std::size_t>(index[i] - 1)]);
  return g(odd, even);
}

void check_f(const Matrix& f, int m) {
  if (f.rows() != m || f.cols() != m)
    throw ShapeError("representation matrix must be m x m");
}

}  // namespace

Tensor generalized_cp(const CpParams& p, const Matrix& f,
                      const PoolOperator& g) {
  p.validate();
  check_f(f, p.m);
  Tensor out(cube_shape(p.m, p.n));
  std::vector<std::vector<std::vector<double>>> post_f;
  post_f.reserve(p.conv.size());
  for (const auto& channel : p.conv) post_f.push_back(apply_f(f, channel));

  for (int z = 0; z < p.z(); ++z) {
    const double weight = p.output[static_cast<std::size_t>(z)];
    MultiIndex idx = MultiIndex::ones(p.n);
    std::size_t flat = 0;
    do {
      out[flat++] +=
          weight * cp_chain_value(post_f[static_cast<std::size_t>(z)], g, idx);
    } while (idx.advance(out.shape()));
  }
  return out;
}

double cp_entry(const CpParams& p, const Matrix& f, const PoolOperator& g,
                const MultiIndex& index) {
  p.validate();
  check_f(f, p.m);
  if (index.order() != p.n)
    throw ShapeError("entry index order does not match n");
  double acc = 0.0;
  for (int z = 0; z < p.z(); ++z)
    acc += p.output[static_cast<std::size_t>(z)] *
           cp_chain_value(apply_f(f, p.conv[static_cast<std::size_t>(z)]), g,
                          index);
  return acc;
}

Matrix matricized_cp(const CpParams& p, const Matrix& f,
                     const PoolOperator& g) {
  p.validate();
  check_f(f, p.m);
  if (p.n % 2 != 0)
    throw OddOrderError("matricized CP requires an even number of locations");

  int half = 1;
  for (int i = 0; i < p.n / 2; ++i) half *= p.m;
  Matrix out(half, half);

  for (int z = 0; z < p.z(); ++z) {
    const auto post_f = apply_f(f, p.conv[static_cast<std::size_t>(z)]);
    auto column = [&](int i) {
      return Matrix(p.m, 1, post_f[static_cast<std::size_t>(i)]);
    };
    Matrix odd = column(0);
    for (int i = 2; i < p.n; i += 2)
      odd = generalized_kronecker(odd, column(i), g);
    Matrix even = column(1);
    for (int i = 3; i < p.n; i += 2)
      even = generalized_kronecker(even, column(i), g);
    const Matrix even_row(1, half, std::move(even.storage()));
    const Matrix summand = generalized_kronecker(odd, even_row, g);
    const double weight = p.output[static_cast<std::size_t>(z)];
    for (std::size_t i = 0; i < out.size(); ++i)
      out.storage()[i] += weight * summand.data()[i];
  }
  return out;
}

namespace {

// Weight vector feeding stage s (s = 1..L): interior levels read
// levels[s-1], the top stage reads the output weights.
std::span<const double> stage_weights(const HtParams& p, int stage, int j,
                                      int channel) {
  if (stage == p.level_count()) return p.output;
  return p.levels[static_cast<std::size_t>(stage - 1)]
                 [static_cast<std::size_t>(j)]
                 [static_cast<std::size_t>(channel)];
}

int stage_channel_count(const HtParams& p, int stage) {
  if (stage == p.level_count()) return 1;
  return p.widths[static_cast<std::size_t>(stage)];
}

}  // namespace

Tensor generalized_ht(const HtParams& p, const Matrix& f,
                      const PoolOperator& g) {
  p.validate();
  check_f(f, p.m);
  const int levels = p.level_count();

  std::vector<std::vector<std::vector<double>>> post_f;
  post_f.reserve(p.level0.size());
  for (const auto& loc : p.level0) post_f.push_back(apply_f(f, loc));

  // Stage 1 pairs locations (2j-1, 2j) into order-2 tensors.
  std::vector<std::vector<Tensor>> current;
  current.resize(static_cast<std::size_t>(p.n / 2));
  for (int j = 0; j < p.n / 2; ++j) {
    const auto& left = post_f[static_cast<std::size_t>(2 * j)];
    const auto& right = post_f[static_cast<std::size_t>(2 * j + 1)];
    const int channels = stage_channel_count(p, 1);
    for (int c = 0; c < channels; ++c) {
      const auto w = stage_weights(p, 1, j, c);
      Tensor t(Shape{p.m, p.m});
      for (int alpha = 0; alpha < p.widths[0]; ++alpha) {
        const double wa = w[static_cast<std::size_t>(alpha)];
        std::size_t flat = 0;
        for (int a = 0; a < p.m; ++a)
          for (int b = 0; b < p.m; ++b)
            t[flat++] += wa * g(left[static_cast<std::size_t>(alpha)]
                                    [static_cast<std::size_t>(a)],
                                right[static_cast<std::size_t>(alpha)]
                                     [static_cast<std::size_t>(b)]);
      }
      current[static_cast<std::size_t>(j)].push_back(std::move(t));
    }
  }

  for (int stage = 2; stage <= levels; ++stage) {
    const int locations = p.n >> stage;
    std::vector<std::vector<Tensor>> next(static_cast<std::size_t>(locations));
    for (int j = 0; j < locations; ++j) {
      const auto& left = current[static_cast<std::size_t>(2 * j)];
      const auto& right = current[static_cast<std::size_t>(2 * j + 1)];
      const int channels = stage_channel_count(p, stage);
      for (int c = 0; c < channels; ++c) {
        const auto w = stage_weights(p, stage, j, c);
        Tensor t(cube_shape(p.m, 1 << stage));
        for (int alpha = 0; alpha < p.widths[static_cast<std::size_t>(stage - 1)];
             ++alpha) {
          const double wa = w[static_cast<std::size_t>(alpha)];
          const Tensor prod = generalized_tensor_product(
              left[static_cast<std::size_t>(alpha)],
              right[static_cast<std::size_t>(alpha)], g);
          for (std::size_t i = 0; i < t.size(); ++i) t[i] += wa * prod[i];
        }
        next[static_cast<std::size_t>(j)].push_back(std::move(t));
      }
    }
    current = std::move(next);
  }
  return std::move(current[0][0]);
}

Matrix matricized_ht(const HtParams& p, const Matrix& f,
                     const PoolOperator& g) {
  p.validate();
  check_f(f, p.m);
  const int levels = p.level_count();

  std::vector<std::vector<std::vector<double>>> post_f;
  post_f.reserve(p.level0.size());
  for (const auto& loc : p.level0) post_f.push_back(apply_f(f, loc));

  std::vector<std::vector<Matrix>> current;
  current.resize(static_cast<std::size_t>(p.n / 2));
  for (int j = 0; j < p.n / 2; ++j) {
    const auto& left = post_f[static_cast<std::size_t>(2 * j)];
    const auto& right = post_f[static_cast<std::size_t>(2 * j + 1)];
    const int channels = stage_channel_count(p, 1);
    for (int c = 0; c < channels; ++c) {
      const auto w = stage_weights(p, 1, j, c);
      Matrix m(p.m, p.m);
      for (int alpha = 0; alpha < p.widths[0]; ++alpha) {
        const double wa = w[static_cast<std::size_t>(alpha)];
        std::size_t flat = 0;
        for (int a = 0; a < p.m; ++a)
          for (int b = 0; b < p.m; ++b)
            m.storage()[flat++] += wa * g(left[static_cast<std::size_t>(alpha)]
                                              [static_cast<std::size_t>(a)],
                                          right[static_cast<std::size_t>(alpha)]
                                               [static_cast<std::size_t>(b)]);
      }
      current[static_cast<std::size_t>(j)].push_back(std::move(m));
    }
  }

  for (int stage = 2; stage <= levels; ++stage) {
    const int locations = p.n >> stage;
    std::vector<std::vector<Matrix>> next(static_cast<std::size_t>(locations));
    for (int j = 0; j < locations; ++j) {
      const auto& left = current[static_cast<std::size_t>(2 * j)];
      const auto& right = current[static_cast<std::size_t>(2 * j + 1)];
      const int channels = stage_channel_count(p, stage);
      for (int c = 0; c < channels; ++c) {
        const auto w = stage_weights(p, stage, j, c);
        Matrix m(left[0].rows() * right[0].rows(),
                 left[0].cols() * right[0].cols());
        for (int alpha = 0; alpha < p.widths[static_cast<std::size_t>(stage - 1)];
             ++alpha) {
          const double wa = w[static_cast<std::size_t>(alpha)];
          const Matrix prod = generalized_kronecker(
              left[static_cast<std::size_t>(alpha)],
              right[static_cast<std::size_t>(alpha)], g);
          for (std::size_t i = 0; i < m.size(); ++i)
            m.storage()[i] += wa * prod.data()[i];
        }
        next[static_cast<std::size_t>(j)].push_back(std::move(m));
      }
    }
    current = std::move(next);
  }
  return std::move(current[0][0]);
}

double ht_entry(const HtParams& p, const Matrix& f, const PoolOperator& g,
                const MultiIndex& index) {
  p.validate();
  check_f(f, p.m);
  if (index.order() != p.n)
    throw ShapeError("entry index order does not match n");

  std::vector<std::vector<std::vector<double>>> post_f;
  post_f.reserve(p.level0.size());
  for (const auto& loc : p.level0) post_f.push_back(apply_f(f, loc));

  // value of the stage-s tensor at location j, channel c, over the index
  // slice starting at `base`.
  auto eval = [&](auto&& self, int stage, int j, int c, int base) -> double {
    const auto w = stage_weights(p, stage, j, c);
    double acc = 0.0;
    const int half = 1 << (stage - 1);
    for (int alpha = 0;
         alpha < p.widths[static_cast<std::size_t>(stage - 1)]; ++alpha) {
      double left, right;
      if (stage == 1) {
        left = post_f[static_cast<std::size_t>(2 * j)]
                     [static_cast<std::size_t>(alpha)]
                     [static_cast<std::size_t>(index[base] - 1)];
        right = post_f[static_cast<std::size_t>(2 * j + 1)]
                      [static_cast<std::size_t>(alpha)]
                      [static_cast<std::size_t>(index[base + 1] - 1)];
      } else {
        left = self(self, stage - 1, 2 * j, alpha, base);
        right = self(self, stage - 1, 2 * j + 1, alpha, base + half);
      }
      acc += w[static_cast<std::size_t>(alpha)] * g(left, right);
    }
    return acc;
  };
  return eval(eval, p.level_count(), 0, 0, 0);
}

Tensor shared_cp(const SharedCpParams& p, const Matrix& f,
                 const PoolOperator& g) {
  return generalized_cp(unshare(p), f, g);
}

Tensor shared_ht(const SharedHtParams& p, const Matrix& f,
                 const PoolOperator& g) {
  return generalized_ht(unshare(p), f, g);
}

HtParams ht_from_cp(const CpParams& p) {
  p.validate();
  if (!is_power_of_two(p.n) || p.n < 2)
    throw ShapeError("ht_from_cp requires n to be a power of two >= 2");
  if (p.z() < 1) throw ShapeError("ht_from_cp requires at least one channel");
  const int levels = log2_exact(p.n);

  HtParams out;
  out.m = p.m;
  out.n = p.n;
  out.widths.assign(static_cast<std::size_t>(levels), p.z());

  // Level 0 takes the CP channel vectors; interior levels route channel c
  // straight up via indicator weights, so the top sum reproduces the CP sum.
  out.level0.resize(static_cast<std::size_t>(p.n));
  for (int j = 0; j < p.n; ++j) {
    auto& loc = out.level0[static_cast<std::size_t>(j)];
    loc.resize(static_cast<std::size_t>(p.z()));
    for (int c = 0; c < p.z(); ++c)
      loc[static_cast<std::size_t>(c)] =
          p.conv[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
  }
  out.levels.resize(static_cast<std::size_t>(levels - 1));
  for (int l = 1; l < levels; ++l) {
    auto& level = out.levels[static_cast<std::size_t>(l - 1)];
    level.resize(static_cast<std::size_t>(p.n >> l));
    for (auto& loc : level) {
      loc.resize(static_cast<std::size_t>(p.z()));
      for (int c = 0; c < p.z(); ++c) {
        loc[static_cast<std::size_t>(c)]
            .assign(static_cast<std::size_t>(p.z()), 0.0);
        loc[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)] = 1.0;
      }
    }
  }
  out.output = p.output;
  return out;
}

CpParams cp_from_tensor(const Tensor& a, CpKind kind, const Matrix& f) {
  const int n = a.order();
  const int m = a.dim(0);
  for (int i = 0; i < n; ++i)
    if (a.dim(i) != m)
      throw ShapeError("cp_from_tensor requires equal dimensions per mode");
  check_f(f, m);

  CpParams out;
  out.m = m;
  out.n = n;

  if (kind == CpKind::product) {
    // F^{-1} e_d, one solve per basis vector, reused across entries.
    std::vector<std::vector<double>> basis_solves;
    basis_solves.reserve(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d) {
      std::vector<double> e(static_cast<std::size_t>(m), 0.0);
      e[static_cast<std::size_t>(d)] = 1.0;
      basis_solves.push_back(linalg::solve(f, e));
    }
    MultiIndex idx = MultiIndex::ones(n);
    std::size_t flat = 0;
    do {
      std::vector<std::vector<double>> channel;
      channel.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        channel.push_back(basis_solves[static_cast<std::size_t>(idx[i] - 1)]);
      out.conv.push_back(std::move(channel));
      out.output.push_back(a[flat++]);
    } while (idx.advance(a.shape()));
    return out;
  }

  // relu-max: the indicator pair per nonzero entry.
  std::vector<double> all_ones(static_cast<std::size_t>(m), 1.0);
  const std::vector<double> ones_solve = linalg::solve(f, all_ones);
  std::vector<std::vector<double>> ebar_solves;
  ebar_solves.reserve(static_cast<std::size_t>(m));
  for (int d = 0; d < m; ++d) {
    std::vector<double> ebar(static_cast<std::size_t>(m), 1.0);
    ebar[static_cast<std::size_t>(d)] = 0.0;
    ebar_solves.push_back(linalg::solve(f, ebar));
  }

  MultiIndex idx = MultiIndex::ones(n);
  std::size_t flat = 0;
  do {
    const double value = a[flat++];
    if (value == 0.0) continue;
    out.conv.emplace_back(static_cast<std::size_t>(n), ones_solve);
    out.output.push_back(value);
    std::vector<std::vector<double>> blocker;
    blocker.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      blocker.push_back(ebar_solves[static_cast<std::size_t>(idx[i] - 1)]);
    out.conv.push_back(std::move(blocker));
    out.output.push_back(-value);
  } while (idx.advance(a.shape()));
  return out;
}

}  // namespace gtd
