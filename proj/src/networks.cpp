#include "gtd/networks.hpp"

#include <cmath>
#include <string>

#include "gtd/errors.hpp"
#include "gtd/linalg.hpp"

namespace gtd {

Templates::Templates(std::vector<Patch> vectors) : x_(std::move(vectors)) {
  if (x_.empty()) throw ShapeError("templates must be non-empty");
  const std::size_t dim = x_[0].size();
  if (dim == 0) throw ShapeError("templates must have dimension >= 1");
  for (const Patch& v : x_)
    if (v.size() != dim) throw ShapeError("templates must share one dimension");
  for (std::size_t i = 0; i < x_.size(); ++i)
    for (std::size_t j = i + 1; j < x_.size(); ++j)
      if (x_[i] == x_[j])
        throw ShapeError("templates must be pairwise distinct");
}

double ReprFunction::eval(std::span<const double> x) const {
  switch (kind) {
    case ReprKind::relu_neuron: {
      double z = b;
      for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * x[i];
      return z > 0.0 ? z : 0.0;
    }
    case ReprKind::sigmoid_neuron: {
      double z = b;
      for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * x[i];
      return 1.0 / (1.0 + std::exp(-alpha * z));
    }
    case ReprKind::raw_coordinates:
      return x[static_cast<std::size_t>(index)];
    case ReprKind::identity_onehot: {
      if (x.size() != w.size()) return 0.0;
      for (std::size_t i = 0; i < w.size(); ++i)
        if (x[i] != w[i]) return 0.0;
      return 1.0;
    }
    case ReprKind::monomial:
    default: {
      double acc = 1.0;
      for (int p = 0; p < index; ++p) acc *= x[0];
      return acc;
    }
  }
}

ReprFamily::ReprFamily(std::vector<ReprFunction> funcs)
    : funcs_(std::move(funcs)) {
  if (funcs_.empty())
    throw ShapeError("representation family must be non-empty");
}

ReprFamily ReprFamily::relu_neurons(std::vector<std::vector<double>> w,
                                    std::vector<double> b) {
  if (w.size() != b.size())
    throw ShapeError("relu neurons need one bias per weight vector");
  std::vector<ReprFunction> funcs;
  for (std::size_t i = 0; i < w.size(); ++i)
    funcs.push_back({ReprKind::relu_neuron, std::move(w[i]), b[i], 1.0, 0});
  return ReprFamily(std::move(funcs));
}

ReprFamily ReprFamily::sigmoid_neurons(std::vector<std::vector<double>> w,
                                       std::vector<double> b, double alpha) {
  if (w.size() != b.size())
    throw ShapeError("sigmoid neurons need one bias per weight vector");
  std::vector<ReprFunction> funcs;
  for (std::size_t i = 0; i < w.size(); ++i)
    funcs.push_back(
        {ReprKind::sigmoid_neuron, std::move(w[i]), b[i], alpha, 0});
  return ReprFamily(std::move(funcs));
}

ReprFamily ReprFamily::raw_coordinates(int m) {
  std::vector<ReprFunction> funcs;
  for (int d = 0; d < m; ++d)
    funcs.push_back({ReprKind::raw_coordinates, {}, 0.0, 1.0, d});
  return ReprFamily(std::move(funcs));
}

ReprFamily ReprFamily::identity_onehot(const Templates& t) {
  std::vector<ReprFunction> funcs;
  for (int d = 0; d < t.count(); ++d)
    funcs.push_back({ReprKind::identity_onehot, t.vec(d), 0.0, 1.0, d});
  return ReprFamily(std::move(funcs));
}

ReprFamily ReprFamily::monomials(int m) {
  std::vector<ReprFunction> funcs;
  for (int d = 0; d < m; ++d)
    funcs.push_back({ReprKind::monomial, {}, 0.0, 1.0, d});
  return ReprFamily(std::move(funcs));
}

std::vector<double> ReprFamily::rep(std::span<const double> x) const {
  std::vector<double> out;
  out.reserve(funcs_.size());
  for (const ReprFunction& f : funcs_) out.push_back(f.eval(x));
  return out;
}

Matrix build_repr_matrix(const Templates& t, const ReprFamily& r) {
  if (t.count() != r.size())
    throw ShapeError("need as many templates as representation functions");
  Matrix f(t.count(), r.size());
  for (int i = 0; i < t.count(); ++i)
    for (int j = 0; j < r.size(); ++j) f(i, j) = r.eval(j, t.vec(i));
  return f;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Conv values of the shallow hidden layer: entry [z][i] = <conv[z][i], rep_i>.
std::vector<std::vector<double>> shallow_conv(std::span<const Patch> patches,
                                              const CpParams& p,
                                              const ReprFamily& reps) {
  p.validate();
  if (static_cast<int>(patches.size()) != p.n)
    throw ShapeError("expected " + std::to_string(p.n) + " patches");
  if (reps.size() != p.m)
    throw ShapeError("representation family size must equal m");
  std::vector<std::vector<double>> rep_values;
  rep_values.reserve(patches.size());
  for (const Patch& x : patches) rep_values.push_back(reps.rep(x));

  std::vector<std::vector<double>> conv(static_cast<std::size_t>(p.z()));
  for (int z = 0; z < p.z(); ++z) {
    conv[static_cast<std::size_t>(z)].resize(static_cast<std::size_t>(p.n));
    for (int i = 0; i < p.n; ++i)
      conv[static_cast<std::size_t>(z)][static_cast<std::size_t>(i)] =
          dot(p.conv[static_cast<std::size_t>(z)][static_cast<std::size_t>(i)],
              rep_values[static_cast<std::size_t>(i)]);
  }
  return conv;
}

}  // namespace

std::vector<double> shallow_scores(std::span<const Patch> patches,
                                   const CpParams& p,
                                   std::span<const std::vector<double>> heads,
                                   const ReprFamily& reps,
                                   const PoolOperator& g) {
  const auto conv = shallow_conv(patches, p, reps);
  std::vector<double> pooled(static_cast<std::size_t>(p.z()));
  for (int z = 0; z < p.z(); ++z)
    pooled[static_cast<std::size_t>(z)] =
        fold_g(conv[static_cast<std::size_t>(z)], g);
  std::vector<double> scores;
  scores.reserve(heads.size());
  for (const auto& head : heads) {
    if (static_cast<int>(head.size()) != p.z())
      throw ShapeError("output head length must equal Z");
    scores.push_back(dot(head, pooled));
  }
  return scores;
}

double shallow_score(std::span<const Patch> patches, const CpParams& p,
                     const ReprFamily& reps, const PoolOperator& g) {
  const std::vector<std::vector<double>> heads{p.output};
  return shallow_scores(patches, p, heads, reps, g)[0];
}

namespace {

// Forward pass of the deep network: alternating 1x1 conv, activation and
// size-2 pooling realized as the activation-pooling operator on location
// pairs (2j-1, 2j). Returns the r_{L-1} pooled values feeding the output
// layer.
std::vector<double> deep_features(std::span<const Patch> patches,
                                  const HtParams& p, const ReprFamily& reps,
                                  const PoolOperator& g) {
  p.validate();
  if (static_cast<int>(patches.size()) != p.n)
    throw ShapeError("expected " + std::to_string(p.n) + " patches");
  if (reps.size() != p.m)
    throw ShapeError("representation family size must equal m");
  const int levels = p.level_count();

  // Level-0 conv over the representation values.
  std::vector<std::vector<double>> acts(static_cast<std::size_t>(p.n));
  for (int j = 0; j < p.n; ++j) {
    const std::vector<double> rep = reps.rep(patches[static_cast<std::size_t>(j)]);
    auto& a = acts[static_cast<std::size_t>(j)];
    a.resize(static_cast<std::size_t>(p.widths[0]));
    for (int c = 0; c < p.widths[0]; ++c)
      a[static_cast<std::size_t>(c)] =
          dot(p.level0[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)],
              rep);
  }

  for (int l = 1; l < levels; ++l) {
    const int locations = p.n >> l;
    std::vector<std::vector<double>> next(static_cast<std::size_t>(locations));
    for (int j = 0; j < locations; ++j) {
      const auto& left = acts[static_cast<std::size_t>(2 * j)];
      const auto& right = acts[static_cast<std::size_t>(2 * j + 1)];
      auto& out = next[static_cast<std::size_t>(j)];
      out.resize(static_cast<std::size_t>(p.widths[static_cast<std::size_t>(l)]));
      for (int c = 0; c < p.widths[static_cast<std::size_t>(l)]; ++c) {
        const auto& w = p.levels[static_cast<std::size_t>(l - 1)]
                                [static_cast<std::size_t>(j)]
                                [static_cast<std::size_t>(c)];
        double acc = 0.0;
        for (int alpha = 0; alpha < p.widths[static_cast<std::size_t>(l - 1)];
             ++alpha)
          acc += w[static_cast<std::size_t>(alpha)] *
                 g(left[static_cast<std::size_t>(alpha)],
                   right[static_cast<std::size_t>(alpha)]);
        out[static_cast<std::size_t>(c)] = acc;
      }
    }
    acts = std::move(next);
  }

  // Global (pairwise) pooling of the last hidden layer.
  std::vector<double> pooled(static_cast<std::size_t>(p.widths.back()));
  for (int c = 0; c < p.widths.back(); ++c)
    pooled[static_cast<std::size_t>(c)] =
        g(acts[0][static_cast<std::size_t>(c)],
          acts[1][static_cast<std::size_t>(c)]);
  return pooled;
}

}  // namespace

std::vector<double> deep_scores(std::span<const Patch> patches,
                                const HtParams& p,
                                std::span<const std::vector<double>> heads,
                                const ReprFamily& reps,
                                const PoolOperator& g) {
  const std::vector<double> pooled = deep_features(patches, p, reps, g);
  std::vector<double> scores;
  scores.reserve(heads.size());
  for (const auto& head : heads) {
    if (head.size() != pooled.size())
      throw ShapeError("output head length must equal r_{L-1}");
    scores.push_back(dot(head, pooled));
  }
  return scores;
}

double deep_score(std::span<const Patch> patches, const HtParams& p,
                  const ReprFamily& reps, const PoolOperator& g) {
  const std::vector<std::vector<double>> heads{p.output};
  return deep_scores(patches, p, heads, reps, g)[0];
}

void WxhParams::validate(int m) const {
  if (k < 1) throw ShapeError("window size must be >= 1");
  if (conv.empty()) throw ShapeError("wxh params need at least one channel");
  if (output.size() != conv.size())
    throw ShapeError("wxh output weights must have one entry per channel");
  const int locations = n();
  if (k >= locations)
    throw ShapeError("window size K must be smaller than N");
  for (const auto& channel : conv) {
    if (static_cast<int>(channel.size()) != locations)
      throw ShapeError("wxh channel must carry one matrix per location");
    for (const Matrix& a : channel)
      if (a.rows() != m || a.cols() != k)
        throw ShapeError("wxh conv matrices must be m x k");
  }
}

namespace {

// 1-based location of window slot j (1-based) around location i, or 0 when
// the slot pads out of bounds.
int window_slot(int i, int j, int k, int n) {
  const int loc = i + (j - 1) - (k - 1) / 2;
  return (loc < 1 || loc > n) ? 0 : loc;
}

}  // namespace

double wxh_regime_bound(int n, int m) {
  return n / 2.0 + 1.0 - std::log(static_cast<double>(n)) /
                             std::log(static_cast<double>(m));
}

double wxh_score(std::span<const Patch> patches, const WxhParams& p,
                 const ReprFamily& reps) {
  const int n = p.n();
  const int m = reps.size();
  p.validate(m);
  if (static_cast<int>(patches.size()) != n)
    throw ShapeError("expected " + std::to_string(n) + " patches");

  std::vector<std::vector<double>> rep_values;
  rep_values.reserve(patches.size());
  for (const Patch& x : patches) rep_values.push_back(reps.rep(x));

  // ReLU activation, average pooling.
  double score = 0.0;
  for (int z = 0; z < p.z(); ++z) {
    double pooled = 0.0;
    for (int i = 1; i <= n; ++i) {
      const Matrix& a =
          p.conv[static_cast<std::size_t>(z)][static_cast<std::size_t>(i - 1)];
      double conv = 0.0;
      for (int j = 1; j <= p.k; ++j) {
        const int loc = window_slot(i, j, p.k, n);
        if (loc == 0) continue;  // zero padding
        for (int d = 0; d < m; ++d)
          conv += a(d, j - 1) *
                  rep_values[static_cast<std::size_t>(loc - 1)]
                            [static_cast<std::size_t>(d)];
      }
      pooled += conv > 0.0 ? conv : 0.0;
    }
    score += p.output[static_cast<std::size_t>(z)] * pooled / n;
  }
  return score;
}

Tensor wxh_grid_tensor(const WxhParams& p, const Matrix& f, int n) {
  const int m = f.rows();
  p.validate(m);
  if (p.n() != n) throw ShapeError("wxh params disagree with n");
  if (f.cols() != m) throw ShapeError("representation matrix must be m x m");

  // Window tensors B^i: precompute (F conv[z][i]) so that the grid entry is
  //   sum_i sum_z (out_z / N) * max{0, sum_j (F conv[z][i])_{d_rho(j;i), j}}
  // with out-of-bounds slots reading zero.
  std::vector<std::vector<Matrix>> post_f(static_cast<std::size_t>(p.z()));
  for (int z = 0; z < p.z(); ++z)
    for (int i = 0; i < n; ++i) {
      const Matrix& a =
          p.conv[static_cast<std::size_t>(z)][static_cast<std::size_t>(i)];
      Matrix fa(m, p.k);
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < p.k; ++c) {
          double acc = 0.0;
          for (int t = 0; t < m; ++t) acc += f(r, t) * a(t, c);
          fa(r, c) = acc;
        }
      post_f[static_cast<std::size_t>(z)].push_back(std::move(fa));
    }

  Tensor out(Shape(static_cast<std::size_t>(n), m));
  MultiIndex idx = MultiIndex::ones(n);
  std::size_t flat = 0;
  do {
    double value = 0.0;
    for (int i = 1; i <= n; ++i)
      for (int z = 0; z < p.z(); ++z) {
        double conv = 0.0;
        for (int j = 1; j <= p.k; ++j) {
          const int loc = window_slot(i, j, p.k, n);
          if (loc == 0) continue;
          conv += post_f[static_cast<std::size_t>(z)]
                        [static_cast<std::size_t>(i - 1)](idx[loc - 1] - 1,
                                                          j - 1);
        }
        value += p.output[static_cast<std::size_t>(z)] / n *
                 (conv > 0.0 ? conv : 0.0);
      }
    out[flat++] = value;
  } while (idx.advance(out.shape()));
  return out;
}

void FcParams::validate(int n, int m) const {
  if (hidden.empty()) throw ShapeError("fc params need at least one unit");
  if (output.size() != hidden.size())
    throw ShapeError("fc output weights must have one entry per unit");
  for (const Matrix& a : hidden)
    if (a.rows() != n || a.cols() != m)
      throw ShapeError("fc hidden matrices must be n x m");
}

double fc_score(std::span<const Patch> patches, const FcParams& p,
                const ReprFamily& reps) {
  const int n = static_cast<int>(patches.size());
  const int m = reps.size();
  p.validate(n, m);

  std::vector<std::vector<double>> rep_values;
  rep_values.reserve(patches.size());
  for (const Patch& x : patches) rep_values.push_back(reps.rep(x));

  double score = 0.0;
  for (int z = 0; z < p.z(); ++z) {
    const Matrix& a = p.hidden[static_cast<std::size_t>(z)];
    double inner = 0.0;
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < m; ++d)
        inner += rep_values[static_cast<std::size_t>(i)]
                           [static_cast<std::size_t>(d)] *
                 a(i, d);
    score += p.output[static_cast<std::size_t>(z)] *
             (inner > 0.0 ? inner : 0.0);
  }
  return score;
}

Tensor fc_grid_tensor(const FcParams& p, const Matrix& f, int n) {
  const int m = f.rows();
  p.validate(n, m);
  if (f.cols() != m) throw ShapeError("representation matrix must be m x m");

  Tensor out(Shape(static_cast<std::size_t>(n), m));
  MultiIndex idx = MultiIndex::ones(n);
  std::size_t flat = 0;
  do {
    double value = 0.0;
    for (int z = 0; z < p.z(); ++z) {
      const Matrix& a = p.hidden[static_cast<std::size_t>(z)];
      double inner = 0.0;
      for (int i = 0; i < n; ++i)
        for (int d = 0; d < m; ++d) inner += f(idx[i] - 1, d) * a(i, d);
      value += p.output[static_cast<std::size_t>(z)] *
               (inner > 0.0 ? inner : 0.0);
    }
    out[flat++] = value;
  } while (idx.advance(out.shape()));
  return out;
}

Tensor grid_tensor(const ScoreFn& score, const Templates& t, int n) {
  if (n < 1) throw ShapeError("grid tensor needs n >= 1");
  const int m = t.count();
  Tensor out(Shape(static_cast<std::size_t>(n), m));
  std::vector<Patch> point(static_cast<std::size_t>(n));
  MultiIndex idx = MultiIndex::ones(n);
  std::size_t flat = 0;
  do {
    for (int i = 0; i < n; ++i)
      point[static_cast<std::size_t>(i)] = t.vec(idx[i] - 1);
    out[flat++] = score(point);
  } while (idx.advance(out.shape()));
  return out;
}

}  // namespace gtd
