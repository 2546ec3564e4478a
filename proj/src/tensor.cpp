#include "gtd/tensor.hpp"

#include <atomic>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "gtd/errors.hpp"

namespace gtd {

namespace {

std::atomic<std::size_t> g_element_guard{10'000'000};

std::size_t checked_element_count(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor order must be >= 1");
  std::size_t count = 1;
  for (int dim : shape) {
    if (dim < 1) throw ShapeError("tensor dimensions must be >= 1");
    const std::size_t guard = g_element_guard.load();
    if (count > guard / static_cast<std::size_t>(dim))
      throw SizeGuardError("tensor of " + std::to_string(count) + " x " +
                           std::to_string(dim) +
                           " elements exceeds the element guard (" +
                           std::to_string(guard) + ")");
    count *= static_cast<std::size_t>(dim);
  }
  return count;
}

Shape concat(const Shape& a, const Shape& b) {
  Shape out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

std::size_t element_guard() { return g_element_guard.load(); }

void set_element_guard(std::size_t max_elements) {
  g_element_guard.store(max_elements);
}

MultiIndex::MultiIndex(std::vector<int> indices) : d_(std::move(indices)) {
  if (d_.empty()) throw ShapeError("multi-index must have at least one mode");
  for (int v : d_)
    if (v < 1) throw ShapeError("multi-index entries are 1-based");
}

MultiIndex MultiIndex::ones(int order) {
  return MultiIndex(std::vector<int>(static_cast<std::size_t>(order), 1));
}

bool MultiIndex::advance(const Shape& shape) {
  for (int i = order() - 1; i >= 0; --i) {
    if (d_[static_cast<std::size_t>(i)] < shape[static_cast<std::size_t>(i)]) {
      ++d_[static_cast<std::size_t>(i)];
      return true;
    }
    d_[static_cast<std::size_t>(i)] = 1;
  }
  return false;
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  data_.assign(checked_element_count(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (checked_element_count(shape_) != data_.size())
    throw ShapeError("tensor data length does not match its shape");
}

Tensor Tensor::from_vector(std::vector<double> values) {
  Shape shape{static_cast<int>(values.size())};
  return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::constant(Shape shape, double value) {
  Tensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

std::size_t Tensor::offset(const MultiIndex& index) const {
  if (index.order() != order())
    throw ShapeError("multi-index order does not match tensor order");
  std::size_t flat = 0;
  for (int i = 0; i < order(); ++i) {
    const int d = index[i];
    if (d < 1 || d > dim(i))
      throw ShapeError("multi-index out of range in mode " + std::to_string(i));
    flat = flat * static_cast<std::size_t>(dim(i)) +
           static_cast<std::size_t>(d - 1);
  }
  return flat;
}

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) throw ShapeError("matrix dimensions must be >= 1");
  data_.assign(checked_element_count({rows, cols}), 0.0);
}

Matrix::Matrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 1 || cols < 1) throw ShapeError("matrix dimensions must be >= 1");
  if (checked_element_count({rows, cols}) != data_.size())
    throw ShapeError("matrix data length does not match rows*cols");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_tensor(const Tensor& t) {
  if (t.order() != 2)
    throw ShapeError("only order-2 tensors convert to matrices");
  return Matrix(t.dim(0), t.dim(1),
                std::vector<double>(t.data().begin(), t.data().end()));
}

Tensor Matrix::to_tensor() const {
  return Tensor(Shape{rows_, cols_}, data_);
}

Tensor generalized_tensor_product(const Tensor& a, const Tensor& b,
                                  const PoolOperator& g) {
  Tensor out(concat(a.shape(), b.shape()));
  const std::size_t nb = b.size();
  std::size_t pos = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double av = a[i];
    for (std::size_t j = 0; j < nb; ++j) out[pos++] = g(av, b[j]);
  }
  return out;
}

Tensor tensor_product(const Tensor& a, const Tensor& b) {
  Tensor out(concat(a.shape(), b.shape()));
  const std::size_t nb = b.size();
  std::size_t pos = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double av = a[i];
    for (std::size_t j = 0; j < nb; ++j) out[pos++] = av * b[j];
  }
  return out;
}

double fold_g(std::span<const double> values, const PoolOperator& g) {
  if (values.empty()) throw Error("fold_g over an empty list");
  double acc = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) acc = g(acc, values[i]);
  return acc;
}

Matrix matricize(const Tensor& a) {
  const int order = a.order();
  if (order % 2 != 0)
    throw OddOrderError("matricize requires an even-order tensor, got order " +
                        std::to_string(order));
  int rows = 1, cols = 1;
  for (int i = 0; i < order; i += 2) rows *= a.dim(i);
  for (int i = 1; i < order; i += 2) cols *= a.dim(i);

  Matrix out(rows, cols);
  // Row index is the mixed-radix number over odd modes (first mode most
  // significant), column index likewise over even modes. Walking flat
  // offsets row-major keeps both counters incremental.
  MultiIndex idx = MultiIndex::ones(order);
  std::size_t flat = 0;
  do {
    int r = 0, c = 0;
    for (int i = 0; i < order; i += 2) r = r * a.dim(i) + (idx[i] - 1);
    for (int i = 1; i < order; i += 2) c = c * a.dim(i) + (idx[i] - 1);
    out(r, c) = a[flat++];
  } while (idx.advance(a.shape()));
  return out;
}

Matrix generalized_kronecker(const Matrix& a, const Matrix& b,
                             const PoolOperator& g) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const double av = a(i, j);
      const int r0 = i * b.rows();
      const int c0 = j * b.cols();
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(r0 + k, c0 + l) = g(av, b(k, l));
    }
  return out;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const double av = a(i, j);
      const int r0 = i * b.rows();
      const int c0 = j * b.cols();
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) out(r0 + k, c0 + l) = av * b(k, l);
    }
  return out;
}

Tensor permute_modes(const Tensor& a, std::span<const int> perm) {
  const int order = a.order();
  if (static_cast<int>(perm.size()) != order)
    throw ShapeError("permutation length does not match tensor order");
  std::vector<bool> seen(static_cast<std::size_t>(order), false);
  for (int p : perm) {
    if (p < 0 || p >= order || seen[static_cast<std::size_t>(p)])
      throw ShapeError("invalid mode permutation");
    seen[static_cast<std::size_t>(p)] = true;
  }

  Shape out_shape(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i)
    out_shape[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
        a.dim(i);
  Tensor out(out_shape);

  MultiIndex src = MultiIndex::ones(order);
  MultiIndex dst = MultiIndex::ones(order);
  std::size_t flat = 0;
  do {
    for (int i = 0; i < order; ++i)
      dst[perm[static_cast<std::size_t>(i)]] = src[i];
    out.at(dst) = a[flat++];
  } while (src.advance(a.shape()));
  return out;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw Error("truncated GTEN1 stream");
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i)
    b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw Error("truncated GTEN1 stream");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

constexpr char kMagic[5] = {'G', 'T', 'E', 'N', '1'};

}  // namespace

void write_gten(const Tensor& t, std::ostream& out) {
  out.write(kMagic, 5);
  put_u32(out, static_cast<std::uint32_t>(t.order()));
  for (int i = 0; i < t.order(); ++i)
    put_u32(out, static_cast<std::uint32_t>(t.dim(i)));
  for (double v : t.data()) put_f64(out, v);
  if (!out) throw Error("GTEN1 write failed");
}

Tensor read_gten(std::istream& in) {
  char magic[5];
  in.read(magic, 5);
  if (!in || std::memcmp(magic, kMagic, 5) != 0)
    throw Error("not a GTEN1 stream (bad magic)");
  const std::uint32_t order = get_u32(in);
  if (order < 1 || order > 64) throw Error("GTEN1 order out of range");
  Shape shape(order);
  for (std::uint32_t i = 0; i < order; ++i) {
    const std::uint32_t d = get_u32(in);
    if (d < 1 || d > 1u << 30) throw Error("GTEN1 dimension out of range");
    shape[i] = static_cast<int>(d);
  }
  Tensor t{shape};
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = get_f64(in);
  return t;
}

void write_gten_file(const Tensor& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_gten(t, out);
}

Tensor read_gten_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_gten(in);
}

}  // namespace gtd
