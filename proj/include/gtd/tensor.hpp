#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "gtd/operators.hpp"

namespace gtd {

using Shape = std::vector<int>;

// Element-count guard for dense allocations. Grid tensors are M^N-sized, so
// a misconfigured run can ask for astronomically large buffers; the guard
// makes that fail fast instead of thrashing. Default 10^7 elements.
std::size_t element_guard();
void set_element_guard(std::size_t max_elements);

// One index per mode, 1-based as in the usual tensor notation d_i in [M_i].
// Storage offsets are 0-based; the conversion is "subtract one", fixed here
// and nowhere else.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> indices);
  static MultiIndex ones(int order);  // (1,1,...,1), the first index row-major

  int order() const { return static_cast<int>(d_.size()); }
  // 1-based index of mode `mode` (mode itself is a 0-based position).
  int operator[](int mode) const { return d_[static_cast<std::size_t>(mode)]; }
  int& operator[](int mode) { return d_[static_cast<std::size_t>(mode)]; }
  const std::vector<int>& values() const { return d_; }

  // Row-major increment (last mode fastest). Returns false after wrapping
  // past the final index, leaving *this at ones().
  bool advance(const Shape& shape);

  bool operator==(const MultiIndex& other) const { return d_ == other.d_; }

 private:
  std::vector<int> d_;
};

// Dense tensor of 64-bit reals. Row-major layout, last index fastest:
// offset(d_1..d_N) = sum_i (d_i - 1) * prod_{j>i} M_j.
class Tensor {
 public:
  explicit Tensor(Shape shape);  // zero-filled
  Tensor(Shape shape, std::vector<double> data);

  static Tensor from_vector(std::vector<double> values);  // order-1
  static Tensor constant(Shape shape, double value);

  int order() const { return static_cast<int>(shape_.size()); }
  const Shape& shape() const { return shape_; }
  int dim(int mode) const { return shape_[static_cast<std::size_t>(mode)]; }
  std::size_t size() const { return data_.size(); }

  std::size_t offset(const MultiIndex& index) const;
  double at(const MultiIndex& index) const { return data_[offset(index)]; }
  double& at(const MultiIndex& index) { return data_[offset(index)]; }

  double operator[](std::size_t flat) const { return data_[flat]; }
  double& operator[](std::size_t flat) { return data_[flat]; }

  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Row-major dense matrix; interchangeable with an order-2 Tensor.
class Matrix {
 public:
  Matrix(int rows, int cols);  // zero-filled
  Matrix(int rows, int cols, std::vector<double> data);

  static Matrix identity(int n);
  static Matrix from_tensor(const Tensor& t);  // requires order 2
  Tensor to_tensor() const;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  double& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  int rows_;
  int cols_;
  std::vector<double> data_;
};

// (a (x) b): order = order(a)+order(b), shape is the concatenation, entry
// (d_1..d_{P+Q}) = a(d_1..d_P) * b(d_{P+1}..d_{P+Q}).
Tensor tensor_product(const Tensor& a, const Tensor& b);

// Same shape rule with g(a-entry, b-entry) in place of multiplication.
// Reduces bit-for-bit to tensor_product when g is the product operator.
Tensor generalized_tensor_product(const Tensor& a, const Tensor& b,
                                  const PoolOperator& g);

// Left fold of a non-empty list under g. Associativity and commutativity of
// g make the result order-independent up to rounding.
double fold_g(std::span<const double> values, const PoolOperator& g);

// Arrangement of an even-order tensor as a matrix: odd modes to rows, even
// modes to columns. Entry (d_1..d_N) lands in (1-based)
//   row = 1 + sum_i (d_{2i-1}-1) * prod_{j>i} M_{2j-1}
//   col = 1 + sum_i (d_{2i}  -1) * prod_{j>i} M_{2j}
// Odd order is rejected with OddOrderError; padding it silently would
// corrupt every rank analysis built on top.
Matrix matricize(const Tensor& a);

// Kronecker product: (M1*N1)x(M2*N2) matrix holding A_ij*B_kl at
// row (i-1)*N1+k, col (j-1)*N2+l (1-based).
Matrix kronecker(const Matrix& a, const Matrix& b);

// Kronecker placement with value g(A_ij, B_kl). Satisfies
// matricize(a (x)g b) == generalized_kronecker(matricize(a), matricize(b), g)
// exactly for even-order tensors.
Matrix generalized_kronecker(const Matrix& a, const Matrix& b,
                             const PoolOperator& g);

// Mode permutation: result entry at positions (perm applied) equals the
// source entry, i.e. result index e with e[perm[i]] = d[i] holds a(d).
// perm is a 0-based permutation of [0, order). The identity permutation is
// a copy; an order-2 swap is the matrix transpose.
Tensor permute_modes(const Tensor& a, std::span<const int> perm);

// GTEN1 dump format: magic bytes "GTEN1", uint32 LE order, order x uint32 LE
// dims, IEEE-754 binary64 LE values in row-major order. Matrices are written
// as order-2 tensors.
void write_gten(const Tensor& t, std::ostream& out);
Tensor read_gten(std::istream& in);
void write_gten_file(const Tensor& t, const std::filesystem::path& path);
Tensor read_gten_file(const std::filesystem::path& path);

}  // namespace gtd
