#include "gtd/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "gtd/errors.hpp"

namespace gtd::linalg {

namespace {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenRowMajor> map_of(const Matrix& m) {
  return Eigen::Map<const EigenRowMajor>(m.data().data(), m.rows(), m.cols());
}

}  // namespace

std::vector<double> apply(const Matrix& m, std::span<const double> v) {
  if (static_cast<int>(v.size()) != m.cols())
    throw ShapeError("matrix-vector size mismatch");
  std::vector<double> out(static_cast<std::size_t>(m.rows()), 0.0);
  for (int i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < m.cols(); ++j) acc += m(i, j) * v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

std::vector<double> solve(const Matrix& a, std::span<const double> b,
                          double residual_tol) {
  if (a.rows() != a.cols()) throw ShapeError("solve requires a square matrix");
  if (static_cast<int>(b.size()) != a.rows())
    throw ShapeError("solve right-hand side has wrong length");

  Eigen::Map<const Eigen::VectorXd> bv(b.data(),
                                       static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = map_of(a).partialPivLu().solve(bv);

  double b_scale = 1.0;
  for (double v : b) b_scale = std::max(b_scale, std::fabs(v));
  const double residual = (map_of(a) * x - bv).lpNorm<Eigen::Infinity>();
  if (!std::isfinite(residual) || residual > residual_tol * b_scale)
    throw SingularMatrixError("dense solve residual " + std::to_string(residual) +
                              " exceeds tolerance; matrix is numerically singular");
  return std::vector<double>(x.data(), x.data() + x.size());
}

double determinant(const Matrix& a) {
  if (a.rows() != a.cols())
    throw ShapeError("determinant requires a square matrix");
  return map_of(a).partialPivLu().determinant();
}

std::vector<double> singular_values(const Matrix& a) {
  for (double v : a.data())
    if (!std::isfinite(v)) throw Error("singular values of a non-finite matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(map_of(a));
  const auto& sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

}  // namespace gtd::linalg
