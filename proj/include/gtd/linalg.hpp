#pragma once

#include <span>
#include <vector>

#include "gtd/tensor.hpp"

// Dense numerical kernels. Everything here is standard machinery sitting
// behind the analysis and constructions modules.
namespace gtd::linalg {

// m * v.
std::vector<double> apply(const Matrix& m, std::span<const double> v);

// Solves a*x = b by partial-pivot LU and verifies the residual
// ||a*x - b||_inf <= residual_tol * max(1, ||b||_inf). A failed check
// throws SingularMatrixError; constructions rely on certified solves, not
// assumed invertibility.
std::vector<double> solve(const Matrix& a, std::span<const double> b,
                          double residual_tol = 1e-10);

double determinant(const Matrix& a);

// Singular values, non-increasing. Throws on non-finite entries.
std::vector<double> singular_values(const Matrix& a);

}  // namespace gtd::linalg
