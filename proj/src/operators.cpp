#include "gtd/operators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gtd/errors.hpp"
#include "gtd/rng.hpp"

namespace gtd {

PoolOperator PoolOperator::from_token(std::string_view token) {
  if (token == "product") return product();
  if (token == "relu-max") return relu_max();
  if (token == "relu-sum") return relu_sum();
  throw ConfigError("unknown operator '" + std::string(token) +
                    "' (expected product | relu-max | relu-sum)");
}

const std::array<PoolOperator, 3>& PoolOperator::all() {
  static const std::array<PoolOperator, 3> ops = {product(), relu_max(),
                                                  relu_sum()};
  return ops;
}

std::string_view PoolOperator::token() const {
  switch (kind_) {
    case PoolKind::product:
      return "product";
    case PoolKind::relu_max:
      return "relu-max";
    case PoolKind::relu_sum:
    default:
      return "relu-sum";
  }
}

LawReport check_operator_laws(const PoolOperator& g, int samples,
                              std::uint64_t seed) {
  if (samples < 1) throw Error("check_operator_laws needs samples >= 1");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  SplitMix64 rng(seed);
  LawReport report;
  report.samples = samples;
  for (int s = 0; s < samples; ++s) {
    const double a = rng.uniform(-10.0, 10.0);
    const double b = rng.uniform(-10.0, 10.0);
    const double c = rng.uniform(-10.0, 10.0);
    const double assoc = std::fabs(g(g(a, b), c) - g(a, g(b, c)));
    const double comm = std::fabs(g(a, b) - g(b, a));
    report.assoc_residual = std::max(report.assoc_residual, assoc);
    report.comm_residual = std::max(report.comm_residual, comm);
    // One reassociated multiply/add costs at most a couple of ulps of the
    // combined magnitude; relu-max pays nothing.
    double bound = 0.0;
    if (g.kind() == PoolKind::product)
      bound = 4.0 * eps * std::fabs(a * b * c);
    else if (g.kind() == PoolKind::relu_sum)
      bound = 4.0 * eps * (std::fabs(a) + std::fabs(b) + std::fabs(c));
    report.assoc_bound = std::max(report.assoc_bound, bound);
  }
  report.pass = report.assoc_residual <= report.assoc_bound &&
                report.comm_residual == 0.0;
  return report;
}

}  // namespace gtd
