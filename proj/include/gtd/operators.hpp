#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace gtd {

enum class PoolKind { product, relu_max, relu_sum };

// Activation-pooling operator g(a,b): an associative, commutative binary
// operator on the reals. The three instances are a closed enumeration:
//
//   product   g(a,b) = a*b            (linear activation, product pooling)
//   relu-max  g(a,b) = max{a,b,0}     (ReLU activation, max pooling)
//   relu-sum  g(a,b) = max{a,0}+max{b,0}  (ReLU activation, sum pooling;
//             expressively equivalent to average pooling, the 1/window
//             factors fold into the linear weights downstream)
//
// Rank and universality results depend on the exact semantics of each kind,
// so arbitrary user callbacks are deliberately not supported.
class PoolOperator {
 public:
  static PoolOperator product() { return PoolOperator(PoolKind::product); }
  static PoolOperator relu_max() { return PoolOperator(PoolKind::relu_max); }
  static PoolOperator relu_sum() { return PoolOperator(PoolKind::relu_sum); }

  // Parses the CLI/JSON token: "product" | "relu-max" | "relu-sum".
  // Throws ConfigError on anything else.
  static PoolOperator from_token(std::string_view token);

  static const std::array<PoolOperator, 3>& all();

  PoolKind kind() const { return kind_; }
  std::string_view token() const;

  double operator()(double a, double b) const {
    switch (kind_) {
      case PoolKind::product:
        return a * b;
      case PoolKind::relu_max:
        return a > b ? (a > 0.0 ? a : 0.0) : (b > 0.0 ? b : 0.0);
      case PoolKind::relu_sum:
      default:
        return (a > 0.0 ? a : 0.0) + (b > 0.0 ? b : 0.0);
    }
  }

 private:
  explicit PoolOperator(PoolKind kind) : kind_(kind) {}
  PoolKind kind_;
};

struct LawReport {
  double assoc_residual = 0.0;  // max |g(g(a,b),c) - g(a,g(b,c))|
  double comm_residual = 0.0;   // max |g(a,b) - g(b,a)|
  double assoc_bound = 0.0;     // rounding allowance for this kind
  int samples = 0;
  bool pass = false;
};

// Samples random triples in [-10,10]^3 and measures the law residuals.
// relu-max is exactly associative in floating point; relu-sum and product
// reassociate one addition/multiplication, so their residuals are bounded
// by a few ulps of the sampled magnitudes.
LawReport check_operator_laws(const PoolOperator& g, int samples,
                              std::uint64_t seed);

}  // namespace gtd
