#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "gtd/decompositions.hpp"
#include "gtd/networks.hpp"
#include "gtd/tensor.hpp"

namespace gtd {

// Loads F from a config value: "identity" (m x m identity) or a path to an
// order-2 GTEN1 dump.
Matrix load_f(const std::string& spec, int m);

// A parsed grid-tensor job. Configs describe either a decomposition
// ("mode": "cp" | "ht", optionally "shared") or a network forward pass
// ("architecture": "shallow" | "deep" | "shallow-wxh" | "shallow-fc").
// See README for the full JSON schema.
struct GridJob {
  int n = 0;
  int m = 0;
  PoolOperator op = PoolOperator::product();

  // decomposition form
  std::optional<CpParams> cp;
  std::optional<SharedCpParams> shared_cp_params;
  std::optional<HtParams> ht;
  std::optional<SharedHtParams> shared_ht_params;

  // network form
  std::string architecture;  // empty for decomposition configs
  std::optional<WxhParams> wxh;
  std::optional<FcParams> fc;
  std::optional<Templates> templates;
  std::optional<ReprFamily> repr;

  Matrix f = Matrix::identity(1);
};

// Throws ConfigError with a descriptive message on schema violations.
GridJob parse_grid_config(const nlohmann::json& config);

Tensor run_grid_job(const GridJob& job);

}  // namespace gtd
