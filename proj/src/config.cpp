#include "gtd/config.hpp"

#include <string>

#include "gtd/errors.hpp"

namespace gtd {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end())
    throw ConfigError("config is missing required field '" +
                      std::string(name) + "'");
  return *it;
}

int int_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer())
    throw ConfigError("field '" + std::string(name) + "' must be an integer");
  return v.get<int>();
}

std::vector<double> as_vec(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(what + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> as_vec2(const json& j,
                                         const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be a nested array");
  std::vector<std::vector<double>> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(as_vec(v, what));
  return out;
}

std::vector<std::vector<std::vector<double>>> as_vec3(
    const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be a nested array");
  std::vector<std::vector<std::vector<double>>> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(as_vec2(v, what));
  return out;
}

Matrix as_matrix(const json& j, const std::string& what) {
  const auto rows = as_vec2(j, what);
  if (rows.empty()) throw ConfigError(what + " must be non-empty");
  const int cols = static_cast<int>(rows[0].size());
  Matrix m(static_cast<int>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != cols)
      throw ConfigError(what + " rows must have equal length");
    for (int c = 0; c < cols; ++c) m(static_cast<int>(i), c) = rows[i][c];
  }
  return m;
}

std::vector<int> as_int_vec(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of integers");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer())
      throw ConfigError(what + " must contain only integers");
    out.push_back(v.get<int>());
  }
  return out;
}

ReprFamily parse_repr(const json& j, const Templates& templates, int m) {
  const json& kind_field = field(j, "kind");
  if (!kind_field.is_string())
    throw ConfigError("repr.kind must be a string");
  const std::string kind = kind_field.get<std::string>();
  if (kind == "raw-coordinates") return ReprFamily::raw_coordinates(m);
  if (kind == "identity-onehot") return ReprFamily::identity_onehot(templates);
  if (kind == "relu" || kind == "sigmoid") {
    auto w = as_vec2(field(j, "w"), "repr.w");
    auto b = as_vec(field(j, "b"), "repr.b");
    if (kind == "relu") return ReprFamily::relu_neurons(std::move(w), std::move(b));
    const double alpha = j.contains("alpha") ? j["alpha"].get<double>() : 1.0;
    return ReprFamily::sigmoid_neurons(std::move(w), std::move(b), alpha);
  }
  throw ConfigError("unknown repr.kind '" + kind +
                    "' (expected relu | sigmoid | raw-coordinates | "
                    "identity-onehot)");
}

CpParams parse_cp(const json& weights, int m, int n) {
  CpParams p;
  p.m = m;
  p.n = n;
  p.conv = as_vec3(field(weights, "conv"), "weights.conv");
  p.output = as_vec(field(weights, "output"), "weights.output");
  p.validate();
  return p;
}

SharedCpParams parse_shared_cp(const json& weights, int m, int n) {
  SharedCpParams p;
  p.m = m;
  p.n = n;
  p.conv = as_vec2(field(weights, "conv"), "weights.conv");
  p.output = as_vec(field(weights, "output"), "weights.output");
  p.validate();
  return p;
}

HtParams parse_ht(const json& weights, const std::vector<int>& widths, int m,
                  int n) {
  HtParams p;
  p.m = m;
  p.n = n;
  p.widths = widths;
  p.level0 = as_vec3(field(weights, "level0"), "weights.level0");
  if (weights.contains("levels")) {
    const json& levels = weights["levels"];
    if (!levels.is_array())
      throw ConfigError("weights.levels must be an array per level");
    for (const auto& level : levels)
      p.levels.push_back(as_vec3(level, "weights.levels"));
  }
  p.output = as_vec(field(weights, "output"), "weights.output");
  p.validate();
  return p;
}

SharedHtParams parse_shared_ht(const json& weights,
                               const std::vector<int>& widths, int m, int n) {
  SharedHtParams p;
  p.m = m;
  p.n = n;
  p.widths = widths;
  p.level0 = as_vec2(field(weights, "level0"), "weights.level0");
  if (weights.contains("levels")) {
    const json& levels = weights["levels"];
    if (!levels.is_array())
      throw ConfigError("weights.levels must be an array per level");
    for (const auto& level : levels)
      p.levels.push_back(as_vec2(level, "weights.levels"));
  }
  p.output = as_vec(field(weights, "output"), "weights.output");
  p.validate();
  return p;
}

}  // namespace

Matrix load_f(const std::string& spec, int m) {
  if (spec == "identity") return Matrix::identity(m);
  const Tensor t = read_gten_file(spec);
  Matrix f = Matrix::from_tensor(t);
  if (f.rows() != m || f.cols() != m)
    throw ConfigError("representation matrix in " + spec + " is not m x m");
  return f;
}

GridJob parse_grid_config(const json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  GridJob job;
  job.n = int_field(config, "n");
  job.m = int_field(config, "m");
  if (job.n < 1 || job.m < 1) throw ConfigError("n and m must be >= 1");

  const std::string op_token =
      config.contains("operator") ? config["operator"].get<std::string>()
                                  : "product";
  job.op = PoolOperator::from_token(op_token);

  const bool shared = config.contains("shared") && config["shared"].get<bool>();
  const std::string f_spec =
      config.contains("f") ? config["f"].get<std::string>() : "identity";

  if (config.contains("templates")) {
    std::vector<Patch> vecs;
    for (const auto& row : field(config, "templates"))
      vecs.push_back(as_vec(row, "templates"));
    job.templates = Templates(std::move(vecs));
    if (job.templates->count() != job.m)
      throw ConfigError("need exactly m templates");
  }
  if (config.contains("repr")) {
    if (!job.templates)
      throw ConfigError("repr requires templates");
    job.repr = parse_repr(config["repr"], *job.templates, job.m);
  }

  if (job.templates && job.repr) {
    job.f = build_repr_matrix(*job.templates, *job.repr);
  } else {
    job.f = load_f(f_spec, job.m);
  }

  const bool has_mode = config.contains("mode");
  const bool has_arch = config.contains("architecture");
  if (has_mode == has_arch)
    throw ConfigError("config needs exactly one of 'mode' or 'architecture'");

  if (has_mode) {
    const std::string mode = config["mode"].get<std::string>();
    const json& weights = field(config, "weights");
    if (mode == "cp") {
      if (shared)
        job.shared_cp_params = parse_shared_cp(weights, job.m, job.n);
      else
        job.cp = parse_cp(weights, job.m, job.n);
    } else if (mode == "ht") {
      const std::vector<int> widths =
          as_int_vec(field(config, "widths"), "widths");
      if (shared)
        job.shared_ht_params = parse_shared_ht(weights, widths, job.m, job.n);
      else
        job.ht = parse_ht(weights, widths, job.m, job.n);
    } else {
      throw ConfigError("unknown mode '" + mode + "' (expected cp | ht)");
    }
    return job;
  }

  job.architecture = config["architecture"].get<std::string>();
  const json& weights = field(config, "weights");
  if (job.architecture == "shallow") {
    // Shared configs replicate one vector per channel across locations.
    job.cp = shared ? unshare(parse_shared_cp(weights, job.m, job.n))
                    : parse_cp(weights, job.m, job.n);
  } else if (job.architecture == "deep") {
    const std::vector<int> widths =
        as_int_vec(field(config, "widths"), "widths");
    job.ht = shared ? unshare(parse_shared_ht(weights, widths, job.m, job.n))
                    : parse_ht(weights, widths, job.m, job.n);
  } else if (job.architecture == "shallow-wxh") {
    WxhParams p;
    p.k = int_field(config, "k");
    const auto conv = field(weights, "conv");
    if (!conv.is_array()) throw ConfigError("weights.conv must be an array");
    for (const auto& channel : conv) {
      std::vector<Matrix> mats;
      for (const auto& mat : channel)
        mats.push_back(as_matrix(mat, "weights.conv matrices"));
      p.conv.push_back(std::move(mats));
    }
    p.output = as_vec(field(weights, "output"), "weights.output");
    p.validate(job.m);
    if (p.n() != job.n)
      throw ConfigError("weights.conv must cover all n locations");
    job.wxh = std::move(p);
  } else if (job.architecture == "shallow-fc") {
    FcParams p;
    for (const auto& mat : field(weights, "hidden"))
      p.hidden.push_back(as_matrix(mat, "weights.hidden matrices"));
    p.output = as_vec(field(weights, "output"), "weights.output");
    p.validate(job.n, job.m);
    job.fc = std::move(p);
  } else {
    throw ConfigError("unknown architecture '" + job.architecture +
                      "' (expected shallow | deep | shallow-wxh | shallow-fc)");
  }
  return job;
}

Tensor run_grid_job(const GridJob& job) {
  if (job.cp && job.architecture.empty())
    return generalized_cp(*job.cp, job.f, job.op);
  if (job.shared_cp_params)
    return shared_cp(*job.shared_cp_params, job.f, job.op);
  if (job.ht && job.architecture.empty())
    return generalized_ht(*job.ht, job.f, job.op);
  if (job.shared_ht_params)
    return shared_ht(*job.shared_ht_params, job.f, job.op);

  // Network architectures run through the actual forward pass on template
  // patches. With f=identity and no templates, standard-basis templates
  // with raw-coordinate representations give F = I exactly.
  Templates templates =
      job.templates ? *job.templates : [&] {
        std::vector<Patch> basis;
        for (int d = 0; d < job.m; ++d) {
          Patch e(static_cast<std::size_t>(job.m), 0.0);
          e[static_cast<std::size_t>(d)] = 1.0;
          basis.push_back(std::move(e));
        }
        return Templates(std::move(basis));
      }();
  ReprFamily reps =
      job.repr ? *job.repr : ReprFamily::raw_coordinates(job.m);
  if (!job.templates) {
    bool identity = true;
    for (int i = 0; i < job.m && identity; ++i)
      for (int j = 0; j < job.m && identity; ++j)
        if (job.f(i, j) != (i == j ? 1.0 : 0.0)) identity = false;
    if (!identity)
      throw ConfigError(
          "network architectures need templates+repr unless f is identity");
  }

  if (job.architecture == "shallow") {
    const CpParams& p = *job.cp;
    return grid_tensor(
        [&](std::span<const Patch> patches) {
          return shallow_score(patches, p, reps, job.op);
        },
        templates, job.n);
  }
  if (job.architecture == "deep") {
    const HtParams& p = *job.ht;
    return grid_tensor(
        [&](std::span<const Patch> patches) {
          return deep_score(patches, p, reps, job.op);
        },
        templates, job.n);
  }
  if (job.architecture == "shallow-wxh")
    return wxh_grid_tensor(*job.wxh, job.f, job.n);
  if (job.architecture == "shallow-fc")
    return fc_grid_tensor(*job.fc, job.f, job.n);
  throw ConfigError("grid job has no runnable payload");
}

}  // namespace gtd
