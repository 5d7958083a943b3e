#include "idlab/json_io.hpp"

#include <cmath>

namespace idlab {

namespace {

json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json reals(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

}  // namespace

void to_json(json& j, const EstimatorSpec& v) {
  j = json{{"name", v.name}, {"params", v.params}, {"locality", std::string(to_string(v.locality))}};
}

void to_json(json& j, const IdEstimate& v) {
  json diag = json::object();
  for (const auto& [k, x] : v.diagnostics) diag[k] = real(x);
  j = json{{"value", real(v.value)},
           {"n_used", v.n_used},
           {"estimator", v.estimator},
           {"diagnostics", diag}};
}

void to_json(json& j, const IdProfile& v) {
  json layers = json::array();
  for (std::size_t i = 0; i < v.per_layer.size(); ++i) {
    if (v.per_layer[i]) {
      layers.push_back(*v.per_layer[i]);
    } else {
      layers.push_back(json{{"missing", true}, {"error", v.errors[i]}});
    }
  }
  j = json{{"estimator", v.estimator}, {"dataset_id", v.dataset_id}, {"model_id", v.model_id},
           {"d_ambient", v.d_ambient}, {"per_layer", layers}};
}

void to_json(json& j, const ProfileAggregate& v) {
  j = json{{"max", real(v.max)},       {"min", real(v.min)},     {"mean", real(v.mean)},
           {"median", real(v.median)}, {"first", real(v.first)}, {"last", real(v.last)},
           {"change", real(v.change)}, {"range", real(v.range)}, {"median_rule", "lower-middle"}};
}

void to_json(json& j, const ConvergenceCurve& v) {
  j = json{{"estimator", v.estimator}, {"sizes", v.sizes},       {"mean_id", reals(v.mean_id)},
           {"std_id", reals(v.std_id)}, {"seeds", v.seeds},      {"warnings", v.warnings},
           {"std_convention", "sample"}};
}

void to_json(json& j, const ShallowDescriptors& v) {
  j = json{{"vocab_size", v.vocab_size},     {"vocab_entropy_bits", v.vocab_entropy},
           {"avg_seq_len", v.avg_seq_len},   {"n_tokens", v.n_tokens},
           {"n_sequences", v.n_sequences}};
}

void to_json(json& j, const DatasetPpl& v) {
  j = json{{"avg_ppl", real(v.avg_ppl)},
           {"coding_length_bits", real(v.coding_length_bits)},
           {"token_weighted_ppl", real(v.token_weighted_ppl)},
           {"n_sequences", v.n_sequences},
           {"n_scored_tokens", v.n_scored}};
}

void to_json(json& j, const AdaptationMetrics& v) {
  j = json{{"T", v.T},
           {"iterations", v.iterations},
           {"final_ppl", real(v.final_ppl)},
           {"last_ppl", real(v.last_ppl)},
           {"sample_complexity", real(v.sample_complexity)},
           {"converged", v.converged}};
}

void to_json(json& j, const CorrelationReport& v) {
  j = json{{"rho", real(v.rho)},
           {"p_value", real(v.p_value)},
           {"n", v.n},
           {"p_method", v.p_method},
           {"significant_at", v.significant_at ? json(*v.significant_at) : json(nullptr)}};
}

void to_json(json& j, const CorrelationMatrix& v) {
  json cells = json::array();
  for (std::size_t a = 0; a < v.columns.size(); ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < v.columns.size(); ++b) {
      json c = v.cells[a][b] ? json(*v.cells[a][b]) : json{{"error", v.errors[a][b]}};
      c["masked"] = static_cast<bool>(v.masked[a][b]);
      row.push_back(c);
    }
    cells.push_back(row);
  }
  j = json{{"columns", v.columns}, {"alpha", v.alpha}, {"cells", cells}};
}

void to_json(json& j, const LinkageEntry& v) {
  j = json{{"x", v.x}, {"y", v.y}};
  if (v.report) {
    j["report"] = *v.report;
  } else {
    j["report"] = nullptr;
    j["error"] = v.error;
  }
}

void to_json(json& j, const LinkageReport& v) {
  j = json{{"headline", v.headline}, {"descriptors", v.descriptors}};
}

void to_json(json& j, const BenchCell& v) {
  j = json{{"family", v.family},       {"d", v.d},
           {"estimator", v.estimator}, {"truth", v.truth},
           {"value", real(v.value)},   {"tolerance", v.tolerance},
           {"pass", v.pass},           {"error", v.error},
           {"seconds", v.seconds}};
}

}  // namespace idlab
