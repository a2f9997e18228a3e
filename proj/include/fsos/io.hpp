#pragma once

#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "fsos/certify.hpp"
#include "fsos/features.hpp"
#include "fsos/optimizer.hpp"
#include "fsos/psd_model.hpp"
#include "fsos/trig_poly.hpp"

namespace fsos {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Half-space coefficients plus k = 0, in canonical order.
Json to_json(const TrigPoly& p);
TrigPoly trig_poly_from_json(const Json& j);

Json to_json(const FeatureMap& map);
std::shared_ptr<FeatureMap> feature_map_from_json(const Json& j);

/// Dense models are re-verified PSD on load (MalformedInput otherwise).
Json to_json(const PsdModel& model);
PsdModel psd_model_from_json(const Json& j);

Json to_json(const Certificate& cert);

Json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::string& path, const Json& j);

/// Columns iter,objective_estimate,grad_norm.
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace);

/// Columns k_degree,|f_hat|,|g_hat|,residual; one row for k = 0 and each
/// half-space k with |k| <= radius.
void write_plot_csv(const std::string& path, const TrigPoly& f, const PsdModel& model, int radius);

/// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const Json& config);

}  // namespace fsos
