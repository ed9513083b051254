#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "slh/families.hpp"

namespace slh::io {

using nlohmann::json;

/// Matrices are nested arrays of [re, im] pairs; vectors are arrays of
/// [re, im]. Dimensions are inferred and validated on read.
json to_json(const Operator& a);
Operator operator_from_json(const json& j);

json to_json(const Eigen::VectorXcd& v);
Eigen::VectorXcd vector_from_json(const json& j);

json to_json(const SLHModel& g);
/// With check=false the structural shape is still enforced but the algebraic
/// constraints (unitarity, hermiticity) are left to the caller.
SLHModel model_from_json(const json& j, double eps = structural_tol, bool check = true);

json to_json(const ExponentialState& psi);
ExponentialState state_from_json(const json& j);

json to_json(const GaugeElement& g);
GaugeElement gauge_from_json(const json& j);

/// Header "k,distance,delta_residual,oracle_value,oracle_error"; floats at
/// 17 significant digits; oracle columns empty when absent. Byte-identical
/// for identical reports.
std::string to_csv(const ConvergenceReport& report);

void write_file(const std::string& path, const std::string& content);
json read_json_file(const std::string& path);

/// 17-significant-digit decimal rendering used for all CSV floats.
std::string format_double(double x);

}  // namespace slh::io
