#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "wnl/commutators.hpp"
#include "wnl/grid_function.hpp"
#include "wnl/operators.hpp"
#include "wnl/weights.hpp"

namespace wnl {

nlohmann::json box_to_json(const Box& b);
Box box_from_json(const nlohmann::json& j);

nlohmann::json mesh_to_json(const MeshSpec& m);
MeshSpec mesh_from_json(const nlohmann::json& j);

nlohmann::json family_to_json(const CubeFamily& f);
CubeFamily family_from_json(const nlohmann::json& j);

/// {family, params}; nested providers serialize recursively.
nlohmann::json provider_to_json(const Provider& p);
Provider provider_from_json(const nlohmann::json& j);

/// {dimension, box, mesh}
nlohmann::json grid_to_json(const Grid& g);
GridPtr grid_from_json(const nlohmann::json& j);

/// {dimension, box, mesh, cells:[{mid, measure, value}], provider}; provider is null when absent.
nlohmann::json function_to_json(const GridFunction& f);
/// Rebuilds the grid from its spec; a provider is re-evaluated, otherwise stored values are used.
GridFunction function_from_json(const nlohmann::json& j);

/// {kind, params, estimate, ceiling, extremal_cube, family, pass}
nlohmann::json report_json(const std::string& kind, const nlohmann::json& params, double estimate,
                           std::optional<double> ceiling, const std::optional<Box>& extremal_cube,
                           const std::string& family, bool pass);

nlohmann::json to_json(const ApReport& r);
nlohmann::json to_json(const BmoReport& r);
nlohmann::json to_json(const JNConstants& r);
nlohmann::json to_json(const ExpBmoReport& r);
nlohmann::json to_json(const RhiReport& r);
nlohmann::json to_json(const CzDecomposition& r);
nlohmann::json to_json(const NormEstimate& r);
nlohmann::json to_json(const ContourConfig& c);
ContourConfig contour_config_from_json(const nlohmann::json& j);
/// Summary of a commutator output: method tag, order, residue, deviation, max |output|.
nlohmann::json to_json(const CommutatorResult& r);

}  // namespace wnl
