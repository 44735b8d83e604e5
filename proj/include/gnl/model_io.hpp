#pragma once

#include <filesystem>
#include <json.hpp>

#include "gnl/model.hpp"

namespace gnl {

/// Dense JSON form {"coeffs": [[[...]]]}; row-major matrices.
nlohmann::json model_to_json(const CoeffModel& m);

/// Accepts either the dense form {"coeffs": [...]} or the generator form
/// {"generator": name, "params": {...}, "seed": n}. Generator params use the
/// GenParams field names; matrix-valued params are row-major nested arrays.
CoeffModel model_from_json(const nlohmann::json& j);

CoeffModel load_model_file(const std::filesystem::path& path);
void save_model_file(const CoeffModel& m, const std::filesystem::path& path);

}  // namespace gnl
