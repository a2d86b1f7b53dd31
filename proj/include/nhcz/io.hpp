#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nhcz/mspace.hpp"

namespace nhcz {

nlohmann::json to_json(const DiscreteSpace& space);
DiscreteSpace space_from_json(const nlohmann::json& j);

/// Built-in families only; custom rules have no file form.
nlohmann::json to_json(const DominatingFunction& lambda);
DominatingFunction lambda_from_json(const nlohmann::json& j, std::size_t point_count);

FunctionOnSpace function_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j, int indent = 2);

}  // namespace nhcz
