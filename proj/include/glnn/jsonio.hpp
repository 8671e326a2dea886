#pragma once
#include <string>

#include <json.hpp>

#include "glnn/oracles.hpp"

namespace glnn {

std::string to_string(SystemKind k);
SystemKind system_kind_from_string(const std::string& s);

nlohmann::json params_to_json(const SystemParams& p);
SystemParams params_from_json(SystemKind kind, const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& body);

} // namespace glnn
