#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kanver/network.hpp"

namespace kanver {

/// Parses a `.kan.json` document. Throws ModelError carrying the JSON pointer
/// of the first offending node.
KanNetwork load_model(std::string_view text);
/// Canonical form: sorted keys, shortest round-trip floats.
std::string save_model(const KanNetwork& net);

KanNetwork load_model_file(const std::filesystem::path& path);
void save_model_file(const KanNetwork& net, const std::filesystem::path& path);

nlohmann::json unit_to_json(const UnivariateUnit& unit);
UnivariateUnit unit_from_json(const nlohmann::json& doc, const std::string& path);

}  // namespace kanver
