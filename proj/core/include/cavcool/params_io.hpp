#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cavcool/params.hpp"

namespace cavcool {

nlohmann::json to_json(const SystemParams& p);
nlohmann::json to_json(const DerivedParams& d);

/// Reads a flat {"key": number} object, or the "params" member of a larger
/// document, on top of `base`. Unknown keys and non-numeric values throw
/// ParamError naming the key.
SystemParams params_from_json(const nlohmann::json& doc, SystemParams base = {});
SystemParams load_params_file(const std::filesystem::path& path, SystemParams base = {});

/// Parses a numeric value for `key`. Besides plain numbers, multiples and
/// fractions of pi are accepted: "pi", "pi/3", "2*pi/3", "0.5pi".
double parse_value(std::string_view key, std::string_view text);

/// Applies a "key=value" override.
void apply_override(SystemParams& p, std::string_view assignment);

}  // namespace cavcool
