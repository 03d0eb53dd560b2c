#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace plshoot::cli {

/// Shortest decimal that parses back to the same double; inf, -inf, nan.
std::string fmt(double x);

/// Non-finite values become null.
nlohmann::json num(double x);

/// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Stable JSON text: sorted keys, two-space indent, trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace plshoot::cli
