#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tailreg/cli/presets.hpp"

namespace tailreg::cli {

/// TOML document with one [[experiment]] table per curve. Reals are written
/// with 17 significant digits so a parse of the output reproduces every bit.
std::string to_toml(const std::vector<Curve>& curves);

/// Throws UsageError on syntax errors, unknown keys and invalid values.
std::vector<Curve> parse_toml(std::string_view text, std::string_view source = "config");
std::vector<Curve> load_config(const std::filesystem::path& path);

/// 16 hex digits of FNV-1a over the canonical TOML of the curve with the
/// worker count left out (workers never change results).
std::string config_hash(const Curve& curve);

}  // namespace tailreg::cli
