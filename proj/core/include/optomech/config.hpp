#pragma once

// key = value configuration with '#' comments. Parsing is fail-closed: unknown
// keys, duplicate keys, and malformed values are hard errors, so a typo cannot
// silently fall back to a default.

#include <map>
#include <string>

#include "optomech/params.hpp"

namespace optomech {

using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

// Applies one "key=value" override (the CLI --set form).
void apply_override(ConfigMap& cfg, const std::string& assignment);

// Validates and derives. Throws Error with a config errc on any problem.
SystemParams build_params(const ConfigMap& cfg);

// Canonical resolved form; build_params(parse_config_text(...)) round-trips to
// the same SystemParams.
std::string serialize_config(const SystemParams& p);

// Built-in nominal operating point (direct dispersion, red-detuned drive).
SystemParams default_params();
ConfigMap default_config();

}  // namespace optomech
