#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "wavecart/core_types.hpp"

namespace wavecart {

// Flat key = value config file; '#' starts a comment. Unknown keys are an
// error so typos do not silently fall back to defaults.
PipelineConfig load_config(const std::filesystem::path& path,
                           PipelineConfig base = PipelineConfig{});

// Applies key/value overrides (same keys as the file format) on top of cfg.
void apply_config_entry(PipelineConfig& cfg, const std::string& key,
                        const std::string& value);

std::string config_to_text(const PipelineConfig& cfg);

}  // namespace wavecart
