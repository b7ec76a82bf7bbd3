#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wavecart/core_types.hpp"

namespace wavecart {

// Round-trip-exact double formatting ("%.17g").
std::string format_double(double v);

// Writes content to a temporary sibling file and renames it into place, so
// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// One-column CSV of reals. Reader tolerates CRLF and a trailing newline,
// rejects NaN/Inf and anything non-numeric.
std::vector<double> read_signal_csv(const std::filesystem::path& path);
void write_signal_csv(const std::filesystem::path& path, const std::vector<double>& values);

// Dataset manifest: manifest.json naming per-trial signal files.
Dataset load_dataset(const std::filesystem::path& manifest_path);
std::filesystem::path save_dataset(const Dataset& d, const std::filesystem::path& dir);

}  // namespace wavecart
