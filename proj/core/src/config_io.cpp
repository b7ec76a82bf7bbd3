#include "wavecart/config_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wavecart/dataset_io.hpp"

namespace wavecart {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

long parse_int(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw DataError("config: " + key + ": expected integer, got '" + value + "'");
    return v;
}

double parse_real(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw DataError("config: " + key + ": expected number, got '" + value + "'");
    return v;
}

}  // namespace

void apply_config_entry(PipelineConfig& cfg, const std::string& key,
                        const std::string& value) {
    if (key == "m") cfg.m = static_cast<std::size_t>(parse_int(key, value));
    else if (key == "wavelet") cfg.wavelet = value;
    else if (key == "denoise_level_min") cfg.denoise_level_min = static_cast<int>(parse_int(key, value));
    else if (key == "denoise_level_max") cfg.denoise_level_max = static_cast<int>(parse_int(key, value));
    else if (key == "extension_mode") cfg.extension_mode = extension_mode_from_string(value);
    else if (key == "threshold_rule") cfg.threshold_rule = threshold_rule_from_string(value);
    else if (key == "elbow_threshold") cfg.elbow_threshold = parse_real(key, value);
    else if (key == "importance_keep_fraction") cfg.importance_keep_fraction = parse_real(key, value);
    else if (key == "low_signal_floor") cfg.low_signal_floor = parse_real(key, value);
    else if (key == "cv_folds") cfg.cv_folds = static_cast<int>(parse_int(key, value));
    else if (key == "cv_repeats") cfg.cv_repeats = static_cast<int>(parse_int(key, value));
    else if (key == "bootstrap_count") cfg.bootstrap_count = static_cast<int>(parse_int(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "forward_margin") cfg.forward_margin = parse_real(key, value);
    else if (key == "importance_mode") cfg.importance_mode = importance_mode_from_string(value);
    else if (key == "phase2_use_screened") cfg.phase2_use_screened = parse_int(key, value) != 0;
    else if (key == "phase5_strategy") cfg.phase5_strategy = phase5_strategy_from_string(value);
    else if (key == "final_top_k") cfg.final_top_k = static_cast<int>(parse_int(key, value));
    else if (key == "refinement_prefix_cap") cfg.refinement_prefix_cap = static_cast<int>(parse_int(key, value));
    else if (key == "min_node_size") cfg.min_node_size = static_cast<int>(parse_int(key, value));
    else if (key == "max_depth") cfg.max_depth = static_cast<int>(parse_int(key, value));
    else if (key == "surrogate_count") cfg.surrogate_count = static_cast<int>(parse_int(key, value));
    else if (key == "threads") cfg.threads = static_cast<int>(parse_int(key, value));
    else throw DataError("config: unknown key '" + key + "'");
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": expected key = value");
        apply_config_entry(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    const auto violations = base.validate();
    if (!violations.empty())
        throw DataError("config " + path.string() + ": " + violations.front());
    return base;
}

std::string config_to_text(const PipelineConfig& cfg) {
    std::ostringstream out;
    out << "m = " << cfg.m << "\n";
    out << "wavelet = " << cfg.wavelet << "\n";
    out << "denoise_level_min = " << cfg.denoise_level_min << "\n";
    out << "denoise_level_max = " << cfg.denoise_level_max << "\n";
    out << "extension_mode = " << to_string(cfg.extension_mode) << "\n";
    out << "threshold_rule = " << to_string(cfg.threshold_rule) << "\n";
    out << "elbow_threshold = " << format_double(cfg.elbow_threshold) << "\n";
    out << "importance_keep_fraction = " << format_double(cfg.importance_keep_fraction) << "\n";
    out << "low_signal_floor = " << format_double(cfg.low_signal_floor) << "\n";
    out << "cv_folds = " << cfg.cv_folds << "\n";
    out << "cv_repeats = " << cfg.cv_repeats << "\n";
    out << "bootstrap_count = " << cfg.bootstrap_count << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "forward_margin = " << format_double(cfg.forward_margin) << "\n";
    out << "importance_mode = " << to_string(cfg.importance_mode) << "\n";
    out << "phase2_use_screened = " << (cfg.phase2_use_screened ? 1 : 0) << "\n";
    out << "phase5_strategy = " << to_string(cfg.phase5_strategy) << "\n";
    out << "final_top_k = " << cfg.final_top_k << "\n";
    out << "refinement_prefix_cap = " << cfg.refinement_prefix_cap << "\n";
    out << "min_node_size = " << cfg.min_node_size << "\n";
    out << "max_depth = " << cfg.max_depth << "\n";
    out << "surrogate_count = " << cfg.surrogate_count << "\n";
    out << "threads = " << cfg.threads << "\n";
    return out.str();
}

}  // namespace wavecart
