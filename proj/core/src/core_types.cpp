#include "wavecart/core_types.hpp"

#include <cmath>

namespace wavecart {

double Grid::position(std::size_t k) const {
    if (kind == Kind::unit) return static_cast<double>(k + 1) / static_cast<double>(len);
    return len < 2 ? 0.0 : static_cast<double>(k) / static_cast<double>(len - 1);
}

bool Grid::valid() const {
    if (len < 2) return false;
    if (kind == Kind::raw) return dt > 0.0;
    return true;
}

std::string to_string(ExtensionMode m) {
    switch (m) {
        case ExtensionMode::symmetric: return "symmetric";
        case ExtensionMode::periodic: return "periodic";
        case ExtensionMode::zero_pad: return "zero-pad";
    }
    return "symmetric";
}

std::string to_string(ThresholdRule r) {
    return r == ThresholdRule::soft ? "soft" : "hard";
}

std::string to_string(ImportanceMode m) {
    return m == ImportanceMode::primary_only ? "primary_only" : "primary_plus_surrogate";
}

std::string to_string(Phase5Strategy s) {
    return s == Phase5Strategy::nested ? "nested" : "top_k";
}

ExtensionMode extension_mode_from_string(const std::string& s) {
    if (s == "symmetric") return ExtensionMode::symmetric;
    if (s == "periodic") return ExtensionMode::periodic;
    if (s == "zero-pad" || s == "zero_pad") return ExtensionMode::zero_pad;
    throw std::invalid_argument("unknown extension mode: " + s);
}

ThresholdRule threshold_rule_from_string(const std::string& s) {
    if (s == "soft") return ThresholdRule::soft;
    if (s == "hard") return ThresholdRule::hard;
    throw std::invalid_argument("unknown threshold rule: " + s);
}

ImportanceMode importance_mode_from_string(const std::string& s) {
    if (s == "primary_only") return ImportanceMode::primary_only;
    if (s == "primary_plus_surrogate") return ImportanceMode::primary_plus_surrogate;
    throw std::invalid_argument("unknown importance mode: " + s);
}

Phase5Strategy phase5_strategy_from_string(const std::string& s) {
    if (s == "nested") return Phase5Strategy::nested;
    if (s == "top_k") return Phase5Strategy::top_k;
    throw std::invalid_argument("unknown phase-5 strategy: " + s);
}

std::vector<std::string> PipelineConfig::validate() const {
    std::vector<std::string> v;
    auto positive = [&](double x, const char* name) {
        if (!(x > 0)) v.push_back(std::string(name) + " must be positive");
    };
    positive(static_cast<double>(m), "m");
    positive(cv_folds, "cv_folds");
    positive(cv_repeats, "cv_repeats");
    positive(bootstrap_count, "bootstrap_count");
    positive(min_node_size, "min_node_size");
    positive(max_depth, "max_depth");
    positive(final_top_k, "final_top_k");
    positive(refinement_prefix_cap, "refinement_prefix_cap");
    if (!(importance_keep_fraction > 0.0 && importance_keep_fraction <= 1.0))
        v.push_back("importance_keep_fraction must be in (0, 1]");
    if (!(elbow_threshold > 1.0)) v.push_back("elbow_threshold must be > 1");
    if (denoise_level_min < 1 || denoise_level_max < denoise_level_min)
        v.push_back("denoise level range must satisfy 1 <= min <= max");
    if (forward_margin < 0.0) v.push_back("forward_margin must be >= 0");
    if (surrogate_count < 0) v.push_back("surrogate_count must be >= 0");
    if (threads < 0) v.push_back("threads must be >= 0");
    return v;
}

namespace {

bool all_finite(const std::vector<double>& values) {
    for (double x : values)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

std::vector<std::string> validate_dataset(const Dataset& d) {
    std::vector<std::string> out;
    const std::size_t J = d.variable_count();

    if (d.trials.empty()) out.push_back("dataset has no trials");
    if (d.class_count < 2) out.push_back("class_count must be at least 2");
    if (J == 0) out.push_back("dataset declares no variables");

    auto marker_ok = [&](int idx) { return idx >= 1 && idx <= static_cast<int>(J); };
    if (!marker_ok(d.marker_start_index))
        out.push_back("marker_start_index out of range");
    if (!marker_ok(d.marker_end_index))
        out.push_back("marker_end_index out of range");
    if (d.marker_start_index == d.marker_end_index)
        out.push_back("marker indices must be distinct");

    for (const Trial& t : d.trials) {
        if (t.signals.size() != J) {
            out.push_back("trial " + t.id + ": has " + std::to_string(t.signals.size()) +
                          " signals, expected " + std::to_string(J));
            continue;
        }
        if (t.label < 1 || t.label > d.class_count)
            out.push_back("trial " + t.id + ": label out of range (" +
                          std::to_string(t.label) + " not in 1.." +
                          std::to_string(d.class_count) + ")");
        std::size_t len0 = t.signals.empty() ? 0 : t.signals.front().size();
        for (std::size_t j = 0; j < t.signals.size(); ++j) {
            const Signal& s = t.signals[j];
            const std::string where =
                "trial " + t.id + ", variable " + std::to_string(j + 1);
            if (!s.grid.valid()) out.push_back(where + ": invalid grid");
            if (s.values.size() != s.grid.len)
                out.push_back(where + ": value count does not match grid length");
            if (!all_finite(s.values)) out.push_back(where + ": non-finite values");
            if (s.values.size() != len0)
                out.push_back(where + ": length differs from the trial's first signal");
        }
    }
    return out;
}

}  // namespace wavecart
