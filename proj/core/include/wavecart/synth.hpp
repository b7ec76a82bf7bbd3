#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavecart/core_types.hpp"
#include "wavecart/preprocess.hpp"

namespace wavecart {

enum class EffectKind { bump_location_shift, amplitude_shift, slope_shift };

std::string to_string(EffectKind k);
EffectKind effect_kind_from_string(const std::string& s);

// Benchmark geometry mirroring the industrial data shape, with planted
// ground-truth discriminant variables replacing the confidential signals.
struct PlantSpec {
    int n = 114;
    int variable_count = 21;
    int class_count = 5;
    std::vector<double> class_frequencies = {0.33, 0.17, 0.17, 0.18, 0.15};
    std::vector<int> discriminant_variables = {5, 12, 17};  // 1-based
    std::vector<EffectKind> effect_kinds = {EffectKind::bump_location_shift,
                                            EffectKind::amplitude_shift,
                                            EffectKind::slope_shift};
    double effect_size = 1.0;
    double noise_sigma = 0.05;
    int marker_start_variable = 8;
    int marker_end_variable = 21;
    std::size_t raw_len_min = 600;
    std::size_t raw_len_max = 5000;
    std::size_t window_len_min = 302;
    std::size_t window_len_max = 698;
    double dt = 1.0 / 250.0;
    int high_frequency_variable = 14;  // non-discriminant, stresses level selection

    std::vector<std::string> validate() const;
};

struct GroundTruth {
    std::vector<int> discriminant_variables;
    std::vector<EffectKind> effect_kinds;
    double effect_size = 0.0;
    std::vector<int> labels;
    std::vector<ActiveWindow> windows;  // intended truncation per trial
    std::vector<int> class_counts;
};

struct SynthResult {
    Dataset dataset;
    GroundTruth truth;
};

SynthResult generate(const PlantSpec& spec, std::uint64_t seed);

}  // namespace wavecart
