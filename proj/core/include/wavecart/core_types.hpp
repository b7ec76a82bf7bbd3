#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavecart {

// Thrown for problems rooted in the input data (bad manifests, invalid
// windows, signals too short, ...). The CLI maps it to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampling grid of one signal. Raw grids carry absolute time (t0 + k*dt,
// 250 Hz in the default benchmark); unit grids are the fixed {1/m, ..., 1}
// grid every trial is resampled onto.
struct Grid {
    enum class Kind { raw, unit };

    Kind kind = Kind::raw;
    double t0 = 0.0;   // raw only
    double dt = 0.0;   // raw only, seconds
    std::size_t len = 0;

    static Grid raw(double t0, double dt, std::size_t len) {
        return Grid{Kind::raw, t0, dt, len};
    }
    static Grid unit(std::size_t m) { return Grid{Kind::unit, 0.0, 0.0, m}; }

    // Position of sample k in the signal's own time parameterisation:
    // relative [0,1] for raw grids, {1/m,...,1} for unit grids.
    double position(std::size_t k) const;

    bool valid() const;
};

struct Signal {
    Grid grid;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

// One essai: an ordinal label and J signals sharing the trial's grid.
struct Trial {
    std::string id;
    int label = 0;  // 1..class_count
    std::vector<Signal> signals;
};

struct Dataset {
    std::vector<Trial> trials;
    int class_count = 0;
    std::vector<std::string> variable_names;
    // 1-based variable indices of the start/end event markers.
    int marker_start_index = 8;
    int marker_end_index = 21;

    std::size_t trial_count() const { return trials.size(); }
    std::size_t variable_count() const { return variable_names.size(); }
};

enum class ExtensionMode { symmetric, periodic, zero_pad };
enum class ThresholdRule { soft, hard };
enum class ImportanceMode { primary_only, primary_plus_surrogate };
enum class Phase5Strategy { nested, top_k };

std::string to_string(ExtensionMode m);
std::string to_string(ThresholdRule r);
std::string to_string(ImportanceMode m);
std::string to_string(Phase5Strategy s);
ExtensionMode extension_mode_from_string(const std::string& s);
ThresholdRule threshold_rule_from_string(const std::string& s);
ImportanceMode importance_mode_from_string(const std::string& s);
Phase5Strategy phase5_strategy_from_string(const std::string& s);

// Every knob in the pipeline, with the defaults used throughout.
struct PipelineConfig {
    std::size_t m = 512;                      // resample length (2^9)
    std::string wavelet = "sym4";             // near-symmetric Daubechies order 4
    int denoise_level_min = 3;
    int denoise_level_max = 5;
    ExtensionMode extension_mode = ExtensionMode::symmetric;
    ThresholdRule threshold_rule = ThresholdRule::soft;
    double elbow_threshold = 3.0;             // theta in the level-selection rule
    double importance_keep_fraction = 0.2;    // alpha in phase-1 screening
    double low_signal_floor = 1.0;            // raw importance floor for the low-signal flag
    int cv_folds = 10;
    int cv_repeats = 5;
    int bootstrap_count = 25;                 // B bagged trees for importance
    std::uint64_t seed = 0;
    double forward_margin = 0.0;              // delta in the phase-3 keep test
    ImportanceMode importance_mode = ImportanceMode::primary_plus_surrogate;
    bool phase2_use_screened = true;
    Phase5Strategy phase5_strategy = Phase5Strategy::nested;
    int final_top_k = 5;
    int refinement_prefix_cap = 15;
    int min_node_size = 5;
    int max_depth = 30;
    int surrogate_count = 5;
    int threads = 0;                          // 0 = all available cores

    // Returns human-readable violations; empty when the config is usable.
    std::vector<std::string> validate() const;
};

// Reports every invariant breach in the dataset; never throws.
std::vector<std::string> validate_dataset(const Dataset& d);

}  // namespace wavecart
