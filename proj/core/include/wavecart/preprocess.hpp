#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wavecart/core_types.hpp"

namespace wavecart {

// Active window of a trial, inclusive sample indices on the raw grid.
struct ActiveWindow {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - start + 1; }
};

// Reads the "true start" / "true end" events off the two marker signals.
// Markers are min-max normalized; the start is the first upward crossing of
// frac, the end the last downward crossing.
ActiveWindow detect_active_window(const Signal& start_marker, const Signal& end_marker,
                                  double frac = 0.5);

// Restricts every signal of the trial to [window.start, window.end].
Trial truncate(const Trial& t, const ActiveWindow& window);

// Affine time rescale onto [0,1] followed by linear interpolation at
// {1/m, ..., 1}.
Signal resample_to_unit_grid(const Signal& s, std::size_t m);

// Per-signal z-score (population standard deviation); constants map to zeros.
Signal normalize_amplitude(const Signal& s);

struct TrialAudit {
    std::string trial_id;
    std::size_t window_start = 0;
    std::size_t window_end = 0;
    std::size_t truncated_length = 0;
    std::vector<int> denoise_levels;  // per variable
};

struct PreprocessAudit {
    std::vector<std::string> stage_order;
    std::vector<TrialAudit> trials;
};

// Full per-trial pipeline: truncate -> denoise -> resample -> normalize.
// Denoising runs before any interpolation so the noise model stays white.
Dataset preprocess_dataset(const Dataset& d, const PipelineConfig& cfg,
                           PreprocessAudit* audit = nullptr);

}  // namespace wavecart
