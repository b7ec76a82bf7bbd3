#include "wavecart/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavecart/parallel.hpp"
#include "wavecart/wavelet.hpp"

namespace wavecart {

namespace {

std::vector<double> min_max_scaled(const std::vector<double>& v) {
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(v.size());
    if (hi <= lo) return out;  // flat marker, all zeros
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) / (hi - lo);
    return out;
}

}  // namespace

ActiveWindow detect_active_window(const Signal& start_marker, const Signal& end_marker,
                                  double frac) {
    if (start_marker.size() != end_marker.size())
        throw DataError("detect_active_window: markers on different grids");
    if (!(frac > 0.0 && frac < 1.0))
        throw std::invalid_argument("detect_active_window: frac must be in (0,1)");
    if (start_marker.size() < 2)
        throw DataError("detect_active_window: marker too short");

    const std::vector<double> s = min_max_scaled(start_marker.values);
    const std::vector<double> e = min_max_scaled(end_marker.values);

    // First upward crossing of the start marker.
    std::size_t i_start = 0;
    bool found_start = false;
    if (s[0] >= frac) {
        i_start = 0;
        found_start = true;
    } else {
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (s[i - 1] < frac && s[i] >= frac) {
                i_start = i;
                found_start = true;
                break;
            }
        }
    }
    if (!found_start)
        throw DataError("detect_active_window: start marker never crosses threshold");

    // Last downward crossing of the end marker.
    std::size_t i_end = 0;
    bool found_end = false;
    for (std::size_t i = e.size(); i-- > 1;) {
        if (e[i - 1] >= frac && e[i] < frac) {
            i_end = i;
            found_end = true;
            break;
        }
    }
    if (!found_end)
        throw DataError("detect_active_window: end marker never crosses threshold");

    if (i_start >= i_end)
        throw DataError("detect_active_window: window inverted (start " +
                        std::to_string(i_start) + " >= end " + std::to_string(i_end) + ")");
    return ActiveWindow{i_start, i_end};
}

Trial truncate(const Trial& t, const ActiveWindow& window) {
    if (window.start >= window.end)
        throw DataError("truncate: empty window for trial " + t.id);
    Trial out;
    out.id = t.id;
    out.label = t.label;
    out.signals.reserve(t.signals.size());
    for (const Signal& s : t.signals) {
        if (window.end >= s.size())
            throw DataError("truncate: window [" + std::to_string(window.start) + ", " +
                            std::to_string(window.end) + "] exceeds signal of length " +
                            std::to_string(s.size()) + " in trial " + t.id);
        Signal cut;
        cut.grid = s.grid;
        if (s.grid.kind == Grid::Kind::raw)
            cut.grid.t0 = s.grid.t0 + static_cast<double>(window.start) * s.grid.dt;
        cut.grid.len = window.length();
        cut.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(window.start),
                          s.values.begin() + static_cast<std::ptrdiff_t>(window.end) + 1);
        out.signals.push_back(std::move(cut));
    }
    return out;
}

Signal resample_to_unit_grid(const Signal& s, std::size_t m) {
    const std::size_t n = s.size();
    if (n < 2) throw DataError("resample_to_unit_grid: degenerate grid (length < 2)");
    if (m < 2) throw std::invalid_argument("resample_to_unit_grid: m must be >= 2");

    Signal out;
    out.grid = Grid::unit(m);
    out.values.resize(m);
    // Sample positions in [0,1]; raw grids span it, unit grids sit at k/n.
    std::size_t hi = 1;
    for (std::size_t j = 1; j <= m; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(m);
        if (u <= s.grid.position(0)) {
            out.values[j - 1] = s.values.front();
            continue;
        }
        if (u >= s.grid.position(n - 1)) {
            out.values[j - 1] = s.values.back();
            continue;
        }
        while (hi < n - 1 && s.grid.position(hi) < u) ++hi;
        const double p0 = s.grid.position(hi - 1);
        const double p1 = s.grid.position(hi);
        const double w = (u - p0) / (p1 - p0);
        out.values[j - 1] = (1.0 - w) * s.values[hi - 1] + w * s.values[hi];
    }
    return out;
}

Signal normalize_amplitude(const Signal& s) {
    Signal out = s;
    const std::size_t n = s.size();
    if (n == 0) return out;
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : s.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (sd == 0.0) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        return out;
    }
    for (double& v : out.values) v = (v - mean) / sd;
    return out;
}

Dataset preprocess_dataset(const Dataset& d, const PipelineConfig& cfg,
                           PreprocessAudit* audit) {
    const auto violations = validate_dataset(d);
    if (!violations.empty())
        throw DataError("preprocess: invalid dataset: " + violations.front());

    const WaveletFilter filter = WaveletFilter::by_name(cfg.wavelet);
    const std::size_t start_var = static_cast<std::size_t>(d.marker_start_index - 1);
    const std::size_t end_var = static_cast<std::size_t>(d.marker_end_index - 1);

    Dataset out = d;
    std::vector<TrialAudit> audits(d.trials.size());

    parallel_for(d.trials.size(), cfg.threads, [&](std::size_t i) {
        const Trial& t = d.trials[i];
        const ActiveWindow w =
            detect_active_window(t.signals[start_var], t.signals[end_var]);
        Trial cut = truncate(t, w);

        TrialAudit ta;
        ta.trial_id = t.id;
        ta.window_start = w.start;
        ta.window_end = w.end;
        ta.truncated_length = w.length();
        ta.denoise_levels.resize(cut.signals.size());

        for (std::size_t j = 0; j < cut.signals.size(); ++j) {
            DenoiseInfo info;
            Signal clean = denoise(cut.signals[j], cfg, &info);
            ta.denoise_levels[j] = info.level;
            Signal resampled = resample_to_unit_grid(clean, cfg.m);
            cut.signals[j] = normalize_amplitude(resampled);
        }
        out.trials[i] = std::move(cut);
        audits[i] = std::move(ta);
    });

    if (audit) {
        audit->stage_order = {"truncate", "denoise", "resample", "normalize"};
        audit->trials = std::move(audits);
    }
    return out;
}

}  // namespace wavecart
