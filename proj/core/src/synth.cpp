#include "wavecart/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wavecart/parallel.hpp"
#include "wavecart/rng.hpp"

namespace wavecart {

std::string to_string(EffectKind k) {
    switch (k) {
        case EffectKind::bump_location_shift: return "bump-location-shift";
        case EffectKind::amplitude_shift: return "amplitude-shift";
        case EffectKind::slope_shift: return "slope-shift";
    }
    return "bump-location-shift";
}

EffectKind effect_kind_from_string(const std::string& s) {
    if (s == "bump-location-shift") return EffectKind::bump_location_shift;
    if (s == "amplitude-shift") return EffectKind::amplitude_shift;
    if (s == "slope-shift") return EffectKind::slope_shift;
    throw std::invalid_argument("unknown effect kind: " + s);
}

std::vector<std::string> PlantSpec::validate() const {
    std::vector<std::string> v;
    if (n < 10) v.push_back("n must be at least 10");
    if (variable_count < 3) v.push_back("variable_count must be at least 3");
    if (class_count < 2) v.push_back("class_count must be at least 2");
    if (class_frequencies.size() != static_cast<std::size_t>(class_count))
        v.push_back("class_frequencies size must equal class_count");
    const double sum = std::accumulate(class_frequencies.begin(), class_frequencies.end(), 0.0);
    if (std::fabs(sum - 1.0) > 0.01) v.push_back("class frequencies must sum to 1");
    if (discriminant_variables.size() != effect_kinds.size())
        v.push_back("one effect kind per discriminant variable required");
    for (int d : discriminant_variables) {
        if (d < 1 || d > variable_count)
            v.push_back("discriminant variable " + std::to_string(d) + " out of range");
        if (d == marker_start_variable || d == marker_end_variable)
            v.push_back("discriminant variable " + std::to_string(d) +
                        " collides with a marker variable");
    }
    if (marker_start_variable == marker_end_variable)
        v.push_back("marker variables must be distinct");
    if (raw_len_min < window_len_min + 100)
        v.push_back("raw_len_min leaves no room for the smallest window");
    if (raw_len_max < raw_len_min || window_len_max < window_len_min)
        v.push_back("length ranges inverted");
    if (noise_sigma < 0) v.push_back("noise_sigma must be >= 0");
    if (effect_size < 0) v.push_back("effect_size must be >= 0");
    return v;
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Component {
    bool bump = false;  // bump (Gaussian) vs ramp (logistic)
    double center = 0.5;
    double width = 0.1;
    double amplitude = 1.0;
};

// Sharp events give the signals the broadband texture of real sensor data:
// jump steps and short spikes survive thresholding (their coefficients are
// sparse and large) and spread energy across fine scales.
struct Event {
    bool spike = false;  // spike (short triangle) vs step (jump)
    double center = 0.5;
    double height = 0.0;
    double width = 0.005;  // spikes only, in window units
};

struct Harmonic {
    double frequency = 0.0;
    double phase = 0.0;
    double amplitude = 0.0;
};

// Gaussian-windowed oscillation; keeps mid-band detail energy comparable to
// adjacent scales so resampling does not leave a spectral hole.
struct Burst {
    double center = 0.5;
    double width = 0.03;
    double frequency = 100.0;
    double phase = 0.0;
    double amplitude = 1.0;
};

// Per-variable shape shared by all trials; trials jitter its parameters.
struct Archetype {
    std::vector<Component> components;
    std::vector<Event> events;
    std::vector<Burst> bursts;
    std::vector<Harmonic> harmonics;  // high-frequency variable only
    double offset = 0.0;
};

Archetype draw_archetype(Rng& rng, bool high_frequency) {
    Archetype a;
    const int parts = rng.uniform_int(3, 5);
    for (int c = 0; c < parts; ++c) {
        Component comp;
        comp.bump = rng.uniform01() < 0.7;
        comp.center = rng.uniform(0.1, 0.9);
        comp.width = comp.bump ? rng.uniform(0.1, 0.16) : rng.uniform(0.1, 0.2);
        comp.amplitude = rng.uniform(1.0, 2.2) * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
        a.components.push_back(comp);
    }
    const int steps = rng.uniform_int(7, 10);
    for (int e = 0; e < steps; ++e) {
        Event ev;
        ev.spike = false;
        ev.center = rng.uniform(0.05, 0.95);
        ev.height = rng.uniform(1.0, 2.0) * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
        a.events.push_back(ev);
    }
    const int spikes = rng.uniform_int(4, 7);
    for (int e = 0; e < spikes; ++e) {
        Event ev;
        ev.spike = true;
        ev.center = rng.uniform(0.05, 0.95);
        ev.height = rng.uniform(1.2, 2.0) * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
        ev.width = rng.uniform(0.008, 0.02);
        a.events.push_back(ev);
    }
    // One rung per dyadic band so no scale is left empty.
    const struct { double lo, hi; } bands[] = {{80.0, 115.0}, {45.0, 70.0}, {22.0, 40.0}};
    for (const auto& band : bands) {
        for (int b = 0; b < 2; ++b) {
            Burst burst;
            burst.center = rng.uniform(0.08, 0.92);
            burst.width = rng.uniform(0.03, 0.06);
            burst.frequency = rng.uniform(band.lo, band.hi);
            burst.phase = rng.uniform(0.0, kTwoPi);
            burst.amplitude = rng.uniform(0.9, 1.3);
            a.bursts.push_back(burst);
        }
    }
    a.offset = rng.uniform(-1.0, 1.0);
    if (high_frequency) {
        for (int h = 0; h < 3; ++h)
            a.harmonics.push_back(Harmonic{rng.uniform(16.0, 30.0),
                                           rng.uniform(0.0, kTwoPi),
                                           rng.uniform(0.3, 0.5)});
    }
    return a;
}

double evaluate(const Archetype& a, double u, const std::vector<double>& amp_jitter,
                const std::vector<double>& center_jitter) {
    double v = a.offset;
    for (std::size_t c = 0; c < a.components.size(); ++c) {
        const Component& comp = a.components[c];
        const double center = comp.center + center_jitter[c];
        const double amp = comp.amplitude * amp_jitter[c];
        if (comp.bump) {
            const double z = (u - center) / comp.width;
            v += amp * std::exp(-0.5 * z * z);
        } else {
            v += amp * logistic((u - center) / comp.width);
        }
    }
    const std::size_t base = a.components.size();
    for (std::size_t e = 0; e < a.events.size(); ++e) {
        const Event& ev = a.events[e];
        const double center = ev.center + center_jitter[base + e];
        const double height = ev.height * amp_jitter[base + e];
        if (ev.spike) {
            const double z = std::fabs(u - center) / ev.width;
            if (z < 1.0) v += height * (1.0 - z);
        } else if (u >= center) {
            v += height;
        }
    }
    for (const Burst& b : a.bursts) {
        const double z = (u - b.center) / b.width;
        if (std::fabs(z) < 4.0)
            v += b.amplitude * std::exp(-0.5 * z * z) *
                 std::sin(kTwoPi * b.frequency * u + b.phase);
    }
    for (const Harmonic& h : a.harmonics)
        v += h.amplitude * std::sin(kTwoPi * h.frequency * u + h.phase);
    return v;
}

// Binary contrast carried by the i-th discriminant variable. The codings
// are complementary: all three together identify the class, none is
// sufficient alone, and in the solo-strength order each addition still
// carries a large marginal gain.
int effect_level(int coding, int k, int class_count) {
    switch (coding % 3) {
        case 0: return 2 * k > class_count ? 1 : 0;         // upper half
        case 1: return k % 2;                               // odd ranks
        default: return (k > 1 && k < class_count) ? 1 : 0; // middle vs extremes
    }
}

// Largest-remainder apportionment of n trials to the class frequencies.
std::vector<int> class_quotas(const std::vector<double>& freqs, int n) {
    const int K = static_cast<int>(freqs.size());
    std::vector<int> counts(static_cast<std::size_t>(K));
    std::vector<std::pair<double, int>> remainders;
    int assigned = 0;
    for (int k = 0; k < K; ++k) {
        const double quota = freqs[static_cast<std::size_t>(k)] * n;
        counts[static_cast<std::size_t>(k)] = static_cast<int>(std::floor(quota));
        assigned += counts[static_cast<std::size_t>(k)];
        remainders.emplace_back(quota - std::floor(quota), k);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int r = 0; r < n - assigned; ++r)
        ++counts[static_cast<std::size_t>(remainders[static_cast<std::size_t>(r)].second)];
    return counts;
}

}  // namespace

SynthResult generate(const PlantSpec& spec, std::uint64_t seed) {
    const auto issues = spec.validate();
    if (!issues.empty()) throw DataError("synth: " + issues.front());

    SynthResult result;
    Dataset& d = result.dataset;
    d.class_count = spec.class_count;
    d.marker_start_index = spec.marker_start_variable;
    d.marker_end_index = spec.marker_end_variable;
    for (int j = 1; j <= spec.variable_count; ++j)
        d.variable_names.push_back("V" + std::to_string(j));

    // Labels by quota, shuffled.
    const std::vector<int> counts = class_quotas(spec.class_frequencies, spec.n);
    std::vector<int> labels;
    for (int k = 0; k < spec.class_count; ++k)
        labels.insert(labels.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(k)]),
                      k + 1);
    {
        Rng rng(derive_seed(seed, "labels"));
        rng.shuffle(labels);
    }

    std::vector<Archetype> archetypes(static_cast<std::size_t>(spec.variable_count));
    for (int j = 1; j <= spec.variable_count; ++j) {
        Rng rng(derive_seed(seed, "variable", static_cast<std::uint64_t>(j)));
        archetypes[static_cast<std::size_t>(j - 1)] =
            draw_archetype(rng, j == spec.high_frequency_variable);
    }

    auto coding_of = [&](int variable) {
        for (std::size_t i = 0; i < spec.discriminant_variables.size(); ++i)
            if (spec.discriminant_variables[i] == variable) return static_cast<int>(i);
        return -1;
    };

    d.trials.resize(static_cast<std::size_t>(spec.n));
    result.truth.windows.resize(static_cast<std::size_t>(spec.n));

    parallel_for(static_cast<std::size_t>(spec.n), 0, [&](std::size_t i) {
        Rng rng(derive_seed(seed, "trial", i));
        const int label = labels[i];

        const std::size_t raw_len = spec.raw_len_min +
            rng.next_below(spec.raw_len_max - spec.raw_len_min + 1);
        const std::size_t window_max =
            std::min(spec.window_len_max, raw_len - 100);
        const std::size_t window_len =
            spec.window_len_min + rng.next_below(window_max - spec.window_len_min + 1);
        const std::size_t t_start = 50 + rng.next_below(raw_len - window_len - 100 + 1);
        const std::size_t t_end = t_start + window_len - 2;

        Trial trial;
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "trial_%03zu", i + 1);
        trial.id = idbuf;
        trial.label = label;
        trial.signals.resize(static_cast<std::size_t>(spec.variable_count));

        for (int j = 1; j <= spec.variable_count; ++j) {
            Signal s;
            s.grid = Grid::raw(0.0, spec.dt, raw_len);
            s.values.resize(raw_len);

            if (j == spec.marker_start_variable) {
                for (std::size_t t = 0; t < raw_len; ++t)
                    s.values[t] = logistic((static_cast<double>(t) -
                                            static_cast<double>(t_start)) / 1.5) +
                                  0.01 * rng.normal();
            } else if (j == spec.marker_end_variable) {
                for (std::size_t t = 0; t < raw_len; ++t)
                    s.values[t] = logistic((static_cast<double>(t_end) -
                                            static_cast<double>(t)) / 1.5) +
                                  0.01 * rng.normal();
            } else {
                const Archetype& a = archetypes[static_cast<std::size_t>(j - 1)];
                const std::size_t parts = a.components.size() + a.events.size();
                std::vector<double> amp_jitter(parts);
                std::vector<double> center_jitter(parts);
                for (std::size_t c = 0; c < parts; ++c) {
                    amp_jitter[c] = 1.0 + 0.08 * rng.normal();
                    center_jitter[c] = 0.008 * rng.normal();
                }

                const int coding = coding_of(j);
                double bump_center = 0.0, bump_amp = 0.0;
                double ramp_width = 0.0, ramp_amp = 0.0;
                if (coding >= 0) {
                    const int level = effect_level(coding, label, spec.class_count);
                    const double sign = 2.0 * level - 1.0;  // -1 or +1
                    switch (spec.effect_kinds[static_cast<std::size_t>(coding)]) {
                        case EffectKind::bump_location_shift:
                            bump_center = 0.35 + 0.06 * spec.effect_size * sign;
                            bump_amp = 1.4;
                            break;
                        case EffectKind::amplitude_shift:
                            bump_center = 0.55;
                            bump_amp = 1.0 + 0.9 * spec.effect_size * sign;
                            break;
                        case EffectKind::slope_shift:
                            // steeper vs gentler ramp through mid-window
                            ramp_amp = 2.0;
                            ramp_width = level ? 0.05 / (1.0 + 2.0 * spec.effect_size)
                                               : 0.05 * (1.0 + 2.0 * spec.effect_size);
                            break;
                    }
                }

                const double span = static_cast<double>(t_end - t_start);
                for (std::size_t t = 0; t < raw_len; ++t) {
                    const double u = (static_cast<double>(t) -
                                      static_cast<double>(t_start)) / span;
                    double v = evaluate(a, u, amp_jitter, center_jitter);
                    if (bump_amp != 0.0) {
                        const double z = (u - bump_center) / 0.07;
                        v += bump_amp * std::exp(-0.5 * z * z);
                    }
                    if (ramp_amp != 0.0) v += ramp_amp * logistic((u - 0.5) / ramp_width);
                    s.values[t] = v + spec.noise_sigma * rng.normal();
                }
            }
            trial.signals[static_cast<std::size_t>(j - 1)] = std::move(s);
        }

        d.trials[i] = std::move(trial);
        result.truth.windows[i] = ActiveWindow{t_start, t_end + 1};
    });

    result.truth.discriminant_variables = spec.discriminant_variables;
    result.truth.effect_kinds = spec.effect_kinds;
    result.truth.effect_size = spec.effect_size;
    result.truth.labels = labels;
    result.truth.class_counts = counts;
    return result;
}

}  // namespace wavecart
