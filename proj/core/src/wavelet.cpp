#include "wavecart/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavecart {

namespace {

// Scaling (lowpass reconstruction) filters, 15 significant digits.
const std::vector<double> kHaarScaling = {
    0.707106781186548, 0.707106781186548};

// Daubechies extremal-phase, order 4 (8 taps).
const std::vector<double> kDb4Scaling = {
    0.230377813308855,  0.714846570552542,  0.630880767929590,
    -0.0279837694169839, -0.187034811718881, 0.0308413818359870,
    0.0328830116669829, -0.0105974017849973};

// Near-symmetric Daubechies (symlet), order 4 (8 taps).
const std::vector<double> kSym4Scaling = {
    0.0322231006040427, -0.0126039672620378, -0.0992195435768472,
    0.297857795605277,  0.803738751805916,   0.497618667632015,
    -0.0296355276459985, -0.0757657147892733};

WaveletFilter from_scaling(std::string name, const std::vector<double>& h) {
    const std::size_t L = h.size();
    WaveletFilter f;
    f.name = std::move(name);
    f.lowpass_rec = h;
    f.lowpass_dec.assign(h.rbegin(), h.rend());
    f.highpass_rec.resize(L);
    for (std::size_t k = 0; k < L; ++k)
        f.highpass_rec[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[L - 1 - k];
    f.highpass_dec.assign(f.highpass_rec.rbegin(), f.highpass_rec.rend());
    return f;
}

// Extension lookup: value of the extended signal at (possibly out of range)
// index t.
inline double extended_at(const std::vector<double>& x, long long t, ExtensionMode mode) {
    const long long n = static_cast<long long>(x.size());
    switch (mode) {
        case ExtensionMode::periodic: {
            long long m = t % n;
            if (m < 0) m += n;
            return x[static_cast<std::size_t>(m)];
        }
        case ExtensionMode::zero_pad:
            return (t < 0 || t >= n) ? 0.0 : x[static_cast<std::size_t>(t)];
        case ExtensionMode::symmetric: {
            // Half-point reflection (edge sample repeated), period 2n.
            long long m = t % (2 * n);
            if (m < 0) m += 2 * n;
            if (m >= n) m = 2 * n - 1 - m;
            return x[static_cast<std::size_t>(m)];
        }
    }
    return 0.0;
}

// One analysis step: out[i] = sum_j filt[j] * ext(2i + 1 - j).
void dwt_step(const std::vector<double>& x, const WaveletFilter& f, ExtensionMode mode,
              std::vector<double>& approx, std::vector<double>& detail) {
    const std::vector<double>* input = &x;
    std::vector<double> padded;
    if (mode == ExtensionMode::periodic && x.size() % 2 != 0) {
        padded = x;
        padded.push_back(x.back());  // periodization pads odd lengths
        input = &padded;
    }
    const std::vector<double>& in = *input;
    const std::size_t L = f.length();
    const std::size_t out_len = dwt_step_length(x.size(), L, mode);
    approx.assign(out_len, 0.0);
    detail.assign(out_len, 0.0);
    for (std::size_t i = 0; i < out_len; ++i) {
        double a = 0.0, d = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
            const double v = extended_at(in, 2 * static_cast<long long>(i) + 1 -
                                                 static_cast<long long>(j),
                                         mode);
            a += f.lowpass_dec[j] * v;
            d += f.highpass_dec[j] * v;
        }
        approx[i] = a;
        detail[i] = d;
    }
}

// One synthesis step, the adjoint of dwt_step. Exact inverse: for the
// periodic mode the analysis matrix is orthogonal; for the expansive modes
// every output position t < out_len is covered by kept coefficients only.
std::vector<double> idwt_step(const std::vector<double>& approx,
                              const std::vector<double>& detail, const WaveletFilter& f,
                              ExtensionMode mode, std::size_t out_len) {
    const std::size_t L = f.length();
    if (approx.size() != detail.size())
        throw std::invalid_argument("idwt: approx/detail length mismatch");
    if (mode == ExtensionMode::periodic) {
        std::size_t n = out_len % 2 == 0 ? out_len : out_len + 1;
        std::vector<double> full(n, 0.0);
        for (std::size_t i = 0; i < approx.size(); ++i) {
            for (std::size_t j = 0; j < L; ++j) {
                long long t = 2 * static_cast<long long>(i) + 1 - static_cast<long long>(j);
                long long m = t % static_cast<long long>(n);
                if (m < 0) m += static_cast<long long>(n);
                full[static_cast<std::size_t>(m)] +=
                    approx[i] * f.lowpass_dec[j] + detail[i] * f.highpass_dec[j];
            }
        }
        full.resize(out_len);
        return full;
    }
    std::vector<double> out(out_len, 0.0);
    for (std::size_t i = 0; i < approx.size(); ++i) {
        for (std::size_t j = 0; j < L; ++j) {
            const long long t =
                2 * static_cast<long long>(i) + 1 - static_cast<long long>(j);
            if (t >= 0 && t < static_cast<long long>(out_len))
                out[static_cast<std::size_t>(t)] +=
                    approx[i] * f.lowpass_dec[j] + detail[i] * f.highpass_dec[j];
        }
    }
    return out;
}

std::vector<std::size_t> cascade_lengths(std::size_t original_len, std::size_t filter_len,
                                         ExtensionMode mode, int level) {
    std::vector<std::size_t> lens(static_cast<std::size_t>(level) + 1);
    lens[0] = original_len;
    for (int k = 1; k <= level; ++k)
        lens[static_cast<std::size_t>(k)] =
            dwt_step_length(lens[static_cast<std::size_t>(k - 1)], filter_len, mode);
    return lens;
}

Signal reconstruct_impl(const WaveletDecomposition& d, const WaveletFilter& f,
                        bool keep_details) {
    if (d.level < 1 || d.details.size() != static_cast<std::size_t>(d.level))
        throw std::invalid_argument("reconstruct: malformed decomposition");
    const auto lens = cascade_lengths(d.original_len, f.length(), d.extension_mode, d.level);
    if (d.approx.size() != lens[static_cast<std::size_t>(d.level)])
        throw std::invalid_argument("reconstruct: approximation length inconsistent");
    for (int k = 1; k <= d.level; ++k)
        if (d.details[static_cast<std::size_t>(k - 1)].size() !=
            lens[static_cast<std::size_t>(k)])
            throw std::invalid_argument("reconstruct: detail length inconsistent at level " +
                                        std::to_string(k));

    std::vector<double> current = d.approx;
    std::vector<double> zeros;
    for (int k = d.level; k >= 1; --k) {
        const std::vector<double>* det = &d.details[static_cast<std::size_t>(k - 1)];
        if (!keep_details) {
            zeros.assign(det->size(), 0.0);
            det = &zeros;
        }
        current = idwt_step(current, *det, f, d.extension_mode,
                            lens[static_cast<std::size_t>(k - 1)]);
    }
    Signal out;
    out.grid = Grid{Grid::Kind::raw, 0.0, 1.0, d.original_len};
    out.values = std::move(current);
    return out;
}

}  // namespace

WaveletFilter WaveletFilter::haar() { return from_scaling("haar", kHaarScaling); }
WaveletFilter WaveletFilter::db4() { return from_scaling("db4", kDb4Scaling); }
WaveletFilter WaveletFilter::sym4() { return from_scaling("sym4", kSym4Scaling); }

WaveletFilter WaveletFilter::by_name(const std::string& name) {
    if (name == "haar") return haar();
    if (name == "db4") return db4();
    if (name == "sym4") return sym4();
    throw std::invalid_argument("unknown wavelet: " + name);
}

std::vector<std::string> WaveletFilter::available() { return {"haar", "db4", "sym4"}; }

std::size_t dwt_step_length(std::size_t input_len, std::size_t filter_len,
                            ExtensionMode mode) {
    if (mode == ExtensionMode::periodic) return (input_len + 1) / 2;
    return (input_len + filter_len - 1) / 2;
}

int dwt_max_level(std::size_t input_len, std::size_t filter_len, ExtensionMode mode) {
    int level = 0;
    std::size_t len = input_len;
    while (len >= 2) {
        const std::size_t next = dwt_step_length(len, filter_len, mode);
        if (next < 1 || next >= len) break;  // expansive modes stall near filter_len
        len = next;
        ++level;
    }
    return level;
}

WaveletDecomposition dwt_decompose(const Signal& s, int level, const WaveletFilter& f,
                                   ExtensionMode mode) {
    if (level < 1) throw std::invalid_argument("dwt_decompose: level must be >= 1");
    if (s.values.size() < f.length())
        throw DataError("dwt_decompose: signal shorter than the filter (" +
                        std::to_string(s.values.size()) + " < " +
                        std::to_string(f.length()) + ")");
    const auto lens = cascade_lengths(s.values.size(), f.length(), mode, level);
    bool shrinking = true;
    for (int k = 1; k <= level; ++k)
        shrinking &= lens[static_cast<std::size_t>(k)] < lens[static_cast<std::size_t>(k - 1)];
    if (!shrinking || lens.back() < 1 || lens[static_cast<std::size_t>(level - 1)] < 2)
        throw DataError("dwt_decompose: level " + std::to_string(level) +
                        " too deep for signal of length " +
                        std::to_string(s.values.size()));

    WaveletDecomposition out;
    out.level = level;
    out.original_len = s.values.size();
    out.extension_mode = mode;
    out.details.resize(static_cast<std::size_t>(level));

    std::vector<double> current = s.values;
    for (int k = 1; k <= level; ++k) {
        std::vector<double> approx, detail;
        dwt_step(current, f, mode, approx, detail);
        out.details[static_cast<std::size_t>(k - 1)] = std::move(detail);
        current = std::move(approx);
    }
    out.approx = std::move(current);
    return out;
}

Signal dwt_reconstruct(const WaveletDecomposition& d, const WaveletFilter& f) {
    return reconstruct_impl(d, f, true);
}

Signal approx_reconstruct(const WaveletDecomposition& d, const WaveletFilter& f) {
    return reconstruct_impl(d, f, false);
}

double estimate_noise_sigma(const std::vector<double>& finest_details) {
    if (finest_details.empty())
        throw std::invalid_argument("estimate_noise_sigma: empty detail array");
    std::vector<double> mags(finest_details.size());
    std::transform(finest_details.begin(), finest_details.end(), mags.begin(),
                   [](double v) { return std::fabs(v); });
    const std::size_t n = mags.size();
    const std::size_t mid = n / 2;
    std::nth_element(mags.begin(), mags.begin() + mid, mags.end());
    double med = mags[mid];
    if (n % 2 == 0) {
        // average of the two middle order statistics
        double lower = *std::max_element(mags.begin(), mags.begin() + mid);
        med = 0.5 * (lower + med);
    }
    return med / 0.6745;
}

double universal_threshold(double sigma, std::size_t n_coeffs) {
    if (sigma < 0.0) throw std::invalid_argument("universal_threshold: sigma < 0");
    if (n_coeffs < 2) throw std::invalid_argument("universal_threshold: n < 2");
    return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n_coeffs)));
}

std::vector<double> apply_threshold(const std::vector<double>& coeffs, double lambda,
                                    ThresholdRule rule) {
    std::vector<double> out(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double c = coeffs[i];
        if (rule == ThresholdRule::soft) {
            const double mag = std::fabs(c) - lambda;
            out[i] = mag > 0.0 ? (c > 0.0 ? mag : -mag) : 0.0;
        } else {
            out[i] = std::fabs(c) > lambda ? c : 0.0;
        }
    }
    return out;
}

Signal denoise(const Signal& s, const WaveletFilter& f, ExtensionMode mode,
               int level_min, int level_max, ThresholdRule rule, DenoiseInfo* info) {
    // Deepest level in range whose coarsest approximation keeps >= 2*L coeffs.
    int level = 0;
    for (int p = level_max; p >= level_min; --p) {
        const auto lens = cascade_lengths(s.values.size(), f.length(), mode, p);
        if (lens.back() >= 2 * f.length()) {
            level = p;
            break;
        }
    }
    if (level == 0)
        throw DataError("denoise: signal of length " + std::to_string(s.values.size()) +
                        " too short for decomposition levels " +
                        std::to_string(level_min) + ".." + std::to_string(level_max));

    WaveletDecomposition d = dwt_decompose(s, level, f, mode);
    const double sigma = estimate_noise_sigma(d.details.front());
    const double lambda = universal_threshold(sigma, d.original_len);
    for (auto& detail : d.details) detail = apply_threshold(detail, lambda, rule);
    if (info) *info = DenoiseInfo{level, sigma, lambda};

    Signal out = dwt_reconstruct(d, f);
    out.grid = s.grid;
    return out;
}

Signal denoise(const Signal& s, const PipelineConfig& cfg, DenoiseInfo* info) {
    return denoise(s, WaveletFilter::by_name(cfg.wavelet), cfg.extension_mode,
                   cfg.denoise_level_min, cfg.denoise_level_max, cfg.threshold_rule, info);
}

}  // namespace wavecart
