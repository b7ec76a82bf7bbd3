#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wavecart/core_types.hpp"

namespace wavecart {

// Orthogonal filter bank. dec_* are the analysis filters (lowpass is the
// reversed scaling filter), rec_* the synthesis filters.
struct WaveletFilter {
    std::string name;
    std::vector<double> lowpass_dec;
    std::vector<double> highpass_dec;
    std::vector<double> lowpass_rec;
    std::vector<double> highpass_rec;

    std::size_t length() const { return lowpass_dec.size(); }

    static WaveletFilter haar();
    static WaveletFilter db4();
    static WaveletFilter sym4();
    static WaveletFilter by_name(const std::string& name);
    static std::vector<std::string> available();
};

// Result of a level-p analysis cascade. details[k] holds the level-(k+1)
// detail coefficients (k = 0 is the finest scale).
struct WaveletDecomposition {
    int level = 0;
    std::vector<double> approx;
    std::vector<std::vector<double>> details;
    std::size_t original_len = 0;
    ExtensionMode extension_mode = ExtensionMode::symmetric;
};

// Length of the coefficient array produced by one analysis step.
std::size_t dwt_step_length(std::size_t input_len, std::size_t filter_len,
                            ExtensionMode mode);

// Deepest level usable on a signal of the given length; 0 if even level 1
// is unavailable.
int dwt_max_level(std::size_t input_len, std::size_t filter_len, ExtensionMode mode);

WaveletDecomposition dwt_decompose(const Signal& s, int level, const WaveletFilter& f,
                                   ExtensionMode mode);

// Inverse cascade; exact to rounding for every supported mode.
Signal dwt_reconstruct(const WaveletDecomposition& d, const WaveletFilter& f);

// Reconstruction from approximation coefficients alone (details zeroed).
Signal approx_reconstruct(const WaveletDecomposition& d, const WaveletFilter& f);

// Robust noise level from the finest detail coefficients: median(|d|)/0.6745.
double estimate_noise_sigma(const std::vector<double>& finest_details);

// lambda = sigma * sqrt(2 ln n)
double universal_threshold(double sigma, std::size_t n_coeffs);

std::vector<double> apply_threshold(const std::vector<double>& coeffs, double lambda,
                                    ThresholdRule rule);

struct DenoiseInfo {
    int level = 0;
    double sigma = 0.0;
    double lambda = 0.0;
};

// Decompose at the deepest level in [level_min, level_max] that keeps at
// least 2*filter_len approximation coefficients, threshold every detail
// level at the universal threshold, reconstruct.
Signal denoise(const Signal& s, const WaveletFilter& f, ExtensionMode mode,
               int level_min, int level_max, ThresholdRule rule,
               DenoiseInfo* info = nullptr);

Signal denoise(const Signal& s, const PipelineConfig& cfg, DenoiseInfo* info = nullptr);

}  // namespace wavecart
