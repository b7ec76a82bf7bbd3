#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wavecart/core_types.hpp"
#include "wavecart/wavelet.hpp"

namespace wavecart {

// Residual-energy curve of one functional variable: values[p-1] is the total
// squared distance between the signals and their level-p approximations.
struct EqCurve {
    int variable = 0;  // 1-based
    std::vector<double> values;
};

// n x K_j matrix of level-p approximation coefficients for variable j.
// coeff_ids are stable "j:k" strings (both 1-based).
struct CoefficientPacket {
    int variable = 0;
    int level = 0;
    std::size_t rows = 0;
    std::vector<std::string> coeff_ids;
    std::vector<double> coeffs;  // row-major, rows x coeff_ids.size()

    std::size_t cols() const { return coeff_ids.size(); }
    double at(std::size_t row, std::size_t col) const {
        return coeffs[row * cols() + col];
    }
};

struct LevelSelection {
    int level = 1;
    bool fallback = false;  // no sufficient slope change found
};

struct CompressionReport {
    std::vector<EqCurve> eq_curves;
    std::vector<int> levels;              // per variable
    std::vector<bool> fallback;           // per variable
    std::vector<std::size_t> coeff_counts;
    std::size_t total_coefficients = 0;
    std::vector<std::string> zero_variance_coefficients;
};

int eq_max_level(std::size_t m);

// EQ_j(p) for p = 1..p_max over the given unit-grid signals of one variable.
EqCurve eq_curve(const std::vector<Signal>& signals, int variable,
                 const WaveletFilter& f, ExtensionMode mode, int p_max);

// Smallest p with a sufficient slope change in the EQ curve, minus one as a
// conservative margin. Falls back to level 5 (flagged) when no change trips
// the threshold.
LevelSelection select_level(const EqCurve& c, double elbow_threshold);

CoefficientPacket build_packet(const std::vector<Signal>& signals, int variable,
                               int level, const WaveletFilter& f, ExtensionMode mode);

// Level selection + packet construction for every variable of a preprocessed
// (unit-grid) dataset.
std::vector<CoefficientPacket> compress_dataset(const Dataset& d,
                                                const PipelineConfig& cfg,
                                                CompressionReport* report = nullptr);

}  // namespace wavecart
