#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wavecart/wavelet.hpp"

using namespace wavecart;
using namespace wavecart::testutil;

namespace {

const ExtensionMode kModes[] = {ExtensionMode::symmetric, ExtensionMode::periodic,
                                ExtensionMode::zero_pad};

}  // namespace

TEST_CASE("filter banks satisfy the quadrature-mirror relations") {
    for (const auto& name : WaveletFilter::available()) {
        const WaveletFilter f = WaveletFilter::by_name(name);
        CAPTURE(name);

        double lo_sum = 0.0, hi_sum = 0.0, lo_sq = 0.0;
        for (double c : f.lowpass_dec) lo_sum += c;
        for (double c : f.highpass_dec) hi_sum += c;
        for (double c : f.lowpass_dec) lo_sq += c * c;
        CHECK(std::fabs(lo_sum - std::sqrt(2.0)) < 1e-10);
        CHECK(std::fabs(hi_sum) < 1e-10);
        CHECK(std::fabs(lo_sq - 1.0) < 1e-10);

        // orthogonality to even shifts
        const std::size_t L = f.length();
        for (std::size_t shift = 2; shift < L; shift += 2) {
            double dot = 0.0, cross = 0.0;
            for (std::size_t j = 0; j + shift < L; ++j) {
                dot += f.lowpass_dec[j] * f.lowpass_dec[j + shift];
                cross += f.lowpass_dec[j] * f.highpass_dec[j + shift];
            }
            CHECK(std::fabs(dot) < 1e-10);
            CHECK(std::fabs(cross) < 1e-10);
        }

        // synthesis filters mirror the analysis pair
        for (std::size_t j = 0; j < L; ++j) {
            CHECK(f.lowpass_rec[j] == f.lowpass_dec[L - 1 - j]);
            CHECK(f.highpass_rec[j] == f.highpass_dec[L - 1 - j]);
        }
    }
    CHECK_THROWS_AS(WaveletFilter::by_name("db97"), std::invalid_argument);
}

TEST_CASE("Haar hand example: [1,2,3,4] at level 1, periodic") {
    const WaveletFilter haar = WaveletFilter::haar();
    const Signal s = make_signal({1, 2, 3, 4});
    const WaveletDecomposition d = dwt_decompose(s, 1, haar, ExtensionMode::periodic);

    const double r2 = std::sqrt(2.0);
    REQUIRE(d.approx.size() == 2);
    REQUIRE(d.details.size() == 1);
    CHECK(std::fabs(d.approx[0] - 3.0 / r2) < 1e-12);   // 2.12132
    CHECK(std::fabs(d.approx[1] - 7.0 / r2) < 1e-12);   // 4.94975
    CHECK(std::fabs(d.details[0][0] + 1.0 / r2) < 1e-12);  // -0.70711
    CHECK(std::fabs(d.details[0][1] + 1.0 / r2) < 1e-12);

    const Signal back = dwt_reconstruct(d, haar);
    CHECK(max_abs_diff(back.values, {1, 2, 3, 4}) < 1e-12);

    const Signal approx = approx_reconstruct(d, haar);
    CHECK(max_abs_diff(approx.values, {1.5, 1.5, 3.5, 3.5}) < 1e-12);
}

TEST_CASE("constant signals have zero detail coefficients") {
    const Signal s = make_signal(std::vector<double>(8, 5.0));
    for (const auto& name : WaveletFilter::available()) {
        const WaveletFilter f = WaveletFilter::by_name(name);
        for (ExtensionMode mode : {ExtensionMode::symmetric, ExtensionMode::periodic}) {
            const WaveletDecomposition d = dwt_decompose(s, 1, f, mode);
            for (double c : d.details[0]) CHECK(std::fabs(c) < 1e-10);
        }
    }
}

TEST_CASE("zero signal reconstructs to zero; approximation preserves constants") {
    const WaveletFilter f = WaveletFilter::sym4();
    const Signal zero = make_signal(std::vector<double>(64, 0.0));
    const auto dz = dwt_decompose(zero, 3, f, ExtensionMode::symmetric);
    CHECK(max_abs_diff(dwt_reconstruct(dz, f).values, zero.values) < 1e-12);

    const Signal c = make_signal(std::vector<double>(64, 3.25));
    const auto dc = dwt_decompose(c, 3, f, ExtensionMode::symmetric);
    CHECK(max_abs_diff(approx_reconstruct(dc, f).values, c.values) < 1e-9);
}

TEST_CASE("perfect reconstruction across filters, modes, levels, lengths") {
    for (const auto& name : WaveletFilter::available()) {
        const WaveletFilter f = WaveletFilter::by_name(name);
        for (ExtensionMode mode : kModes) {
            for (std::size_t len : {33u, 100u, 512u, 777u}) {
                const Signal s = random_signal(len, 1000 + len);
                const int deepest = std::min(5, dwt_max_level(len, f.length(), mode));
                for (int level = 1; level <= deepest; ++level) {
                    const auto d = dwt_decompose(s, level, f, mode);
                    const Signal back = dwt_reconstruct(d, f);
                    CAPTURE(name);
                    CAPTURE(static_cast<int>(mode));
                    CAPTURE(len);
                    CAPTURE(level);
                    REQUIRE(back.values.size() == len);
                    CHECK(max_abs_diff(back.values, s.values) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("energy is conserved for periodic extension on even lengths") {
    for (const auto& name : WaveletFilter::available()) {
        const WaveletFilter f = WaveletFilter::by_name(name);
        const Signal s = random_signal(512, 42);
        const auto d = dwt_decompose(s, 5, f, ExtensionMode::periodic);
        double coeff_energy = 0.0;
        for (double c : d.approx) coeff_energy += c * c;
        for (const auto& detail : d.details)
            for (double c : detail) coeff_energy += c * c;
        double signal_energy = 0.0;
        for (double v : s.values) signal_energy += v * v;
        CHECK(std::fabs(coeff_energy - signal_energy) / signal_energy < 1e-8);
    }
}

TEST_CASE("parseval bound: approximation never exceeds signal norm (periodic)") {
    const WaveletFilter f = WaveletFilter::db4();
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Signal s = random_signal(256, seed);
        const auto d = dwt_decompose(s, 4, f, ExtensionMode::periodic);
        const Signal a = approx_reconstruct(d, f);
        double na = 0.0, ns = 0.0;
        for (double v : a.values) na += v * v;
        for (double v : s.values) ns += v * v;
        CHECK(na <= ns * (1.0 + 1e-9));
    }
}

TEST_CASE("decomposition errors: short signals and deep levels") {
    const WaveletFilter f = WaveletFilter::sym4();
    CHECK_THROWS_AS(dwt_decompose(make_signal({1, 2, 3}), 1, f, ExtensionMode::symmetric),
                    DataError);
    CHECK_THROWS_AS(dwt_decompose(random_signal(32, 1), 12, f, ExtensionMode::periodic),
                    DataError);
    CHECK_THROWS_AS(dwt_decompose(random_signal(32, 1), 0, f, ExtensionMode::periodic),
                    std::invalid_argument);
}

TEST_CASE("reconstruction rejects inconsistent coefficient lengths") {
    const WaveletFilter f = WaveletFilter::haar();
    auto d = dwt_decompose(random_signal(64, 5), 2, f, ExtensionMode::periodic);
    d.details[0].pop_back();
    CHECK_THROWS_AS(dwt_reconstruct(d, f), std::invalid_argument);
}

TEST_CASE("noise sigma: hand values") {
    CHECK(std::fabs(estimate_noise_sigma({1, -1, 1, -1}) - 1.0 / 0.6745) < 1e-12);
    CHECK(estimate_noise_sigma({0, 0, 0, 0}) == 0.0);
    CHECK_THROWS_AS(estimate_noise_sigma({}), std::invalid_argument);
}

TEST_CASE("noise sigma: Monte-Carlo recovery within 10%") {
    const double sigma = 0.7;
    Rng rng(90210);
    std::vector<double> noise(8192);
    for (double& v : noise) v = rng.normal(0.0, sigma);
    const auto d = dwt_decompose(make_signal(std::move(noise)), 1, WaveletFilter::sym4(),
                                 ExtensionMode::periodic);
    const double est = estimate_noise_sigma(d.details[0]);
    CHECK(std::fabs(est - sigma) / sigma < 0.10);
}

TEST_CASE("universal threshold formula") {
    // sqrt(2 ln 512) = 3.5322300570979... (the value follows the formula)
    CHECK(std::fabs(universal_threshold(1.0, 512) - 3.5322300570979422) < 1e-9);
    CHECK(universal_threshold(0.0, 512) == 0.0);
    CHECK(std::fabs(universal_threshold(1.5, 1024) - 5.5849467738792186) < 1e-9);
    CHECK(std::fabs(universal_threshold(1.5, 1024) - 5.58494) < 1e-4);
    CHECK_THROWS_AS(universal_threshold(-1.0, 512), std::invalid_argument);
    CHECK_THROWS_AS(universal_threshold(1.0, 1), std::invalid_argument);
}

TEST_CASE("soft and hard thresholding") {
    const std::vector<double> c = {-3.0, -0.5, 0.0, 0.5, 3.0};
    const auto soft = apply_threshold(c, 1.0, ThresholdRule::soft);
    CHECK(soft == std::vector<double>{-2.0, 0.0, 0.0, 0.0, 2.0});
    const auto hard = apply_threshold(c, 1.0, ThresholdRule::hard);
    CHECK(hard == std::vector<double>{-3.0, 0.0, 0.0, 0.0, 3.0});
}

TEST_CASE("denoising a clean piecewise-constant signal is the identity") {
    Signal s = make_signal(blocks_signal(512));
    PipelineConfig cfg;
    DenoiseInfo info;
    const Signal out = denoise(s, cfg, &info);
    CHECK(info.sigma < 1e-9);
    CHECK(max_abs_diff(out.values, s.values) < 1e-9);
}

TEST_CASE("denoising halves the MSE of a noisy blocks signal") {
    const std::vector<double> clean = blocks_signal(512);
    const double sigma = population_std(clean) / 5.0;  // SNR ~ 5
    Rng rng(777);
    std::vector<double> noisy = clean;
    for (double& v : noisy) v += rng.normal(0.0, sigma);

    PipelineConfig cfg;
    const Signal out = denoise(make_signal(noisy), cfg);
    CHECK(mse(out.values, clean) <= 0.5 * mse(noisy, clean));
}

TEST_CASE("denoising pure noise leaves variance below 0.2") {
    Rng rng(31337);
    std::vector<double> noise(512);
    for (double& v : noise) v = rng.normal();
    PipelineConfig cfg;
    const Signal out = denoise(make_signal(std::move(noise)), cfg);
    double var = 0.0;
    const double m = mean(out.values);
    for (double v : out.values) var += (v - m) * (v - m);
    var /= static_cast<double>(out.values.size());
    CHECK(var <= 0.2);
}

TEST_CASE("denoise picks the deepest level in range that fits; errors when none does") {
    PipelineConfig cfg;  // sym4, levels [3,5], symmetric
    DenoiseInfo info;
    denoise(random_signal(600, 3), cfg, &info);
    CHECK(info.level == 5);
    denoise(random_signal(150, 3), cfg, &info);
    CHECK(info.level >= 3);
    CHECK(info.level < 5);
    CHECK_THROWS_AS(denoise(random_signal(40, 3), cfg), DataError);
}
