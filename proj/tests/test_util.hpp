#pragma once

#include <cmath>
#include <vector>

#include "wavecart/core_types.hpp"
#include "wavecart/rng.hpp"

namespace wavecart::testutil {

inline Signal make_signal(std::vector<double> values) {
    Signal s;
    s.grid = Grid::raw(0.0, 1.0, values.size());
    s.values = std::move(values);
    return s;
}

inline Signal random_signal(std::size_t len, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(len);
    for (double& x : v) x = rng.normal();
    return make_signal(std::move(v));
}

// Piecewise-constant test signal in the spirit of the classic "blocks".
inline std::vector<double> blocks_signal(std::size_t len) {
    const double pos[] = {0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
    const double hgt[] = {4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2};
    std::vector<double> v(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(len);
        double x = 0.0;
        for (int j = 0; j < 11; ++j)
            if (t >= pos[j]) x += hgt[j];
        v[i] = x;
    }
    return v;
}

// Sums of narrow peaks ("bumps" style).
inline std::vector<double> bumps_signal(std::size_t len) {
    const double pos[] = {0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
    const double hgt[] = {4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
    const double wid[] = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005};
    std::vector<double> v(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(len);
        double x = 0.0;
        for (int j = 0; j < 11; ++j) {
            const double z = (t - pos[j]) / wid[j];
            x += hgt[j] / std::pow(1.0 + std::fabs(z), 4.0);
        }
        v[i] = x;
    }
    return v;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double population_std(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

inline double mse(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

}  // namespace wavecart::testutil
