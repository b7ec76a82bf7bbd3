#include "wavecart/compression.hpp"

#include <cmath>
#include <stdexcept>

#include "wavecart/parallel.hpp"

namespace wavecart {

int eq_max_level(std::size_t m) {
    int p = 0;
    while ((std::size_t{1} << (p + 1)) <= m) ++p;
    return p;
}

EqCurve eq_curve(const std::vector<Signal>& signals, int variable,
                 const WaveletFilter& f, ExtensionMode mode, int p_max) {
    if (signals.empty()) throw std::invalid_argument("eq_curve: no signals");
    const std::size_t m = signals.front().size();
    for (const Signal& s : signals)
        if (s.size() != m) throw DataError("eq_curve: mixed grid lengths");

    EqCurve curve;
    curve.variable = variable;
    curve.values.assign(static_cast<std::size_t>(p_max), 0.0);
    for (const Signal& s : signals) {
        const WaveletDecomposition full = dwt_decompose(s, p_max, f, mode);
        for (int p = 1; p <= p_max; ++p) {
            // Level-p approximation coefficients are the cascade state after
            // p steps; recover them by inverting the deeper steps.
            WaveletDecomposition head;
            head.level = p;
            head.original_len = full.original_len;
            head.extension_mode = full.extension_mode;
            head.details.assign(full.details.begin(), full.details.begin() + p);
            std::size_t len_p = m;
            for (int k = 0; k < p; ++k) len_p = dwt_step_length(len_p, f.length(), mode);
            if (p == p_max) {
                head.approx = full.approx;
            } else {
                WaveletDecomposition tail;
                tail.level = p_max - p;
                tail.original_len = len_p;
                tail.extension_mode = full.extension_mode;
                tail.approx = full.approx;
                tail.details.assign(full.details.begin() + p, full.details.end());
                head.approx = dwt_reconstruct(tail, f).values;
            }
            const Signal rec = approx_reconstruct(head, f);
            double err = 0.0;
            for (std::size_t t = 0; t < m; ++t) {
                const double diff = s.values[t] - rec.values[t];
                err += diff * diff;
            }
            curve.values[static_cast<std::size_t>(p - 1)] += err;
        }
    }
    return curve;
}

LevelSelection select_level(const EqCurve& c, double elbow_threshold) {
    constexpr double kEps = 1e-12;
    const std::size_t len = c.values.size();
    if (len < 3) throw std::invalid_argument("select_level: curve needs >= 3 points");
    // increments s(p) = EQ(p+1) - EQ(p), p = 1..len-1
    std::vector<double> inc(len - 1);
    for (std::size_t p = 0; p + 1 < len; ++p) inc[p] = c.values[p + 1] - c.values[p];
    for (std::size_t p = 2; p <= inc.size(); ++p) {
        const double ratio = inc[p - 1] / (inc[p - 2] + kEps);
        if (ratio >= elbow_threshold) {
            const int level = std::max(static_cast<int>(p) - 1, 1);
            return LevelSelection{level, false};
        }
    }
    return LevelSelection{5, true};
}

CoefficientPacket build_packet(const std::vector<Signal>& signals, int variable,
                               int level, const WaveletFilter& f, ExtensionMode mode) {
    if (signals.empty()) throw std::invalid_argument("build_packet: no signals");
    CoefficientPacket packet;
    packet.variable = variable;
    packet.level = level;
    packet.rows = signals.size();

    for (std::size_t i = 0; i < signals.size(); ++i) {
        const WaveletDecomposition d = dwt_decompose(signals[i], level, f, mode);
        if (i == 0) {
            packet.coeff_ids.reserve(d.approx.size());
            for (std::size_t k = 0; k < d.approx.size(); ++k)
                packet.coeff_ids.push_back(std::to_string(variable) + ":" +
                                           std::to_string(k + 1));
            packet.coeffs.reserve(signals.size() * d.approx.size());
        }
        if (d.approx.size() != packet.coeff_ids.size())
            throw DataError("build_packet: inconsistent coefficient count across trials");
        packet.coeffs.insert(packet.coeffs.end(), d.approx.begin(), d.approx.end());
    }
    return packet;
}

std::vector<CoefficientPacket> compress_dataset(const Dataset& d,
                                                const PipelineConfig& cfg,
                                                CompressionReport* report) {
    if (d.trials.empty()) throw DataError("compress: empty dataset");
    const std::size_t J = d.variable_count();
    const WaveletFilter f = WaveletFilter::by_name(cfg.wavelet);
    const int p_max = eq_max_level(cfg.m);

    std::vector<CoefficientPacket> packets(J);
    std::vector<EqCurve> curves(J);
    std::vector<int> levels(J);
    std::vector<bool> fallback(J);

    parallel_for(J, cfg.threads, [&](std::size_t vj) {
        std::vector<Signal> signals;
        signals.reserve(d.trials.size());
        for (const Trial& t : d.trials) signals.push_back(t.signals[vj]);
        const int variable = static_cast<int>(vj) + 1;
        EqCurve curve = eq_curve(signals, variable, f, cfg.extension_mode, p_max);
        const LevelSelection sel = select_level(curve, cfg.elbow_threshold);
        packets[vj] = build_packet(signals, variable, sel.level, f, cfg.extension_mode);
        curves[vj] = std::move(curve);
        levels[vj] = sel.level;
        fallback[vj] = sel.fallback;
    });

    if (report) {
        report->eq_curves = std::move(curves);
        report->levels = levels;
        report->fallback = fallback;
        report->coeff_counts.clear();
        report->total_coefficients = 0;
        report->zero_variance_coefficients.clear();
        for (const auto& p : packets) {
            report->coeff_counts.push_back(p.cols());
            report->total_coefficients += p.cols();
            for (std::size_t c = 0; c < p.cols(); ++c) {
                const double first = p.at(0, c);
                bool constant = true;
                for (std::size_t r = 1; r < p.rows && constant; ++r)
                    constant = p.at(r, c) == first;
                if (constant) report->zero_variance_coefficients.push_back(p.coeff_ids[c]);
            }
        }
    }
    return packets;
}

}  // namespace wavecart
