#include "wavecart/selection.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "wavecart/parallel.hpp"
#include "wavecart/rng.hpp"

namespace wavecart {

namespace {

GrowthParams growth_params(const PipelineConfig& cfg) {
    return GrowthParams{cfg.min_node_size, cfg.max_depth, cfg.surrogate_count};
}

const CoefficientPacket& packet_for(const std::vector<CoefficientPacket>& packets,
                                    int variable) {
    for (const auto& p : packets)
        if (p.variable == variable) return p;
    throw std::invalid_argument("no packet for variable " + std::to_string(variable));
}

const ScreenedPacket& screened_for(const std::vector<ScreenedPacket>& screened,
                                   int variable) {
    for (const auto& s : screened)
        if (s.variable == variable) return s;
    throw std::invalid_argument("no screened packet for variable " + std::to_string(variable));
}

FeatureTable table_from_columns(
    const std::vector<CoefficientPacket>& packets,
    const std::vector<std::pair<int, std::size_t>>& columns) {  // (variable, col)
    FeatureTable t;
    if (columns.empty()) return t;
    t.rows = packet_for(packets, columns.front().first).rows;
    t.ids.reserve(columns.size());
    for (const auto& [variable, col] : columns)
        t.ids.push_back(packet_for(packets, variable).coeff_ids[col]);
    t.data.resize(t.rows * columns.size());
    for (std::size_t r = 0; r < t.rows; ++r)
        for (std::size_t c = 0; c < columns.size(); ++c)
            t.data[r * columns.size() + c] =
                packet_for(packets, columns[c].first).at(r, columns[c].second);
    return t;
}

}  // namespace

std::vector<int> dataset_labels(const Dataset& d) {
    std::vector<int> y;
    y.reserve(d.trials.size());
    for (const Trial& t : d.trials) y.push_back(t.label);
    return y;
}

FeatureTable assemble_features(const std::vector<int>& variables,
                               const std::vector<ScreenedPacket>& screened,
                               const std::vector<CoefficientPacket>& packets) {
    std::vector<int> sorted = variables;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<int, std::size_t>> columns;
    for (int v : sorted) {
        const ScreenedPacket& s = screened_for(screened, v);
        for (std::size_t col : s.kept_cols) columns.emplace_back(v, col);
    }
    return table_from_columns(packets, columns);
}

std::vector<ScreenedPacket> phase1_screen(const std::vector<CoefficientPacket>& packets,
                                          const std::vector<int>& y, const CostMatrix& gamma,
                                          const PipelineConfig& cfg) {
    std::vector<ScreenedPacket> out(packets.size());
    const GrowthParams params = growth_params(cfg);

    parallel_for(packets.size(), cfg.threads, [&](std::size_t i) {
        const CoefficientPacket& p = packets[i];
        FeatureTable table;
        table.ids = p.coeff_ids;
        table.rows = p.rows;
        table.data = p.coeffs;

        const ImportanceResult imp = bagged_importance(
            table, y, gamma, params, cfg.bootstrap_count,
            derive_seed(cfg.seed, "phase1", static_cast<std::uint64_t>(p.variable)),
            cfg.importance_mode, 1);

        ScreenedPacket s;
        s.variable = p.variable;
        s.importance_raw = imp.raw;
        double max_raw = 0.0;
        for (const auto& [id, v] : imp.raw) max_raw = std::max(max_raw, v);
        s.low_signal = max_raw < cfg.low_signal_floor;
        if (max_raw <= 0.0) {
            s.empty = true;
        } else {
            const double floor = cfg.importance_keep_fraction * max_raw;
            for (std::size_t col = 0; col < p.cols(); ++col) {
                if (imp.raw.at(p.coeff_ids[col]) >= floor) {
                    s.kept_cols.push_back(col);
                    s.kept_ids.push_back(p.coeff_ids[col]);
                }
            }
            s.empty = s.kept_cols.empty();
        }
        out[i] = std::move(s);
    });
    return out;
}

std::vector<PacketRank> phase2_rank(const std::vector<ScreenedPacket>& screened,
                                    const std::vector<CoefficientPacket>& packets,
                                    const std::vector<int>& y, const CostMatrix& gamma,
                                    const PipelineConfig& cfg) {
    std::vector<const ScreenedPacket*> usable;
    for (const auto& s : screened)
        if (!s.empty) usable.push_back(&s);

    std::vector<PacketRank> ranks(usable.size());
    const GrowthParams params = growth_params(cfg);

    parallel_for(usable.size(), cfg.threads, [&](std::size_t i) {
        const ScreenedPacket& s = *usable[i];
        std::vector<std::pair<int, std::size_t>> columns;
        if (cfg.phase2_use_screened) {
            for (std::size_t col : s.kept_cols) columns.emplace_back(s.variable, col);
        } else {
            const CoefficientPacket& p = packet_for(packets, s.variable);
            for (std::size_t col = 0; col < p.cols(); ++col)
                columns.emplace_back(s.variable, col);
        }
        const FeatureTable table = table_from_columns(packets, columns);
        const CvResult cv = cv_cost(table, y, gamma, params, cfg.cv_folds, cfg.cv_repeats,
                                    derive_seed(cfg.seed, "phase2"), 1);
        ranks[i] = PacketRank{s.variable, cv.mean_cost, s.kept_cols.size()};
    });

    std::sort(ranks.begin(), ranks.end(), [](const PacketRank& a, const PacketRank& b) {
        if (a.cv_cost != b.cv_cost) return a.cv_cost < b.cv_cost;
        if (a.kept_count != b.kept_count) return a.kept_count < b.kept_count;
        return a.variable < b.variable;
    });
    return ranks;
}

std::vector<ModelStep> phase3_forward(const std::vector<PacketRank>& ranking,
                                      const std::vector<ScreenedPacket>& screened,
                                      const std::vector<CoefficientPacket>& packets,
                                      const std::vector<int>& y, const CostMatrix& gamma,
                                      const PipelineConfig& cfg) {
    std::vector<ModelStep> steps;
    std::vector<int> included;
    double best = std::numeric_limits<double>::infinity();
    const GrowthParams params = growth_params(cfg);

    for (std::size_t i = 0; i < ranking.size(); ++i) {
        const int candidate = ranking[i].variable;
        std::vector<int> trial_model = included;
        trial_model.push_back(candidate);
        const FeatureTable table = assemble_features(trial_model, screened, packets);
        const CvResult cv = cv_cost(table, y, gamma, params, cfg.cv_folds, cfg.cv_repeats,
                                    derive_seed(cfg.seed, "phase3"), cfg.threads);

        ModelStep step;
        step.step = static_cast<int>(i) + 1;
        step.candidate_variable = candidate;
        step.cv_cost = cv.mean_cost;
        step.kept = cv.mean_cost < best - cfg.forward_margin;
        if (step.kept) {
            included = std::move(trial_model);
            best = cv.mean_cost;
        }
        step.included = included;
        steps.push_back(std::move(step));
    }
    return steps;
}

int phase4_select(const std::vector<ModelStep>& steps) {
    if (steps.empty()) return 0;
    int best = 0;  // index
    for (std::size_t i = 1; i < steps.size(); ++i) {
        const ModelStep& a = steps[i];
        const ModelStep& b = steps[static_cast<std::size_t>(best)];
        if (a.cv_cost < b.cv_cost ||
            (a.cv_cost == b.cv_cost && a.included.size() < b.included.size()))
            best = static_cast<int>(i);
    }
    return steps[static_cast<std::size_t>(best)].step;
}

namespace {

struct RankedCoefficient {
    std::string id;
    int variable;
    std::size_t col;
    double importance;
};

}  // namespace

void phase5_finalize(const std::vector<int>& chosen_variables,
                     const std::vector<ScreenedPacket>& screened,
                     const std::vector<CoefficientPacket>& packets,
                     const std::vector<int>& y, const CostMatrix& gamma,
                     const PipelineConfig& cfg, SelectionReport& report) {
    report.strategy = cfg.phase5_strategy;
    if (chosen_variables.empty()) return;

    const FeatureTable model_table = assemble_features(chosen_variables, screened, packets);
    const GrowthParams params = growth_params(cfg);
    const ImportanceResult imp =
        bagged_importance(model_table, y, gamma, params, cfg.bootstrap_count,
                          derive_seed(cfg.seed, "phase5-importance"), cfg.importance_mode,
                          cfg.threads);

    // Rank the model's coefficients by bagged importance; ties resolved by
    // (variable, coefficient) to keep runs reproducible.
    std::vector<RankedCoefficient> ranked;
    {
        std::vector<int> sorted_vars = chosen_variables;
        std::sort(sorted_vars.begin(), sorted_vars.end());
        for (int v : sorted_vars) {
            const ScreenedPacket& s = screened_for(screened, v);
            for (std::size_t i = 0; i < s.kept_cols.size(); ++i)
                ranked.push_back(RankedCoefficient{s.kept_ids[i], v, s.kept_cols[i],
                                                   imp.raw.at(s.kept_ids[i])});
        }
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedCoefficient& a, const RankedCoefficient& b) {
                         return a.importance > b.importance;
                     });

    report.final_importance.clear();
    const auto scaled = scale_importance(imp.raw);
    for (const auto& rc : ranked)
        report.final_importance.emplace_back(rc.id, scaled.at(rc.id));

    if (cfg.phase5_strategy == Phase5Strategy::top_k) {
        const std::size_t k =
            std::min<std::size_t>(static_cast<std::size_t>(cfg.final_top_k), ranked.size());
        for (std::size_t i = 0; i < k; ++i) report.final_criteria.push_back(ranked[i].id);
        return;
    }

    // Nested refinement: CV along the importance-ordered prefix models.
    const std::size_t cap =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.refinement_prefix_cap),
                              ranked.size());
    report.refinement.assign(cap, RefinementRow{});
    parallel_for(cap, cfg.threads, [&](std::size_t s) {
        const std::size_t size = s + 1;
        std::vector<std::pair<int, std::size_t>> columns;
        for (std::size_t i = 0; i < size; ++i)
            columns.emplace_back(ranked[i].variable, ranked[i].col);
        std::sort(columns.begin(), columns.end());
        const FeatureTable table = table_from_columns(packets, columns);

        Tree tree = grow_tree(table, y, gamma, params);
        const double apparent = resubstitution_cost(tree, table, y, gamma);
        const CvResult cv = cv_cost(table, y, gamma, params, cfg.cv_folds, cfg.cv_repeats,
                                    derive_seed(cfg.seed, "phase5-refine"), 1);
        report.refinement[s] = RefinementRow{static_cast<int>(size), apparent, cv.mean_cost};
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < report.refinement.size(); ++i)
        if (report.refinement[i].cv_cost < report.refinement[best].cv_cost) best = i;
    report.refinement_chosen_size = report.refinement[best].size;
    for (std::size_t i = 0; i < static_cast<std::size_t>(report.refinement_chosen_size); ++i)
        report.final_criteria.push_back(ranked[i].id);
}

SelectionReport run_selection(const std::vector<CoefficientPacket>& packets,
                              const std::vector<int>& y, const CostMatrix& gamma,
                              const PipelineConfig& cfg) {
    SelectionReport report;
    report.phase3_rule =
        "keep candidate packet iff CV cost improves on the best so far by more than " +
        std::to_string(cfg.forward_margin);
    report.importance_mode = cfg.importance_mode;

    report.screened = phase1_screen(packets, y, gamma, cfg);

    bool any_usable = false;
    for (const auto& s : report.screened) any_usable |= !s.empty;
    if (!any_usable) {
        report.degenerate = true;
        return report;
    }

    report.ranking = phase2_rank(report.screened, packets, y, gamma, cfg);
    report.steps = phase3_forward(report.ranking, report.screened, packets, y, gamma, cfg);
    report.chosen_step = phase4_select(report.steps);
    if (report.chosen_step > 0)
        report.chosen_variables =
            report.steps[static_cast<std::size_t>(report.chosen_step - 1)].included;
    if (report.chosen_variables.empty()) {
        report.degenerate = true;
        return report;
    }
    phase5_finalize(report.chosen_variables, report.screened, packets, y, gamma, cfg,
                    report);
    return report;
}

PipelineResult run_pipeline(const Dataset& d, const PipelineConfig& cfg) {
    const auto issues = cfg.validate();
    if (!issues.empty()) throw std::invalid_argument("config: " + issues.front());

    PipelineResult result;
    Dataset processed;
    try {
        processed = preprocess_dataset(d, cfg, &result.preprocess);
    } catch (const DataError& e) {
        throw DataError(std::string("preprocess: ") + e.what());
    }
    try {
        result.packets = compress_dataset(processed, cfg, &result.compression);
    } catch (const DataError& e) {
        throw DataError(std::string("compress: ") + e.what());
    }
    const std::vector<int> y = dataset_labels(d);
    const CostMatrix gamma = CostMatrix::absolute_difference(d.class_count);
    try {
        result.selection = run_selection(result.packets, y, gamma, cfg);
    } catch (const DataError& e) {
        throw DataError(std::string("select: ") + e.what());
    }
    result.stage_order = result.preprocess.stage_order;
    result.stage_order.push_back("compress");
    result.stage_order.push_back("select");
    return result;
}

}  // namespace wavecart
