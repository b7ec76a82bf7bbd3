#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wavecart/cart.hpp"
#include "wavecart/compression.hpp"
#include "wavecart/core_types.hpp"
#include "wavecart/preprocess.hpp"

namespace wavecart {

// Phase 1 output: the useful coefficients of one packet.
struct ScreenedPacket {
    int variable = 0;
    std::vector<std::size_t> kept_cols;     // column indices into the packet
    std::vector<std::string> kept_ids;
    std::map<std::string, double> importance_raw;
    bool low_signal = false;  // max raw importance below the absolute floor
    bool empty = false;       // nothing kept; excluded from later phases
};

struct PacketRank {
    int variable = 0;
    double cv_cost = 0.0;
    std::size_t kept_count = 0;
};

// One forward step: the candidate packet, the CV cost of the model including
// it, and whether it was kept.
struct ModelStep {
    int step = 0;  // 1-based
    int candidate_variable = 0;
    double cv_cost = 0.0;
    bool kept = false;
    std::vector<int> included;  // variables in the model after the drop test
};

struct RefinementRow {
    int size = 0;
    double apparent_cost = 0.0;
    double cv_cost = 0.0;
};

struct SelectionReport {
    std::vector<ScreenedPacket> screened;
    std::vector<PacketRank> ranking;                      // ascending CV cost
    std::vector<ModelStep> steps;
    int chosen_step = 0;                                  // 1-based; 0 = none
    std::vector<int> chosen_variables;
    std::vector<std::pair<std::string, double>> final_importance;  // descending
    Phase5Strategy strategy = Phase5Strategy::nested;
    std::vector<RefinementRow> refinement;
    int refinement_chosen_size = 0;
    std::vector<std::string> final_criteria;
    bool degenerate = false;
    // The forward "test" the paper leaves open, stated up front in reports.
    std::string phase3_rule;
    ImportanceMode importance_mode = ImportanceMode::primary_plus_surrogate;
};

std::vector<ScreenedPacket> phase1_screen(const std::vector<CoefficientPacket>& packets,
                                          const std::vector<int>& y, const CostMatrix& gamma,
                                          const PipelineConfig& cfg);

std::vector<PacketRank> phase2_rank(const std::vector<ScreenedPacket>& screened,
                                    const std::vector<CoefficientPacket>& packets,
                                    const std::vector<int>& y, const CostMatrix& gamma,
                                    const PipelineConfig& cfg);

std::vector<ModelStep> phase3_forward(const std::vector<PacketRank>& ranking,
                                      const std::vector<ScreenedPacket>& screened,
                                      const std::vector<CoefficientPacket>& packets,
                                      const std::vector<int>& y, const CostMatrix& gamma,
                                      const PipelineConfig& cfg);

// Index (1-based step number) of the minimum-CV step; ties favor the smaller
// model, then the earlier step.
int phase4_select(const std::vector<ModelStep>& steps);

void phase5_finalize(const std::vector<int>& chosen_variables,
                     const std::vector<ScreenedPacket>& screened,
                     const std::vector<CoefficientPacket>& packets,
                     const std::vector<int>& y, const CostMatrix& gamma,
                     const PipelineConfig& cfg, SelectionReport& report);

// Phases 1-5 over an already compressed dataset.
SelectionReport run_selection(const std::vector<CoefficientPacket>& packets,
                              const std::vector<int>& y, const CostMatrix& gamma,
                              const PipelineConfig& cfg);

struct PipelineResult {
    PreprocessAudit preprocess;
    CompressionReport compression;
    std::vector<CoefficientPacket> packets;
    SelectionReport selection;
    std::vector<std::string> stage_order;
};

// preprocess -> compress -> phases 1-5.
PipelineResult run_pipeline(const Dataset& d, const PipelineConfig& cfg);

// Labels of a dataset in trial order.
std::vector<int> dataset_labels(const Dataset& d);

// Canonically ordered feature table (by variable, then coefficient) from the
// kept columns of the given variables.
FeatureTable assemble_features(const std::vector<int>& variables,
                               const std::vector<ScreenedPacket>& screened,
                               const std::vector<CoefficientPacket>& packets);

}  // namespace wavecart
