#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavecart/compression.hpp"
#include "wavecart/core_types.hpp"
#include "wavecart/selection.hpp"
#include "wavecart/synth.hpp"

namespace wavecart {

enum class TableFormat { csv, json };

nlohmann::json config_to_json(const PipelineConfig& cfg);
nlohmann::json selection_to_json(const SelectionReport& r);
nlohmann::json report_to_json(const PipelineResult& result, const PipelineConfig& cfg);

// Writes report.json plus the figure-data side tables (eq_curves,
// packet_ranking, forward_steps, refinement_table, importance).
void save_report(const std::filesystem::path& dir, const PipelineResult& result,
                 const PipelineConfig& cfg, TableFormat format = TableFormat::csv);

// Re-renders the side tables from an existing report.json.
void render_report_tables(const std::filesystem::path& report_json_path,
                          const std::filesystem::path& dir,
                          TableFormat format = TableFormat::csv);

struct PacketSet {
    std::vector<CoefficientPacket> packets;
    std::vector<int> labels;
    int class_count = 0;
};

// Compressed-stage exchange format: packets.json + one CSV per variable
// (n rows x K_j columns, header = coefficient ids).
void save_packets(const std::filesystem::path& dir, const std::vector<CoefficientPacket>& packets,
                  const std::vector<int>& labels, int class_count,
                  const CompressionReport& report);
PacketSet load_packets(const std::filesystem::path& packets_json_path);

void save_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);
GroundTruth load_ground_truth(const std::filesystem::path& path);

void save_preprocess_audit(const std::filesystem::path& path, const PreprocessAudit& audit);

}  // namespace wavecart
