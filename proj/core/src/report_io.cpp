#include "wavecart/report_io.hpp"

#include <fstream>
#include <sstream>

#include "wavecart/dataset_io.hpp"

namespace wavecart {

namespace fs = std::filesystem;
using nlohmann::json;

nlohmann::json config_to_json(const PipelineConfig& cfg) {
    json j;
    j["m"] = cfg.m;
    j["wavelet"] = cfg.wavelet;
    j["denoise_level_min"] = cfg.denoise_level_min;
    j["denoise_level_max"] = cfg.denoise_level_max;
    j["extension_mode"] = to_string(cfg.extension_mode);
    j["threshold_rule"] = to_string(cfg.threshold_rule);
    j["elbow_threshold"] = cfg.elbow_threshold;
    j["importance_keep_fraction"] = cfg.importance_keep_fraction;
    j["low_signal_floor"] = cfg.low_signal_floor;
    j["cv_folds"] = cfg.cv_folds;
    j["cv_repeats"] = cfg.cv_repeats;
    j["bootstrap_count"] = cfg.bootstrap_count;
    j["seed"] = cfg.seed;
    j["forward_margin"] = cfg.forward_margin;
    j["importance_mode"] = to_string(cfg.importance_mode);
    j["phase2_use_screened"] = cfg.phase2_use_screened;
    j["phase5_strategy"] = to_string(cfg.phase5_strategy);
    j["final_top_k"] = cfg.final_top_k;
    j["refinement_prefix_cap"] = cfg.refinement_prefix_cap;
    j["min_node_size"] = cfg.min_node_size;
    j["max_depth"] = cfg.max_depth;
    j["surrogate_count"] = cfg.surrogate_count;
    return j;
}

nlohmann::json selection_to_json(const SelectionReport& r) {
    json j;
    j["phase3_rule"] = r.phase3_rule;
    j["importance_mode"] = to_string(r.importance_mode);
    j["degenerate"] = r.degenerate;

    j["screening"] = json::array();
    for (const auto& s : r.screened) {
        json js;
        js["variable"] = s.variable;
        js["kept"] = s.kept_ids;
        js["low_signal"] = s.low_signal;
        js["empty"] = s.empty;
        json imp;
        for (const auto& [id, v] : s.importance_raw) imp[id] = v;
        js["importance"] = imp;
        j["screening"].push_back(std::move(js));
    }

    j["ranking"] = json::array();
    for (const auto& rank : r.ranking)
        j["ranking"].push_back(json{{"variable", rank.variable},
                                    {"cv_cost", rank.cv_cost},
                                    {"kept_count", rank.kept_count}});

    j["forward_steps"] = json::array();
    for (const auto& step : r.steps)
        j["forward_steps"].push_back(json{{"step", step.step},
                                          {"variable", step.candidate_variable},
                                          {"cv_cost", step.cv_cost},
                                          {"decision", step.kept ? "kept" : "dropped"},
                                          {"model_size", step.included.size()},
                                          {"included", step.included}});

    j["chosen_step"] = r.chosen_step;
    j["chosen_variables"] = r.chosen_variables;

    j["final_importance"] = json::array();
    for (const auto& [id, v] : r.final_importance)
        j["final_importance"].push_back(json{{"coefficient", id}, {"importance", v}});

    j["strategy"] = to_string(r.strategy);
    j["refinement"] = json::array();
    for (const auto& row : r.refinement)
        j["refinement"].push_back(json{{"size", row.size},
                                       {"apparent_cost", row.apparent_cost},
                                       {"cv_cost", row.cv_cost}});
    j["refinement_chosen_size"] = r.refinement_chosen_size;
    j["final_criteria"] = r.final_criteria;
    return j;
}

nlohmann::json report_to_json(const PipelineResult& result, const PipelineConfig& cfg) {
    json j;
    j["config"] = config_to_json(cfg);
    j["stage_order"] = result.stage_order;

    json jp;
    jp["trials"] = json::array();
    for (const auto& t : result.preprocess.trials)
        jp["trials"].push_back(json{{"id", t.trial_id},
                                    {"window_start", t.window_start},
                                    {"window_end", t.window_end},
                                    {"truncated_length", t.truncated_length},
                                    {"denoise_levels", t.denoise_levels}});
    j["preprocess"] = std::move(jp);

    json jc;
    jc["levels"] = result.compression.levels;
    jc["coeff_counts"] = result.compression.coeff_counts;
    jc["total_coefficients"] = result.compression.total_coefficients;
    json fb = json::array();
    for (std::size_t i = 0; i < result.compression.fallback.size(); ++i)
        if (result.compression.fallback[i]) fb.push_back(i + 1);
    jc["fallback_variables"] = std::move(fb);
    jc["zero_variance_coefficients"] = result.compression.zero_variance_coefficients;
    jc["eq_curves"] = json::array();
    for (const auto& c : result.compression.eq_curves)
        jc["eq_curves"].push_back(json{{"variable", c.variable}, {"values", c.values}});
    j["compression"] = std::move(jc);

    j["selection"] = selection_to_json(result.selection);
    return j;
}

namespace {

std::string csv_escape(const std::string& s) { return s; }  // ids never need quoting

void write_table(const fs::path& dir, const std::string& name, TableFormat format,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    if (format == TableFormat::csv) {
        std::string body;
        for (std::size_t c = 0; c < header.size(); ++c)
            body += (c ? "," : "") + header[c];
        body += '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                body += (c ? "," : "") + csv_escape(row[c]);
            body += '\n';
        }
        write_file_atomic(dir / (name + ".csv"), body);
    } else {
        json arr = json::array();
        for (const auto& row : rows) {
            json obj;
            for (std::size_t c = 0; c < header.size(); ++c) obj[header[c]] = row[c];
            arr.push_back(std::move(obj));
        }
        write_file_atomic(dir / (name + ".json"), arr.dump(2) + "\n");
    }
}

std::string num(const json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    std::ostringstream out;
    out << v;
    return out.str();
}

void render_tables(const json& report, const fs::path& dir, TableFormat format) {
    {
        std::vector<std::vector<std::string>> rows;
        if (report.contains("compression"))
            for (const auto& curve : report["compression"]["eq_curves"]) {
                const auto& values = curve["values"];
                for (std::size_t p = 0; p < values.size(); ++p)
                    rows.push_back({num(curve["variable"]), std::to_string(p + 1),
                                    num(values[p])});
            }
        write_table(dir, "eq_curves", format, {"variable", "p", "eq"}, rows);
    }
    const json& sel = report.at("selection");
    {
        std::vector<std::vector<std::string>> rows;
        int rank = 1;
        for (const auto& r : sel["ranking"])
            rows.push_back({std::to_string(rank++), num(r["variable"]), num(r["cv_cost"]),
                            num(r["kept_count"])});
        write_table(dir, "packet_ranking", format,
                    {"rank", "variable", "cv_cost", "kept_count"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& s : sel["forward_steps"])
            rows.push_back({num(s["step"]), num(s["variable"]), num(s["cv_cost"]),
                            s["decision"].get<std::string>(), num(s["model_size"])});
        write_table(dir, "forward_steps", format,
                    {"step", "variable", "cv_cost", "decision", "model_size"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        const int chosen = sel.value("refinement_chosen_size", 0);
        for (const auto& r : sel["refinement"])
            rows.push_back({num(r["size"]), num(r["apparent_cost"]), num(r["cv_cost"]),
                            r["size"].get<int>() == chosen ? "1" : "0"});
        write_table(dir, "refinement_table", format,
                    {"size", "apparent_cost", "cv_cost", "chosen"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : sel["final_importance"])
            rows.push_back({r["coefficient"].get<std::string>(), num(r["importance"])});
        write_table(dir, "importance", format, {"coefficient", "importance"}, rows);
    }
}

}  // namespace

void save_report(const fs::path& dir, const PipelineResult& result,
                 const PipelineConfig& cfg, TableFormat format) {
    fs::create_directories(dir);
    const json report = report_to_json(result, cfg);
    write_file_atomic(dir / "report.json", report.dump(2) + "\n");
    render_tables(report, dir, format);
}

void render_report_tables(const fs::path& report_json_path, const fs::path& dir,
                          TableFormat format) {
    std::ifstream in(report_json_path);
    if (!in) throw DataError("cannot open report " + report_json_path.string());
    json report;
    try {
        in >> report;
    } catch (const json::exception& e) {
        throw DataError("report " + report_json_path.string() + ": " + e.what());
    }
    fs::create_directories(dir);
    render_tables(report, dir, format);
}

void save_packets(const fs::path& dir, const std::vector<CoefficientPacket>& packets,
                  const std::vector<int>& labels, int class_count,
                  const CompressionReport& report) {
    fs::create_directories(dir);
    json j;
    j["class_count"] = class_count;
    j["labels"] = labels;
    j["variables"] = json::array();

    for (const auto& p : packets) {
        const std::string file = "packet_v" + std::to_string(p.variable) + ".csv";
        std::string body;
        for (std::size_t c = 0; c < p.cols(); ++c) body += (c ? "," : "") + p.coeff_ids[c];
        body += '\n';
        for (std::size_t r = 0; r < p.rows; ++r) {
            for (std::size_t c = 0; c < p.cols(); ++c)
                body += (c ? "," : "") + format_double(p.at(r, c));
            body += '\n';
        }
        write_file_atomic(dir / file, body);
        j["variables"].push_back(json{{"variable", p.variable},
                                      {"level", p.level},
                                      {"coeff_ids", p.coeff_ids},
                                      {"csv", file}});
    }

    json jc;
    jc["levels"] = report.levels;
    jc["coeff_counts"] = report.coeff_counts;
    jc["total_coefficients"] = report.total_coefficients;
    jc["eq_curves"] = json::array();
    for (const auto& c : report.eq_curves)
        jc["eq_curves"].push_back(json{{"variable", c.variable}, {"values", c.values}});
    j["compression"] = std::move(jc);

    write_file_atomic(dir / "packets.json", j.dump(2) + "\n");
}

PacketSet load_packets(const fs::path& packets_json_path) {
    std::ifstream in(packets_json_path);
    if (!in) throw DataError("cannot open packets file " + packets_json_path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("packets " + packets_json_path.string() + ": " + e.what());
    }

    PacketSet set;
    const fs::path base = packets_json_path.parent_path();
    try {
        set.class_count = j.at("class_count").get<int>();
        set.labels = j.at("labels").get<std::vector<int>>();
        for (const auto& jv : j.at("variables")) {
            CoefficientPacket p;
            p.variable = jv.at("variable").get<int>();
            p.level = jv.at("level").get<int>();
            p.coeff_ids = jv.at("coeff_ids").get<std::vector<std::string>>();

            std::ifstream csv(base / jv.at("csv").get<std::string>());
            if (!csv)
                throw DataError("cannot open packet csv for variable " +
                                std::to_string(p.variable));
            std::string line;
            std::getline(csv, line);  // header
            while (std::getline(csv, line)) {
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line.empty()) continue;
                std::istringstream row(line);
                std::string cell;
                std::size_t cols = 0;
                while (std::getline(row, cell, ',')) {
                    p.coeffs.push_back(std::stod(cell));
                    ++cols;
                }
                if (cols != p.coeff_ids.size())
                    throw DataError("packet csv for variable " + std::to_string(p.variable) +
                                    ": ragged row");
                ++p.rows;
            }
            set.packets.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        throw DataError("packets " + packets_json_path.string() + ": " + e.what());
    }
    return set;
}

void save_ground_truth(const fs::path& path, const GroundTruth& truth) {
    json j;
    j["discriminant_variables"] = truth.discriminant_variables;
    json kinds = json::array();
    for (EffectKind k : truth.effect_kinds) kinds.push_back(to_string(k));
    j["effect_kinds"] = std::move(kinds);
    j["effect_size"] = truth.effect_size;
    j["labels"] = truth.labels;
    j["class_counts"] = truth.class_counts;
    j["windows"] = json::array();
    for (const auto& w : truth.windows)
        j["windows"].push_back(json{{"start", w.start}, {"end", w.end}});
    write_file_atomic(path, j.dump(2) + "\n");
}

GroundTruth load_ground_truth(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open ground truth " + path.string());
    json j;
    in >> j;
    GroundTruth truth;
    truth.discriminant_variables = j.at("discriminant_variables").get<std::vector<int>>();
    for (const auto& k : j.at("effect_kinds"))
        truth.effect_kinds.push_back(effect_kind_from_string(k.get<std::string>()));
    truth.effect_size = j.at("effect_size").get<double>();
    truth.labels = j.at("labels").get<std::vector<int>>();
    truth.class_counts = j.at("class_counts").get<std::vector<int>>();
    for (const auto& w : j.at("windows"))
        truth.windows.push_back(ActiveWindow{w.at("start").get<std::size_t>(),
                                             w.at("end").get<std::size_t>()});
    return truth;
}

void save_preprocess_audit(const fs::path& path, const PreprocessAudit& audit) {
    json j;
    j["stage_order"] = audit.stage_order;
    j["trials"] = json::array();
    for (const auto& t : audit.trials)
        j["trials"].push_back(json{{"id", t.trial_id},
                                   {"window_start", t.window_start},
                                   {"window_end", t.window_end},
                                   {"truncated_length", t.truncated_length},
                                   {"denoise_levels", t.denoise_levels}});
    write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace wavecart
