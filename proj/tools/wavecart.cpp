// wavecart: wavelet preprocessing + compression + CART variable selection
// for labelled functional datasets.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wavecart/config_io.hpp"
#include "wavecart/core_types.hpp"
#include "wavecart/dataset_io.hpp"
#include "wavecart/preprocess.hpp"
#include "wavecart/report_io.hpp"
#include "wavecart/selection.hpp"
#include "wavecart/synth.hpp"
#include "wavecart/wavelet.hpp"

namespace fs = std::filesystem;
using namespace wavecart;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_out = true) {
    cmd->add_option("--config", opts.config_path, "pipeline config file (key = value lines)");
    cmd->add_option("--seed", opts.seed, "random seed (overrides config)");
    cmd->add_option("--threads", opts.threads, "worker cap, 0 = all cores");
    auto* out = cmd->add_option("--out", opts.out, "output directory");
    if (needs_out) out->required();
    cmd->add_option("--format", opts.format, "table format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

PipelineConfig resolve_config(const CommonOpts& opts) {
    PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.threads) cfg.threads = *opts.threads;
    const auto issues = cfg.validate();
    if (!issues.empty()) throw DataError("config: " + issues.front());
    return cfg;
}

TableFormat table_format(const CommonOpts& opts) {
    return opts.format == "json" ? TableFormat::json : TableFormat::csv;
}

Dataset load_manifest_checked(const std::string& path) {
    Dataset d = load_dataset(path);
    const auto violations = validate_dataset(d);
    if (!violations.empty())
        throw DataError(path + ": " + violations.front() +
                        (violations.size() > 1
                             ? " (+" + std::to_string(violations.size() - 1) + " more)"
                             : ""));
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavelet + CART discriminant-variable selection for functional data"};
    app.require_subcommand(1);

    // synth
    CommonOpts synth_opts;
    PlantSpec plant;
    auto* synth_cmd = app.add_subcommand("synth", "generate a seeded synthetic benchmark");
    add_common(synth_cmd, synth_opts);
    synth_cmd->add_option("--n", plant.n, "number of trials");
    synth_cmd->add_option("--variables", plant.variable_count, "number of functional variables");
    synth_cmd->add_option("--classes", plant.class_count, "number of ordinal classes");
    synth_cmd->add_option("--effect-size", plant.effect_size, "planted effect size");
    synth_cmd->add_option("--noise-sigma", plant.noise_sigma, "white noise level");

    // preprocess
    CommonOpts pre_opts;
    std::string pre_manifest;
    auto* pre_cmd = app.add_subcommand("preprocess",
                                       "truncate, denoise, resample, normalize");
    add_common(pre_cmd, pre_opts);
    pre_cmd->add_option("--manifest", pre_manifest, "dataset manifest")->required();

    // denoise
    CommonOpts den_opts;
    std::string den_manifest;
    auto* den_cmd = app.add_subcommand("denoise", "wavelet-denoise every signal as-is");
    add_common(den_cmd, den_opts);
    den_cmd->add_option("--manifest", den_manifest, "dataset manifest")->required();

    // compress
    CommonOpts comp_opts;
    std::string comp_manifest;
    auto* comp_cmd = app.add_subcommand("compress",
                                        "level selection + coefficient packets");
    add_common(comp_cmd, comp_opts);
    comp_cmd->add_option("--manifest", comp_manifest, "preprocessed dataset manifest")
        ->required();

    // select
    CommonOpts sel_opts;
    std::string sel_packets;
    auto* sel_cmd = app.add_subcommand("select", "five-phase CART variable selection");
    add_common(sel_cmd, sel_opts);
    sel_cmd->add_option("--packets", sel_packets, "packets.json from 'compress'")->required();

    // run
    CommonOpts run_opts;
    std::string run_manifest;
    auto* run_cmd = app.add_subcommand("run", "full pipeline: preprocess, compress, select");
    add_common(run_cmd, run_opts);
    run_cmd->add_option("--manifest", run_manifest, "raw dataset manifest")->required();

    // report
    CommonOpts rep_opts;
    std::string rep_path;
    auto* rep_cmd = app.add_subcommand("report", "re-render tables from a report.json");
    add_common(rep_cmd, rep_opts);
    rep_cmd->add_option("--report", rep_path, "report.json path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth_cmd->parsed()) {
            const PipelineConfig cfg = resolve_config(synth_opts);
            const SynthResult result = generate(plant, cfg.seed);
            const fs::path dir = synth_opts.out;
            save_dataset(result.dataset, dir);
            save_ground_truth(dir / "ground_truth.json", result.truth);
            std::cout << "wrote " << (dir / "manifest.json").string() << " ("
                      << result.dataset.trial_count() << " trials)\n";
        } else if (pre_cmd->parsed()) {
            const PipelineConfig cfg = resolve_config(pre_opts);
            const Dataset d = load_manifest_checked(pre_manifest);
            PreprocessAudit audit;
            const Dataset processed = preprocess_dataset(d, cfg, &audit);
            const fs::path dir = pre_opts.out;
            save_dataset(processed, dir);
            save_preprocess_audit(dir / "preprocess_audit.json", audit);
            std::cout << "wrote " << (dir / "manifest.json").string() << "\n";
        } else if (den_cmd->parsed()) {
            const PipelineConfig cfg = resolve_config(den_opts);
            Dataset d = load_manifest_checked(den_manifest);
            for (Trial& t : d.trials)
                for (Signal& s : t.signals) s = denoise(s, cfg);
            save_dataset(d, fs::path(den_opts.out));
            std::cout << "wrote " << (fs::path(den_opts.out) / "manifest.json").string()
                      << "\n";
        } else if (comp_cmd->parsed()) {
            const PipelineConfig cfg = resolve_config(comp_opts);
            const Dataset d = load_manifest_checked(comp_manifest);
            CompressionReport report;
            const auto packets = compress_dataset(d, cfg, &report);
            save_packets(comp_opts.out, packets, dataset_labels(d), d.class_count, report);
            std::cout << "wrote " << (fs::path(comp_opts.out) / "packets.json").string()
                      << " (total coefficients: " << report.total_coefficients << ")\n";
        } else if (sel_cmd->parsed()) {
            const PipelineConfig cfg = resolve_config(sel_opts);
            const PacketSet set = load_packets(sel_packets);
            const CostMatrix gamma = CostMatrix::absolute_difference(set.class_count);
            PipelineResult result;
            result.packets = set.packets;
            result.selection = run_selection(set.packets, set.labels, gamma, cfg);
            result.stage_order = {"select"};
            save_report(sel_opts.out, result, cfg, table_format(sel_opts));
            std::cout << "wrote " << (fs::path(sel_opts.out) / "report.json").string()
                      << "\n";
        } else if (run_cmd->parsed()) {
            const PipelineConfig cfg = resolve_config(run_opts);
            const Dataset d = load_manifest_checked(run_manifest);
            const PipelineResult result = run_pipeline(d, cfg);
            save_report(run_opts.out, result, cfg, table_format(run_opts));
            std::cout << "wrote " << (fs::path(run_opts.out) / "report.json").string()
                      << "\n";
        } else if (rep_cmd->parsed()) {
            const PipelineConfig cfg = resolve_config(rep_opts);
            (void)cfg;
            render_report_tables(rep_path, rep_opts.out, table_format(rep_opts));
            std::cout << "re-rendered tables into " << rep_opts.out << "\n";
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
