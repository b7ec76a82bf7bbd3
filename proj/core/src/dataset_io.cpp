#include "wavecart/dataset_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wavecart {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw DataError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<double> read_signal_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open signal file " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;  // tolerate trailing blank line
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || *end != '\0')
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": not a number: '" + line + "'");
        if (!std::isfinite(v))
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": non-finite value rejected");
        values.push_back(v);
    }
    return values;
}

void write_signal_csv(const fs::path& path, const std::vector<double>& values) {
    std::string body;
    body.reserve(values.size() * 20);
    for (double v : values) {
        body += format_double(v);
        body += '\n';
    }
    write_file_atomic(path, body);
}

Dataset load_dataset(const fs::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw DataError("cannot open manifest " + manifest_path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("manifest " + manifest_path.string() + ": " + e.what());
    }

    Dataset d;
    try {
        d.class_count = j.at("class_count").get<int>();
        d.variable_names = j.at("variable_names").get<std::vector<std::string>>();
        d.marker_start_index = j.value("marker_start_index", 8);
        d.marker_end_index = j.value("marker_end_index", 21);
        const std::string grid_kind = j.value("grid", "raw");
        const fs::path base = manifest_path.parent_path();

        for (const auto& jt : j.at("trials")) {
            Trial t;
            t.id = jt.at("id").get<std::string>();
            t.label = jt.at("label").get<int>();
            const auto files = jt.at("signals").get<std::vector<std::string>>();
            if (files.size() != d.variable_names.size())
                throw DataError("manifest: trial " + t.id + " lists " +
                                std::to_string(files.size()) + " signals, expected " +
                                std::to_string(d.variable_names.size()));
            const double t0 = jt.value("t0", 0.0);
            const double dt = jt.value("dt", 0.0);
            for (const auto& file : files) {
                Signal s;
                s.values = read_signal_csv(base / file);
                if (grid_kind == "unit")
                    s.grid = Grid::unit(s.values.size());
                else
                    s.grid = Grid::raw(t0, dt, s.values.size());
                t.signals.push_back(std::move(s));
            }
            d.trials.push_back(std::move(t));
        }
    } catch (const json::exception& e) {
        throw DataError("manifest " + manifest_path.string() + ": " + e.what());
    }
    return d;
}

std::filesystem::path save_dataset(const Dataset& d, const fs::path& dir) {
    fs::create_directories(dir / "signals");

    const bool unit = !d.trials.empty() && !d.trials.front().signals.empty() &&
                      d.trials.front().signals.front().grid.kind == Grid::Kind::unit;

    json j;
    j["class_count"] = d.class_count;
    j["variable_names"] = d.variable_names;
    j["marker_start_index"] = d.marker_start_index;
    j["marker_end_index"] = d.marker_end_index;
    j["grid"] = unit ? "unit" : "raw";
    j["trials"] = json::array();

    for (const Trial& t : d.trials) {
        json jt;
        jt["id"] = t.id;
        jt["label"] = t.label;
        if (!unit && !t.signals.empty()) {
            jt["t0"] = t.signals.front().grid.t0;
            jt["dt"] = t.signals.front().grid.dt;
        }
        std::vector<std::string> files;
        for (std::size_t v = 0; v < t.signals.size(); ++v) {
            const std::string file =
                "signals/" + t.id + "_v" + std::to_string(v + 1) + ".csv";
            write_signal_csv(dir / file, t.signals[v].values);
            files.push_back(file);
        }
        jt["signals"] = files;
        j["trials"].push_back(std::move(jt));
    }

    const fs::path manifest = dir / "manifest.json";
    write_file_atomic(manifest, j.dump(2) + "\n");
    return manifest;
}

}  // namespace wavecart
