#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "test_util.hpp"
#include "wavecart/core_types.hpp"
#include "wavecart/dataset_io.hpp"
#include "wavecart/synth.hpp"

using namespace wavecart;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("wavecart_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("validate_dataset: well-formed synthetic dataset has no violations") {
    const SynthResult synth = generate(PlantSpec{}, 7);
    CHECK(validate_dataset(synth.dataset).empty());
}

TEST_CASE("validate_dataset: missing signal and bad label are reported") {
    SynthResult synth = generate(PlantSpec{}, 7);
    Dataset d = synth.dataset;

    d.trials[3].signals.pop_back();
    auto violations = validate_dataset(d);
    REQUIRE(!violations.empty());
    bool names_trial = false;
    for (const auto& v : violations) names_trial |= v.find(d.trials[3].id) != std::string::npos;
    CHECK(names_trial);

    d = synth.dataset;
    d.trials[0].label = 0;
    violations = validate_dataset(d);
    REQUIRE(!violations.empty());
    CHECK(violations.front().find("label out of range") != std::string::npos);
}

TEST_CASE("validate_dataset: marker indices checked") {
    Dataset d = generate(PlantSpec{}, 3).dataset;
    d.marker_end_index = d.marker_start_index;
    CHECK(!validate_dataset(d).empty());
    d.marker_end_index = 99;
    CHECK(!validate_dataset(d).empty());
}

TEST_CASE("validate_dataset: non-finite values rejected") {
    Dataset d = generate(PlantSpec{}, 3).dataset;
    d.trials[0].signals[0].values[5] = std::numeric_limits<double>::quiet_NaN();
    bool found = false;
    for (const auto& v : validate_dataset(d))
        found |= v.find("non-finite") != std::string::npos;
    CHECK(found);
}

TEST_CASE("PipelineConfig validation") {
    PipelineConfig cfg;
    CHECK(cfg.validate().empty());
    cfg.importance_keep_fraction = 1.5;
    CHECK(!cfg.validate().empty());
    cfg = PipelineConfig{};
    cfg.elbow_threshold = 1.0;
    CHECK(!cfg.validate().empty());
    cfg = PipelineConfig{};
    cfg.cv_folds = 0;
    CHECK(!cfg.validate().empty());
}

TEST_CASE("raw grid lengths of the default benchmark stay in [600, 5000]") {
    const SynthResult synth = generate(PlantSpec{}, 11);
    for (const Trial& t : synth.dataset.trials)
        for (const Signal& s : t.signals) {
            CHECK(s.size() >= 600);
            CHECK(s.size() <= 5000);
        }
}

TEST_CASE("dataset manifest round trip is bit-exact") {
    PlantSpec spec;
    spec.n = 12;
    const SynthResult synth = generate(spec, 21);
    const fs::path dir = temp_dir("roundtrip");

    const fs::path manifest = save_dataset(synth.dataset, dir);
    const Dataset loaded = load_dataset(manifest);

    REQUIRE(loaded.trial_count() == synth.dataset.trial_count());
    CHECK(loaded.class_count == synth.dataset.class_count);
    CHECK(loaded.variable_names == synth.dataset.variable_names);
    CHECK(loaded.marker_start_index == synth.dataset.marker_start_index);
    CHECK(loaded.marker_end_index == synth.dataset.marker_end_index);
    for (std::size_t i = 0; i < loaded.trial_count(); ++i) {
        const Trial& a = synth.dataset.trials[i];
        const Trial& b = loaded.trials[i];
        CHECK(a.id == b.id);
        CHECK(a.label == b.label);
        REQUIRE(a.signals.size() == b.signals.size());
        for (std::size_t j = 0; j < a.signals.size(); ++j) {
            CHECK(a.signals[j].grid.dt == b.signals[j].grid.dt);
            REQUIRE(a.signals[j].values.size() == b.signals[j].values.size());
            for (std::size_t t = 0; t < a.signals[j].values.size(); ++t)
                CHECK(a.signals[j].values[t] == b.signals[j].values[t]);
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("signal csv reader tolerates CRLF and rejects non-finite") {
    const fs::path dir = temp_dir("csv");
    {
        std::ofstream out(dir / "crlf.csv", std::ios::binary);
        out << "1.5\r\n-2.25\r\n3\r\n";
    }
    const auto values = read_signal_csv(dir / "crlf.csv");
    REQUIRE(values.size() == 3);
    CHECK(values[1] == -2.25);

    {
        std::ofstream out(dir / "bad.csv");
        out << "1.0\ninf\n";
    }
    CHECK_THROWS_AS(read_signal_csv(dir / "bad.csv"), DataError);
    {
        std::ofstream out(dir / "junk.csv");
        out << "1.0\nhello\n";
    }
    CHECK_THROWS_AS(read_signal_csv(dir / "junk.csv"), DataError);
    fs::remove_all(dir);
}

TEST_CASE("write_file_atomic leaves no temporary and stores content") {
    const fs::path dir = temp_dir("atomic");
    write_file_atomic(dir / "a.txt", "hello\n");
    write_file_atomic(dir / "a.txt", "world\n");  // overwrite
    std::ifstream in(dir / "a.txt");
    std::string content((std::istreambuf_iterator<char>(in)), {});
    CHECK(content == "world\n");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    CHECK(files == 1);
    fs::remove_all(dir);
}

TEST_CASE("missing manifest raises DataError naming the path") {
    try {
        load_dataset("/nonexistent/manifest.json");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("manifest.json") != std::string::npos);
    }
}
