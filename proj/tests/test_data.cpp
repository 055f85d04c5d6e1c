#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "netsmooth/data.hpp"
#include "netsmooth/errors.hpp"
#include "netsmooth/graph.hpp"
#include "test_helpers.hpp"

using namespace netsmooth;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "netsmooth_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_CASE("default feature spec is unit-norm with unit variances") {
    const FeatureSpec spec = FeatureSpec::defaults();
    CHECK(spec.max_dim() == 5);
    CHECK(spec.attr_means.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spec.attr_means(4) / spec.attr_means(0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK((spec.attr_stddevs.array() == 1.0).all());
}

TEST_CASE("uniform pattern shares one label across all agents per sample") {
    const Graph g = random_geometric_graph(12, 0.5, 4);
    const NetworkDataset ds =
        generate_synthetic(g, FeatureSpec::defaults(), LabelAssignment::uniform(), 40, 9);
    CHECK(ds.K() == 12);
    CHECK(ds.N == 40);
    bool saw_minus = false, saw_plus = false;
    for (int n = 0; n < ds.N; ++n) {
        for (int k = 0; k < ds.K(); ++k)
            CHECK(ds.agents[k].labels(n) == ds.agents[0].labels(n));
        (ds.agents[0].labels(n) == 1 ? saw_plus : saw_minus) = true;
    }
    CHECK(saw_plus);
    CHECK(saw_minus);
    for (int k = 0; k < ds.K(); ++k) {
        CHECK(ds.agents[k].dim() >= 1);
        CHECK(ds.agents[k].dim() <= 5);
        CHECK(ds.agents[k].features.rows() == 40);
    }
}

TEST_CASE("clustered pattern flips the shared coin per class") {
    const Graph g = random_geometric_graph(8, 0.6, 2);
    std::vector<int> classes{1, -1, 1, -1, 1, -1, 1, -1};
    const NetworkDataset ds = generate_synthetic(
        g, FeatureSpec::defaults(), LabelAssignment::clustered(classes), 30, 5);
    for (int n = 0; n < ds.N; ++n)
        for (int k = 0; k < ds.K(); ++k)
            CHECK(ds.agents[k].labels(n) ==
                  classes[k] * ds.agents[0].labels(n) * classes[0]);
    CHECK(ds.pattern == LabelPattern::Clustered);
    CHECK(ds.agent_classes == classes);
}

TEST_CASE("clustered pattern requires a class per agent") {
    const Graph g = random_geometric_graph(4, 0.6, 2);
    CHECK_THROWS_AS(generate_synthetic(g, FeatureSpec::defaults(),
                                       LabelAssignment::clustered({1, -1}), 10, 5),
                    ConfigError);
    CHECK_THROWS_AS(generate_synthetic(g, FeatureSpec::defaults(),
                                       LabelAssignment::clustered({1, -1, 0, 1}), 10, 5),
                    ConfigError);
}

TEST_CASE("fixed dimension mode gives every agent the full width") {
    const Graph g = random_geometric_graph(6, 0.6, 3);
    const NetworkDataset ds = generate_synthetic(
        g, FeatureSpec::defaults(), LabelAssignment::uniform(), 15, 5, DimMode::Fixed);
    for (int k = 0; k < ds.K(); ++k) CHECK(ds.agents[k].dim() == 5);
}

TEST_CASE("generation is deterministic given the seed") {
    const Graph g = random_geometric_graph(10, 0.5, 6);
    const auto a =
        generate_synthetic(g, FeatureSpec::defaults(), LabelAssignment::uniform(), 25, 77);
    const auto b =
        generate_synthetic(g, FeatureSpec::defaults(), LabelAssignment::uniform(), 25, 77);
    const auto c =
        generate_synthetic(g, FeatureSpec::defaults(), LabelAssignment::uniform(), 25, 78);
    for (int k = 0; k < 10; ++k) {
        CHECK(a.agents[k].features == b.agents[k].features);
        CHECK(a.agents[k].labels == b.agents[k].labels);
    }
    bool all_equal = true;
    for (int k = 0; k < 10; ++k)
        all_equal = all_equal && a.agents[k].dim() == c.agents[k].dim() &&
                    (a.agents[k].dim() != c.agents[k].dim() ||
                     a.agents[k].features == c.agents[k].features);
    CHECK_FALSE(all_equal);
}

TEST_CASE("train test split partitions the index range") {
    const SplitIndices split = train_test_split(200, 0.7, 3);
    CHECK(split.train.size() == 140);
    CHECK(split.test.size() == 60);
    std::set<int> all(split.train.begin(), split.train.end());
    all.insert(split.test.begin(), split.test.end());
    CHECK(all.size() == 200);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == 199);

    const SplitIndices again = train_test_split(200, 0.7, 3);
    CHECK(again.train == split.train);
    CHECK(again.test == split.test);
    const SplitIndices other = train_test_split(200, 0.7, 4);
    CHECK(other.train != split.train);
}

TEST_CASE("train test split rejects degenerate fractions") {
    CHECK_THROWS_AS(train_test_split(10, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(train_test_split(10, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(train_test_split(10, 0.05, 1), ConfigError);
}

TEST_CASE("export and load round trip bit exactly") {
    const Graph g = random_geometric_graph(5, 0.6, 11);
    const NetworkDataset ds =
        generate_synthetic(g, FeatureSpec::defaults(), LabelAssignment::uniform(), 17, 13);
    const fs::path dir = temp_dir("roundtrip");
    const std::string manifest = export_network_csv(ds, g.coords, dir.string());
    const LoadedNetwork back = load_network_csv(manifest);
    CHECK(back.ds.N == ds.N);
    CHECK(back.ds.K() == ds.K());
    for (int k = 0; k < ds.K(); ++k) {
        CHECK(back.ds.agents[k].features == ds.agents[k].features);
        CHECK(back.ds.agents[k].labels == ds.agents[k].labels);
    }
    REQUIRE(back.station_coords.has_value());
    for (int k = 0; k < ds.K(); ++k) CHECK((*back.station_coords)[k] == g.coords[k]);
}

TEST_CASE("hand-written two-agent fixture parses to matching shapes") {
    const fs::path dir = temp_dir("fixture2");
    write_file(dir / "a0.csv", "n,label,f1\n0,1,0.5\n1,-1,1.25\n2,1,-0.75\n3,-1,2\n");
    write_file(dir / "a1.csv",
               "n,label,f1,f2,f3\n3,-1,0,0.1,0.2\n2,1,1,1.1,1.2\n1,-1,2,2.1,2.2\n0,1,3,3.1,3.2\n");
    write_file(dir / "manifest.json",
               R"({"N":4,"agents":[{"id":0,"file":"a0.csv"},{"id":1,"file":"a1.csv"}]})");
    const LoadedNetwork net = load_network_csv((dir / "manifest.json").string());
    CHECK(net.ds.N == 4);
    CHECK(net.ds.agents[0].dim() == 1);
    CHECK(net.ds.agents[1].dim() == 3);
    // rows are keyed by the sample index, not file order
    CHECK(net.ds.agents[1].features(0, 0) == 3.0);
    CHECK(net.ds.agents[1].labels(3) == -1);
    CHECK_FALSE(net.station_coords.has_value());
}

TEST_CASE("loader reports file and row for bad cells") {
    const fs::path dir = temp_dir("badcells");
    write_file(dir / "manifest.json",
               R"({"N":2,"agents":[{"id":0,"file":"a0.csv"}]})");

    write_file(dir / "a0.csv", "n,label,f1\n0,1,0.5\n1,-1,abc\n");
    try {
        load_network_csv((dir / "manifest.json").string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("a0.csv") != std::string::npos);
        CHECK(msg.find("row 3") != std::string::npos);
    }

    write_file(dir / "a0.csv", "n,label,f1\n0,1,0.5\n0,-1,0.25\n");
    CHECK_THROWS_AS(load_network_csv((dir / "manifest.json").string()), ConfigError);

    write_file(dir / "a0.csv", "n,label,f1\n0,1,0.5\n");
    CHECK_THROWS_AS(load_network_csv((dir / "manifest.json").string()), ConfigError);

    write_file(dir / "a0.csv", "n,label,f1\n0,3,0.5\n1,-1,0.25\n");
    CHECK_THROWS_AS(load_network_csv((dir / "manifest.json").string()), ConfigError);
}

TEST_CASE("loader applies a declared 0/1 label mapping") {
    const fs::path dir = temp_dir("mapping");
    write_file(dir / "a0.csv", "n,label,f1\n0,0,0.5\n1,1,0.25\n");
    write_file(dir / "manifest.json",
               R"({"N":2,"label_mapping":{"0":-1,"1":1},"agents":[{"id":0,"file":"a0.csv"}]})");
    const LoadedNetwork net = load_network_csv((dir / "manifest.json").string());
    CHECK(net.ds.agents[0].labels(0) == -1);
    CHECK(net.ds.agents[0].labels(1) == 1);

    // labels outside the mapping are rejected
    write_file(dir / "a0.csv", "n,label,f1\n0,0,0.5\n1,2,0.25\n");
    CHECK_THROWS_AS(load_network_csv((dir / "manifest.json").string()), ConfigError);
}

TEST_CASE("loader distinguishes missing files from malformed ones") {
    CHECK_THROWS_AS(load_network_csv("/nonexistent/manifest.json"), MissingDataError);
    const fs::path dir = temp_dir("missing_agent");
    write_file(dir / "manifest.json",
               R"({"N":2,"agents":[{"id":0,"file":"gone.csv"}]})");
    CHECK_THROWS_AS(load_network_csv((dir / "manifest.json").string()), MissingDataError);
}
