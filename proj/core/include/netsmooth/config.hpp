#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netsmooth/train.hpp"

namespace netsmooth {

// Sections of the experiment file. Parsing accepts a small TOML-style
// dialect: [section] headers, key = value lines, # comments, with strings,
// numbers, booleans, and flat arrays as values.

struct GraphConfig {
    std::string kind = "geometric"; // geometric | knn | file
    int K = 50;
    double radius = 0.3;
    int k_neighbors = 6;
    std::uint64_t seed = 1;
    std::string file;        // graph JSON, kind = file
    std::string matrix_file; // optional user-supplied combination matrix CSV
};

struct DataConfig {
    std::string kind = "synthetic"; // synthetic | file
    int N = 200;
    int M_max = 5;
    std::string pattern = "uniform"; // uniform | clustered
    std::vector<int> cluster_classes; // per-agent +-1, clustered only
    std::string cluster_rule;         // alternative: "x-split"
    std::vector<double> attr_means;   // empty = library defaults
    std::vector<double> attr_stddevs;
    double class_separation = 1.0;
    std::string dims = "random"; // random | fixed
    double train_fraction = 0.7;
    std::uint64_t seed = 2;
    std::uint64_t split_seed = 3;
    std::string manifest; // dataset manifest, kind = file
};

struct TrainConfig {
    std::string algorithm = "global"; // global | local | noncoop
    double mu = 5e-3;
    double rho = 0.0;
    double eta = 0.1;
    int passes = 5;
    std::string grad_mode = "full"; // full | own-term
    bool paper_literal_alg1 = false;
    std::uint64_t seed = 4;
    int eval_every = 10;
};

struct AnalysisConfig {
    double reference_tol = 1e-10;
    long max_iters = 200000;
    int seeds = 20;       // replicated runs for the deviation curve
    long iterations = 0;  // 0 = passes * |train| from the train section
};

struct ExperimentConfig {
    GraphConfig graph;
    DataConfig data;
    TrainConfig train;
    AnalysisConfig analysis;
    std::string out_dir = "out";

    HyperParams hyperparams() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed; // replaces train.seed
    std::optional<std::string> grad_mode;
    bool paper_literal_alg1 = false;
};

void apply_overrides(ExperimentConfig& cfg, const CliOverrides& ov);

} // namespace netsmooth
