#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netsmooth/analysis.hpp"
#include "netsmooth/config.hpp"
#include "netsmooth/data.hpp"
#include "netsmooth/graph.hpp"
#include "netsmooth/train.hpp"

namespace netsmooth {

// Assembled inputs of one run: topology, weights, data, split, clusters.
struct Workspace {
    Graph g;
    CombinationMatrix A;
    Laplacian lap;
    NetworkDataset ds;
    SplitIndices split;
    ClusterMap cm;
};

// Builds the graph per config; disconnected geometric draws are resampled
// with seed+1, bounded at 100 attempts.
Graph build_graph(const GraphConfig& cfg);

Workspace build_workspace(const ExperimentConfig& cfg);

// Subcommand bodies. Each writes its artifacts under cfg.out_dir and returns
// a short human-readable summary that the CLI prints.
std::string run_gen_graph(const ExperimentConfig& cfg);
std::string run_gen_data(const ExperimentConfig& cfg);
std::string run_train(const ExperimentConfig& cfg);
std::string run_eval(const ExperimentConfig& cfg, const std::string& state_path,
                     const std::string& rule);
std::string run_diagnose(const ExperimentConfig& cfg);

// Canned experiment reproductions. `name` is one of exp1-uniform,
// exp2-clustered, weather-shape. The recipes are fixed; command-line
// overrides (output directory, run seed, gradient mode) still apply.
std::string run_reproduce(const std::string& name, const CliOverrides& overrides);
std::vector<std::string> reproduce_names();

// Aggregated outcome of a multi-seed comparison, consumed by the acceptance
// suite as well as the reproduce reports.
struct ComparisonResult {
    std::vector<double> rho_sweep;
    std::vector<double> global_errors; // final mean test error per rho
    double best_global_error = 0.0;
    double best_rho = 0.0;
    double local_error = 0.0;
    double noncoop_error_linear = 0.0;
    double noncoop_error_neighborhood = 0.0;
    int seeds = 0;
    long iterations_per_pass = 0;
    // per-algorithm mean test-error curves at the evaluation cadence
    std::vector<long> curve_iters;
    std::vector<std::vector<double>> global_curves;
    std::vector<double> local_curve;
    std::vector<double> noncoop_curve;
};

// Runs the three trainers (global across the rho sweep, local, independent)
// over `seeds` paired replicates of the experiment described by cfg.
ComparisonResult run_comparison(const ExperimentConfig& cfg,
                                const std::vector<double>& rho_sweep, int seeds);

} // namespace netsmooth
