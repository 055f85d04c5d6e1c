#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netsmooth/graph.hpp"

namespace netsmooth {

// One agent's observations: row n of `features` is the feature vector of
// network-wide sample n. Feature widths differ across agents.
struct AgentDataset {
    Eigen::MatrixXd features; // N x M_k
    Eigen::VectorXi labels;   // entries in {+1, -1}
    int dim() const { return static_cast<int>(features.cols()); }
};

enum class LabelPattern { Uniform, Clustered, External };

struct NetworkDataset {
    std::vector<AgentDataset> agents;
    int N = 0;
    LabelPattern pattern = LabelPattern::Uniform;
    // Static per-agent class; all +1 for uniform and external data unless
    // a clustering is supplied.
    std::vector<int> agent_classes;

    int K() const { return static_cast<int>(agents.size()); }
};

// Shared across agents: sample n is the same network-wide event everywhere.
struct SplitIndices {
    std::vector<int> train;
    std::vector<int> test;
};

// Class-conditional Gaussian attributes: attribute m of a sample with label y
// is drawn from Normal(y * class_separation * attr_means[m], attr_stddevs[m]^2).
struct FeatureSpec {
    Eigen::VectorXd attr_means;
    Eigen::VectorXd attr_stddevs;
    double class_separation = 1.0;

    int max_dim() const { return static_cast<int>(attr_means.size()); }

    // means (0.4, 0.8, 1.2, 1.6, 2.0) scaled to unit norm, unit variances
    static FeatureSpec defaults();
};

struct LabelAssignment {
    LabelPattern pattern = LabelPattern::Uniform;
    std::vector<int> classes; // per-agent +-1, required for Clustered

    static LabelAssignment uniform() { return {}; }
    static LabelAssignment clustered(std::vector<int> classes);
};

enum class DimMode {
    UniformRandom, // M_k ~ U{1..M_max}, agent uses the first M_k attributes
    Fixed          // M_k = M_max for every agent
};

NetworkDataset generate_synthetic(const Graph& g, const FeatureSpec& spec,
                                  const LabelAssignment& labels, int N,
                                  std::uint64_t seed,
                                  DimMode dims = DimMode::UniformRandom);

// Random permutation of {0..N-1}; the first floor(fraction*N) indices train.
// Index lists are returned sorted.
SplitIndices train_test_split(int N, double train_fraction, std::uint64_t seed);

struct LoadedNetwork {
    NetworkDataset ds;
    std::optional<std::vector<Eigen::Vector2d>> station_coords;
};

// Manifest JSON {"N":int, "label_mapping":{...}?, "agents":[{"id","file"}...],
// "stations": "path"?}; per-agent CSVs with header n,label,f1,...,fM.
LoadedNetwork load_network_csv(const std::string& manifest_path);

// Inverse of load_network_csv; writes manifest.json, agent_<k>.csv and,
// when coords are given, stations.csv under `dir`. Returns the manifest path.
std::string export_network_csv(const NetworkDataset& ds,
                               const std::optional<std::vector<Eigen::Vector2d>>& coords,
                               const std::string& dir);

} // namespace netsmooth
