#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netsmooth/data.hpp"
#include "netsmooth/graph.hpp"
#include "netsmooth/model.hpp"
#include "netsmooth/rng.hpp"

namespace netsmooth {

enum class GradMode { OwnTerm, Full };
enum class EvalRule { Linear, Neighborhood };

struct HyperParams {
    double mu = 5e-3;
    double rho = 0.0;
    double eta = 0.0;
    int passes = 1;
    std::uint64_t seed = 0;
    GradMode grad_mode = GradMode::Full;
    bool paper_literal_alg1 = false; // legacy update form: g' = g - mu*rho*sum(...)
    int eval_every = 10;
};

struct NetworkState {
    std::vector<Eigen::VectorXd> w;
    long iteration = 0;
};

// Offsets of each agent's block inside the stacked weight vector.
struct StackLayout {
    std::vector<int> offsets;
    int total = 0;

    static StackLayout from(const NetworkDataset& ds);
    int dim(int k) const { return offsets[k + 1] - offsets[k]; }
};

Eigen::VectorXd stack_state(const NetworkState& state, const StackLayout& layout);
NetworkState unstack_state(const Eigen::VectorXd& stacked, const StackLayout& layout);

// Per-agent feature vectors of one sample, acting as the block-diagonal
// operator that maps stacked weights to the K raw predictions and back.
struct FeatureBlock {
    std::vector<Eigen::VectorXd> h;

    static FeatureBlock at(const NetworkDataset& ds, int n);

    // raw predictions col{h_k' w_k}
    Eigen::VectorXd predictions(const Eigen::VectorXd& stacked,
                                const StackLayout& layout) const;
    // stacked col{h_k * y_k}
    Eigen::VectorXd embed(const Eigen::VectorXd& y, const StackLayout& layout) const;
    // coupling operator action: embed(L * predictions(W))
    Eigen::VectorXd coupling_apply(const Eigen::VectorXd& stacked, const Laplacian& lap,
                                   const StackLayout& layout) const;
    // dense coupling operator, used by the gradient-noise diagnostics
    Eigen::MatrixXd coupling_dense(const Laplacian& lap, const StackLayout& layout) const;
};

struct EvalPoint {
    long iter = 0;
    double avg_train_loss = 0.0;
    double avg_test_err = 0.0;
};

struct RunRecord {
    std::vector<int> sampled;     // index drawn at iterations 1..T
    std::vector<EvalPoint> evals; // cadence points plus the final iteration
    std::vector<double> msd;      // ||W* - W_i||^2 for i = 0..T when a reference was given
    long iterations = 0;
    HyperParams hp;

    std::string to_csv() const;
};

struct EvalResult {
    Eigen::VectorXd per_agent; // error rate per agent
    double average = 0.0;
};

// Uniform sampler over a fixed index pool; owns its generator so trainers
// draw exactly one index per iteration.
class IndexSampler {
public:
    IndexSampler(std::vector<int> pool, std::uint64_t seed)
        : pool_(std::move(pool)), rng_(seed) {}
    int next() { return pool_[rng_.bounded(pool_.size())]; }
    std::size_t pool_size() const { return pool_.size(); }

private:
    std::vector<int> pool_;
    Rng rng_;
};

// Global output smoothing: stochastic gradient on the aggregate cost plus the
// Laplacian penalty on the prediction vector. One shared sample index per
// iteration; all agents read the frozen previous state.
std::pair<NetworkState, RunRecord> train_global_smoothing(
    const NetworkDataset& ds, const SplitIndices& split, const Graph& g,
    const CombinationMatrix& A, const Laplacian& lap, const HyperParams& hp,
    const ClusterMap& cm, EvalRule eval_rule = EvalRule::Neighborhood,
    const Eigen::VectorXd* msd_reference = nullptr);

// Local smoothing: agents predict through the same-class neighbourhood
// average during training and testing. GradMode::Full differentiates the
// cost exactly (cross-agent terms included); GradMode::OwnTerm keeps only
// each agent's own chain-rule term.
std::pair<NetworkState, RunRecord> train_local_smoothing(
    const NetworkDataset& ds, const SplitIndices& split, const Graph& g,
    const CombinationMatrix& A, const HyperParams& hp, const ClusterMap& cm,
    EvalRule eval_rule = EvalRule::Neighborhood,
    const Eigen::VectorXd* msd_reference = nullptr);

// Independent per-agent SGD; the rho = 0 / singleton-cluster reference the
// cooperative trainers must reduce to bit-for-bit.
std::pair<NetworkState, RunRecord> train_noncooperative(
    const NetworkDataset& ds, const SplitIndices& split, const HyperParams& hp,
    const ClusterMap* cm_for_eval = nullptr, EvalRule eval_rule = EvalRule::Linear,
    const Eigen::VectorXd* msd_reference = nullptr);

// One step of the stacked affine recursion
//   W_i = (I - mu*rho*B_i) W_{i-1} - mu * grad_hat,   B_i = coupling operator.
// Exists as the independent oracle the per-agent loop is checked against.
Eigen::VectorXd block_recursion_step(const Eigen::VectorXd& stacked,
                                     const FeatureBlock& fb, const Laplacian& lap,
                                     const Eigen::VectorXd& grad_hat,
                                     double mu, double rho, const StackLayout& layout);

// Misclassification rates over the given sample indices. sign(0) counts as +1.
EvalResult evaluate(const NetworkState& state, const NetworkDataset& ds,
                    const std::vector<int>& indices, const ClusterMap* cm,
                    EvalRule rule);

// Mean logistic loss over the given indices under the rule's prediction.
double mean_loss(const NetworkState& state, const NetworkDataset& ds,
                 const std::vector<int>& indices, const ClusterMap* cm, EvalRule rule);

std::string state_to_json(const NetworkState& state);
NetworkState state_from_json(const std::string& text);
void save_state(const NetworkState& state, const std::string& path);
NetworkState load_state(const std::string& path);

} // namespace netsmooth
