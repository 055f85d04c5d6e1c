#pragma once

#include <Eigen/Dense>
#include <vector>

#include "netsmooth/data.hpp"
#include "netsmooth/graph.hpp"

namespace netsmooth {

// Strong-convexity modulus and gradient-Lipschitz constant of the
// logistic-plus-l2 cost. nu = 2*eta is the standard lower bound.
struct ModelConstants {
    double nu = 0.0;
    double delta = 0.0;
};

// Same-class slice of each neighbourhood, with the combination weights a_lk
// aligned to the member lists. An agent is always a member of its own set,
// and membership is fixed for the lifetime of a run.
struct ClusterMap {
    std::vector<std::vector<int>> members;     // sorted, k in members[k]
    std::vector<std::vector<double>> weights;  // a_{lk} for l = members[k][j]
    std::vector<double> self_weight;           // a_{kk}

    int size(int k) const { return static_cast<int>(members[k].size()); }
};

double predict_linear(const Eigen::VectorXd& w, const Eigen::VectorXd& h);

// Weighted same-class neighbourhood average of raw linear predictions:
// (1/|C_k|) * sum_{l in C_k} a_lk * raw[l].
double combine_neighborhood(const Eigen::VectorXd& raw_predictions,
                            const ClusterMap& cm, int k);

// Neighbourhood-average prediction for agent k at one sample, computed from
// per-agent weights and the per-agent feature vectors of that sample.
double predict_neighborhood(const std::vector<Eigen::VectorXd>& states,
                            const std::vector<Eigen::VectorXd>& features_at_n,
                            const ClusterMap& cm, int k);

// ln(1 + exp(-gamma*gamma_hat)), overflow-safe for large margins.
double logistic_loss(int gamma, double gamma_hat);

// d/dgamma_hat of logistic_loss: -gamma / (1 + exp(gamma*gamma_hat)).
double loss_grad_scalar(int gamma, double gamma_hat);

// Gradient of eta*||w||^2.
Eigen::VectorXd regularizer_grad(const Eigen::VectorXd& w, double eta);

// nu = 2*eta, delta = 2*eta + max_{k,n} ||h_{k,n}||^2 / 4. Requires eta > 0;
// the convergence diagnostics are meaningless without strong convexity.
ModelConstants compute_constants(const NetworkDataset& ds, double eta);

ClusterMap build_cluster_map(const Graph& g, const CombinationMatrix& A,
                             const std::vector<int>& class_of);

} // namespace netsmooth
