#include "netsmooth/model.hpp"

#include <algorithm>
#include <cmath>

#include "netsmooth/errors.hpp"

namespace netsmooth {

double predict_linear(const Eigen::VectorXd& w, const Eigen::VectorXd& h) {
    if (w.size() != h.size())
        throw ConfigError("predict_linear: dimension mismatch (" +
                          std::to_string(w.size()) + " vs " + std::to_string(h.size()) + ")");
    return w.dot(h);
}

double combine_neighborhood(const Eigen::VectorXd& raw_predictions, const ClusterMap& cm,
                            int k) {
    const auto& members = cm.members[k];
    const auto& weights = cm.weights[k];
    double sum = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j)
        sum += weights[j] * raw_predictions(members[j]);
    return sum / static_cast<double>(members.size());
}

double predict_neighborhood(const std::vector<Eigen::VectorXd>& states,
                            const std::vector<Eigen::VectorXd>& features_at_n,
                            const ClusterMap& cm, int k) {
    const auto& members = cm.members[k];
    const auto& weights = cm.weights[k];
    double sum = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j) {
        const int l = members[j];
        sum += weights[j] * predict_linear(states[l], features_at_n[l]);
    }
    return sum / static_cast<double>(members.size());
}

double logistic_loss(int gamma, double gamma_hat) {
    const double z = -static_cast<double>(gamma) * gamma_hat;
    if (z > 30.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double loss_grad_scalar(int gamma, double gamma_hat) {
    const double g = static_cast<double>(gamma);
    return -g / (1.0 + std::exp(g * gamma_hat));
}

Eigen::VectorXd regularizer_grad(const Eigen::VectorXd& w, double eta) {
    return 2.0 * eta * w;
}

ModelConstants compute_constants(const NetworkDataset& ds, double eta) {
    if (!(eta > 0.0))
        throw ConfigError("compute_constants: eta must be positive; the cost is not "
                          "strongly convex otherwise");
    double max_h2 = 0.0;
    for (const auto& agent : ds.agents)
        for (Eigen::Index n = 0; n < agent.features.rows(); ++n)
            max_h2 = std::max(max_h2, agent.features.row(n).squaredNorm());
    ModelConstants c;
    c.nu = 2.0 * eta;
    c.delta = 2.0 * eta + max_h2 / 4.0; // logistic curvature is at most 1/4
    return c;
}

ClusterMap build_cluster_map(const Graph& g, const CombinationMatrix& A,
                             const std::vector<int>& class_of) {
    if (static_cast<int>(class_of.size()) != g.K)
        throw ConfigError("build_cluster_map: class assignment size does not match K");
    ClusterMap cm;
    cm.members.resize(g.K);
    cm.weights.resize(g.K);
    cm.self_weight.resize(g.K);
    for (int k = 0; k < g.K; ++k) {
        for (int l : g.neighbors[k]) {
            if (class_of[l] != class_of[k]) continue;
            cm.members[k].push_back(l);
            cm.weights[k].push_back(A.A(l, k));
        }
        cm.self_weight[k] = A.A(k, k);
    }
    return cm;
}

} // namespace netsmooth
