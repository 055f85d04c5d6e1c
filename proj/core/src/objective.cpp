#include "netsmooth/objective.hpp"

#include "netsmooth/errors.hpp"

namespace netsmooth {

namespace {

void check_dims(const Eigen::VectorXd& stacked, const StackLayout& layout,
                const char* what) {
    if (stacked.size() != layout.total)
        throw ConfigError(std::string(what) + ": stacked dimension mismatch");
}

} // namespace

double cost_global(const NetworkDataset& ds, const std::vector<int>& indices,
                   const Laplacian& lap, double eta, double rho,
                   const Eigen::VectorXd& stacked, const StackLayout& layout) {
    check_dims(stacked, layout, "cost_global");
    if (indices.empty()) throw ConfigError("cost_global: empty index set");
    const int K = ds.K();
    double reg = 0.0;
    for (int k = 0; k < K; ++k)
        reg += eta * stacked.segment(layout.offsets[k], layout.dim(k)).squaredNorm();

    Eigen::VectorXd yhat(K);
    double total = 0.0;
    for (int n : indices) {
        for (int k = 0; k < K; ++k)
            yhat(k) = ds.agents[k].features.row(n).dot(
                stacked.segment(layout.offsets[k], layout.dim(k)));
        double per_sample = reg;
        for (int k = 0; k < K; ++k)
            per_sample += logistic_loss(ds.agents[k].labels(n), yhat(k));
        if (rho != 0.0) per_sample += 0.5 * rho * yhat.dot(lap.L * yhat);
        total += per_sample;
    }
    return total / static_cast<double>(indices.size());
}

Eigen::VectorXd grad_global(const NetworkDataset& ds, const std::vector<int>& indices,
                            const Laplacian& lap, double eta, double rho,
                            const Eigen::VectorXd& stacked, const StackLayout& layout) {
    check_dims(stacked, layout, "grad_global");
    if (indices.empty()) throw ConfigError("grad_global: empty index set");
    const int K = ds.K();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.total);
    Eigen::VectorXd yhat(K);
    for (int n : indices) {
        for (int k = 0; k < K; ++k)
            yhat(k) = ds.agents[k].features.row(n).dot(
                stacked.segment(layout.offsets[k], layout.dim(k)));
        Eigen::VectorXd coupling;
        if (rho != 0.0) coupling = lap.L * yhat;
        for (int k = 0; k < K; ++k) {
            double coef = loss_grad_scalar(ds.agents[k].labels(n), yhat(k));
            if (rho != 0.0) coef += rho * coupling(k);
            grad.segment(layout.offsets[k], layout.dim(k)) +=
                coef * ds.agents[k].features.row(n).transpose();
        }
    }
    grad /= static_cast<double>(indices.size());
    grad += 2.0 * eta * stacked;
    return grad;
}

double cost_local(const NetworkDataset& ds, const std::vector<int>& indices,
                  const ClusterMap& cm, double eta, const Eigen::VectorXd& stacked,
                  const StackLayout& layout) {
    check_dims(stacked, layout, "cost_local");
    if (indices.empty()) throw ConfigError("cost_local: empty index set");
    const int K = ds.K();
    double reg = 0.0;
    for (int k = 0; k < K; ++k)
        reg += eta * stacked.segment(layout.offsets[k], layout.dim(k)).squaredNorm();

    Eigen::VectorXd raw(K);
    double total = 0.0;
    for (int n : indices) {
        for (int k = 0; k < K; ++k)
            raw(k) = ds.agents[k].features.row(n).dot(
                stacked.segment(layout.offsets[k], layout.dim(k)));
        double per_sample = reg;
        for (int k = 0; k < K; ++k)
            per_sample += logistic_loss(ds.agents[k].labels(n),
                                        combine_neighborhood(raw, cm, k));
        total += per_sample;
    }
    return total / static_cast<double>(indices.size());
}

Eigen::VectorXd grad_local(const NetworkDataset& ds, const std::vector<int>& indices,
                           const ClusterMap& cm, double eta,
                           const Eigen::VectorXd& stacked, const StackLayout& layout) {
    check_dims(stacked, layout, "grad_local");
    if (indices.empty()) throw ConfigError("grad_local: empty index set");
    const int K = ds.K();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.total);
    Eigen::VectorXd raw(K), gs(K);
    for (int n : indices) {
        for (int k = 0; k < K; ++k)
            raw(k) = ds.agents[k].features.row(n).dot(
                stacked.segment(layout.offsets[k], layout.dim(k)));
        for (int k = 0; k < K; ++k)
            gs(k) = loss_grad_scalar(ds.agents[k].labels(n),
                                     combine_neighborhood(raw, cm, k));
        for (int k = 0; k < K; ++k) {
            const auto& members = cm.members[k];
            const auto& weights = cm.weights[k];
            double coef = 0.0;
            for (std::size_t j = 0; j < members.size(); ++j) {
                const int l = members[j];
                // a_{kl} = a_{lk}; the map stores a_{lk} for the members of C_k
                coef += gs(l) * (weights[j] / static_cast<double>(cm.size(l)));
            }
            grad.segment(layout.offsets[k], layout.dim(k)) +=
                coef * ds.agents[k].features.row(n).transpose();
        }
    }
    grad /= static_cast<double>(indices.size());
    grad += 2.0 * eta * stacked;
    return grad;
}

Eigen::VectorXd loss_gradient_global(const NetworkDataset& ds,
                                     const std::vector<int>& indices,
                                     const Eigen::VectorXd& stacked,
                                     const StackLayout& layout) {
    check_dims(stacked, layout, "loss_gradient_global");
    if (indices.empty()) throw ConfigError("loss_gradient_global: empty index set");
    const int K = ds.K();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.total);
    for (int n : indices) {
        for (int k = 0; k < K; ++k) {
            const auto w = stacked.segment(layout.offsets[k], layout.dim(k));
            const double coef =
                loss_grad_scalar(ds.agents[k].labels(n),
                                 ds.agents[k].features.row(n).dot(w));
            grad.segment(layout.offsets[k], layout.dim(k)) +=
                coef * ds.agents[k].features.row(n).transpose();
        }
    }
    return grad / static_cast<double>(indices.size());
}

} // namespace netsmooth
