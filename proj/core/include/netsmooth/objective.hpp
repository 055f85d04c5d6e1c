#pragma once

#include <Eigen/Dense>
#include <vector>

#include "netsmooth/data.hpp"
#include "netsmooth/graph.hpp"
#include "netsmooth/model.hpp"
#include "netsmooth/train.hpp"

namespace netsmooth {

// Full-batch value and gradient of the smoothed aggregate cost
//   (1/|idx|) sum_n [ sum_k ( Q(y_k(n), h_k'w_k) + eta ||w_k||^2 )
//                     + (rho/2) yhat_n' L yhat_n ].
double cost_global(const NetworkDataset& ds, const std::vector<int>& indices,
                   const Laplacian& lap, double eta, double rho,
                   const Eigen::VectorXd& stacked, const StackLayout& layout);

Eigen::VectorXd grad_global(const NetworkDataset& ds, const std::vector<int>& indices,
                            const Laplacian& lap, double eta, double rho,
                            const Eigen::VectorXd& stacked, const StackLayout& layout);

// Full-batch value and gradient of the aggregate cost under neighbourhood-
// average predictions (no Laplacian term).
double cost_local(const NetworkDataset& ds, const std::vector<int>& indices,
                  const ClusterMap& cm, double eta,
                  const Eigen::VectorXd& stacked, const StackLayout& layout);

Eigen::VectorXd grad_local(const NetworkDataset& ds, const std::vector<int>& indices,
                           const ClusterMap& cm, double eta,
                           const Eigen::VectorXd& stacked, const StackLayout& layout);

// Stacked loss-only gradient col{(1/|idx|) sum_n Q'(...) h_{k,n}} at the
// given point, under linear predictions.
Eigen::VectorXd loss_gradient_global(const NetworkDataset& ds,
                                     const std::vector<int>& indices,
                                     const Eigen::VectorXd& stacked,
                                     const StackLayout& layout);

} // namespace netsmooth
