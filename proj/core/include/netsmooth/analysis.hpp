#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "netsmooth/data.hpp"
#include "netsmooth/graph.hpp"
#include "netsmooth/model.hpp"
#include "netsmooth/objective.hpp"
#include "netsmooth/train.hpp"

namespace netsmooth {

// Full-batch minimizer of the smoothed cost (rho = 0 gives the plain
// aggregate cost), found by gradient descent with a backtracking line search.
struct ReferenceSolution {
    Eigen::VectorXd w_star;
    double achieved_grad_norm = 0.0;
    double rho = 0.0;
};

// Empirical single-draw gradient-noise moments at an evaluation point, plus
// the bound constants assembled from them.
struct NoiseStats {
    double empirical_mean_norm = 0.0;    // || (1/N) sum_n s_n ||, zero by construction
    double empirical_second_moment = 0.0;// (1/N) sum_n ||s_n||^2
    double beta_s_sq = 0.0;              // 8*delta^2 + 4*rho^2 * B_spread
    double sigma_s_sq = 0.0;             // 4 * E ||q* - rho * B_n W||^2
    double b_spread = 0.0;               // E ||B_n - B_bar||_F^2
    Eigen::MatrixXd b_bar;               // mean coupling operator
};

struct RateReport {
    double lambda = 0.0;             // 1 - 2*nu*mu + mu^2*(delta^2 + beta_s^2)
    double mu_bound = 0.0;           // 2*nu / (delta^2 + beta_s^2)
    double steady_state_bound = 0.0; // mu^2*sigma_s^2 / (1 - lambda)
    double mu = 0.0;
    double sigma_s_sq = 0.0;
};

struct MsdCurve {
    std::vector<double> mean;   // index i = squared distance after iteration i
    std::vector<double> stderr_; // standard error of the seed average
    double rho = 0.0;
    int seeds = 0;

    std::string to_csv() const;
    // mean over the last `fraction` of the curve
    double plateau(double fraction = 0.2) const;
};

struct BoundCheck {
    bool holds = false;       // every iteration satisfied the recursion bound
    long first_violation = -1;
    double fraction_ok = 0.0;
};

enum class ReferenceObjective { Global, Local };

ReferenceSolution solve_reference(const NetworkDataset& ds, const SplitIndices& split,
                                  const Graph& g, const CombinationMatrix& A,
                                  const Laplacian& lap, double eta, double rho,
                                  double tol = 1e-10, long max_iters = 200000);

// Same solver against the neighbourhood-average cost; used to give the local
// trainer an optimum of its own for distance curves.
ReferenceSolution solve_reference_local(const NetworkDataset& ds, const SplitIndices& split,
                                        const ClusterMap& cm, double eta,
                                        double tol = 1e-10, long max_iters = 200000);

// Pointwise seed-average of the squared distance series recorded by trainers
// run against the same reference.
MsdCurve msd_curve(const std::vector<RunRecord>& records, const ReferenceSolution& ref);

NoiseStats gradient_noise_stats(const Eigen::VectorXd& at, const NetworkDataset& ds,
                                const std::vector<int>& train_indices,
                                const Laplacian& lap, double eta, double rho);

// Contraction factor and admissible step bound. Throws when mu is at or above
// the bound.
RateReport theoretical_rate(const ModelConstants& consts, const NoiseStats& noise,
                            double mu);

// Verifies msd_i <= lambda*msd_{i-1} + mu^2*sigma_s^2 + 3*stderr_i pointwise.
BoundCheck check_recursion_bound(const MsdCurve& curve, const RateReport& rate);

} // namespace netsmooth
