#include "netsmooth/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "netsmooth/errors.hpp"

namespace netsmooth {

namespace {

// Gradient descent with Armijo backtracking (halving, initial step 1/delta).
// Near the floating-point floor the sufficient-decrease test becomes
// unmeasurable; such steps are accepted, and a stagnation guard turns a
// hopeless tolerance into an error carrying the achieved norm.
ReferenceSolution minimize(const std::function<double(const Eigen::VectorXd&)>& cost,
                           const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                           Eigen::VectorXd w, double initial_step, double tol,
                           long max_iters, double rho_tag) {
    constexpr double armijo = 1e-4;
    constexpr long stagnation_window = 1000;
    double f = cost(w);
    Eigen::VectorXd gvec = grad(w);
    double gnorm = gvec.norm();
    double best_gnorm = gnorm;
    long best_iter = 0;
    auto fail = [&](const char* why) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "solve_reference: %s before reaching tol=%g (achieved gradient "
                      "norm %g)",
                      why, tol, best_gnorm);
        throw ConfigError(buf);
    };
    for (long iter = 0; gnorm > tol; ++iter) {
        if (iter >= max_iters) fail("iteration budget exhausted");
        if (iter - best_iter > stagnation_window) fail("gradient norm stagnated");
        double step = initial_step;
        const double g2 = gnorm * gnorm;
        const double measurable = 8.0 * std::abs(f) * 1e-16;
        Eigen::VectorXd trial = w - step * gvec;
        double f_trial = cost(trial);
        int halvings = 0;
        while (f_trial > f - armijo * step * g2 && std::abs(f - f_trial) > measurable) {
            if (++halvings > 200) fail("line search failed");
            step *= 0.5;
            trial = w - step * gvec;
            f_trial = cost(trial);
        }
        w = std::move(trial);
        f = f_trial;
        gvec = grad(w);
        gnorm = gvec.norm();
        if (gnorm < 0.99 * best_gnorm) {
            best_gnorm = gnorm;
            best_iter = iter;
        }
    }
    ReferenceSolution ref;
    ref.w_star = std::move(w);
    ref.achieved_grad_norm = gnorm;
    ref.rho = rho_tag;
    return ref;
}

} // namespace

ReferenceSolution solve_reference(const NetworkDataset& ds, const SplitIndices& split,
                                  const Graph& g, const CombinationMatrix& A,
                                  const Laplacian& lap, double eta, double rho,
                                  double tol, long max_iters) {
    (void)g;
    (void)A;
    if (!(eta > 0.0))
        throw ConfigError("solve_reference: eta must be positive for a unique minimizer");
    if (rho < 0.0) throw ConfigError("solve_reference: rho must be >= 0");
    const StackLayout layout = StackLayout::from(ds);
    const ModelConstants consts = compute_constants(ds, eta);
    auto cost = [&](const Eigen::VectorXd& w) {
        return cost_global(ds, split.train, lap, eta, rho, w, layout);
    };
    auto grad = [&](const Eigen::VectorXd& w) {
        return grad_global(ds, split.train, lap, eta, rho, w, layout);
    };
    return minimize(cost, grad, Eigen::VectorXd::Zero(layout.total), 1.0 / consts.delta,
                    tol, max_iters, rho);
}

ReferenceSolution solve_reference_local(const NetworkDataset& ds,
                                        const SplitIndices& split, const ClusterMap& cm,
                                        double eta, double tol, long max_iters) {
    if (!(eta > 0.0))
        throw ConfigError("solve_reference: eta must be positive for a unique minimizer");
    const StackLayout layout = StackLayout::from(ds);
    const ModelConstants consts = compute_constants(ds, eta);
    auto cost = [&](const Eigen::VectorXd& w) {
        return cost_local(ds, split.train, cm, eta, w, layout);
    };
    auto grad = [&](const Eigen::VectorXd& w) {
        return grad_local(ds, split.train, cm, eta, w, layout);
    };
    return minimize(cost, grad, Eigen::VectorXd::Zero(layout.total), 1.0 / consts.delta,
                    tol, max_iters, 0.0);
}

MsdCurve msd_curve(const std::vector<RunRecord>& records, const ReferenceSolution& ref) {
    if (records.empty()) throw ConfigError("msd_curve: no records");
    const std::size_t len = records.front().msd.size();
    if (len == 0)
        throw ConfigError("msd_curve: records carry no distance series "
                          "(train with a reference)");
    for (const auto& rec : records) {
        if (rec.msd.size() != len)
            throw ConfigError("msd_curve: records disagree on iteration count");
        if (rec.hp.rho != ref.rho)
            throw ConfigError("msd_curve: record rho does not match the reference");
    }
    const double R = static_cast<double>(records.size());
    MsdCurve curve;
    curve.rho = ref.rho;
    curve.seeds = static_cast<int>(records.size());
    curve.mean.resize(len);
    curve.stderr_.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        double mean = 0.0;
        for (const auto& rec : records) mean += rec.msd[i];
        mean /= R;
        double var = 0.0;
        for (const auto& rec : records) {
            const double d = rec.msd[i] - mean;
            var += d * d;
        }
        curve.mean[i] = mean;
        curve.stderr_[i] = records.size() > 1 ? std::sqrt(var / (R * (R - 1.0))) : 0.0;
    }
    return curve;
}

std::string MsdCurve::to_csv() const {
    std::string out = "iter,msd_mean,msd_stderr\n";
    char buf[80];
    for (std::size_t i = 0; i < mean.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, mean[i], stderr_[i]);
        out += buf;
    }
    return out;
}

double MsdCurve::plateau(double fraction) const {
    if (mean.empty()) throw ConfigError("MsdCurve::plateau: empty curve");
    const std::size_t start =
        mean.size() - std::max<std::size_t>(1, static_cast<std::size_t>(
                                                   fraction * static_cast<double>(mean.size())));
    double sum = 0.0;
    for (std::size_t i = start; i < mean.size(); ++i) sum += mean[i];
    return sum / static_cast<double>(mean.size() - start);
}

NoiseStats gradient_noise_stats(const Eigen::VectorXd& at, const NetworkDataset& ds,
                                const std::vector<int>& train_indices,
                                const Laplacian& lap, double eta, double rho) {
    if (train_indices.empty())
        throw ConfigError("gradient_noise_stats: empty index set");
    const StackLayout layout = StackLayout::from(ds);
    if (at.size() != layout.total)
        throw ConfigError("gradient_noise_stats: stacked dimension mismatch");
    const double N = static_cast<double>(train_indices.size());
    const ModelConstants consts = compute_constants(ds, eta);

    // per-index single-draw gradients (regularizer cancels in the noise)
    std::vector<Eigen::VectorXd> loss_grads, couplings;
    loss_grads.reserve(train_indices.size());
    couplings.reserve(train_indices.size());
    std::vector<FeatureBlock> blocks;
    blocks.reserve(train_indices.size());
    for (int n : train_indices) {
        FeatureBlock fb = FeatureBlock::at(ds, n);
        Eigen::VectorXd q = Eigen::VectorXd::Zero(layout.total);
        const Eigen::VectorXd yhat = fb.predictions(at, layout);
        for (int k = 0; k < ds.K(); ++k)
            q.segment(layout.offsets[k], layout.dim(k)) =
                loss_grad_scalar(ds.agents[k].labels(n), yhat(k)) * fb.h[k];
        loss_grads.push_back(std::move(q));
        couplings.push_back(fb.coupling_apply(at, lap, layout));
        blocks.push_back(std::move(fb));
    }

    Eigen::VectorXd mean_loss_grad = Eigen::VectorXd::Zero(layout.total);
    Eigen::VectorXd mean_coupling = Eigen::VectorXd::Zero(layout.total);
    for (std::size_t i = 0; i < loss_grads.size(); ++i) {
        mean_loss_grad += loss_grads[i];
        mean_coupling += couplings[i];
    }
    mean_loss_grad /= N;
    mean_coupling /= N;

    NoiseStats stats;
    Eigen::VectorXd mean_noise = Eigen::VectorXd::Zero(layout.total);
    double second = 0.0;
    for (std::size_t i = 0; i < loss_grads.size(); ++i) {
        const Eigen::VectorXd s = (loss_grads[i] - mean_loss_grad) +
                                  rho * (couplings[i] - mean_coupling);
        mean_noise += s;
        second += s.squaredNorm();
    }
    stats.empirical_mean_norm = (mean_noise / N).norm();
    stats.empirical_second_moment = second / N;

    // coupling-operator spread around its mean, in Frobenius norm
    stats.b_bar = Eigen::MatrixXd::Zero(layout.total, layout.total);
    std::vector<Eigen::MatrixXd> dense;
    dense.reserve(blocks.size());
    for (const auto& fb : blocks) {
        dense.push_back(fb.coupling_dense(lap, layout));
        stats.b_bar += dense.back();
    }
    stats.b_bar /= N;
    double spread = 0.0;
    for (const auto& B : dense) spread += (B - stats.b_bar).squaredNorm();
    stats.b_spread = spread / N;

    stats.beta_s_sq = 8.0 * consts.delta * consts.delta + 4.0 * rho * rho * stats.b_spread;
    double sigma = 0.0;
    for (std::size_t i = 0; i < couplings.size(); ++i)
        sigma += (mean_loss_grad - rho * couplings[i]).squaredNorm();
    stats.sigma_s_sq = 4.0 * sigma / N;
    return stats;
}

RateReport theoretical_rate(const ModelConstants& consts, const NoiseStats& noise,
                            double mu) {
    if (!(mu > 0.0)) throw ConfigError("theoretical_rate: mu must be positive");
    const double denom = consts.delta * consts.delta + noise.beta_s_sq;
    const double bound = 2.0 * consts.nu / denom;
    if (mu >= bound) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "theoretical_rate: mu = %g is not below the admissible bound "
                      "2*nu/(delta^2+beta_s^2) = %g",
                      mu, bound);
        throw ConfigError(buf);
    }
    RateReport report;
    report.mu = mu;
    report.mu_bound = bound;
    report.lambda = 1.0 - 2.0 * consts.nu * mu + mu * mu * denom;
    report.sigma_s_sq = noise.sigma_s_sq;
    report.steady_state_bound = mu * mu * noise.sigma_s_sq / (1.0 - report.lambda);
    return report;
}

BoundCheck check_recursion_bound(const MsdCurve& curve, const RateReport& rate) {
    if (curve.mean.size() < 2)
        throw ConfigError("check_recursion_bound: curve too short");
    const double drive = rate.mu * rate.mu * rate.sigma_s_sq;
    BoundCheck check;
    check.holds = true;
    long ok = 0;
    const long total = static_cast<long>(curve.mean.size()) - 1;
    for (std::size_t i = 1; i < curve.mean.size(); ++i) {
        const double allowed =
            rate.lambda * curve.mean[i - 1] + drive + 3.0 * curve.stderr_[i];
        if (curve.mean[i] <= allowed) {
            ++ok;
        } else if (check.holds) {
            check.holds = false;
            check.first_violation = static_cast<long>(i);
        }
    }
    check.fraction_ok = static_cast<double>(ok) / static_cast<double>(total);
    return check;
}

} // namespace netsmooth
