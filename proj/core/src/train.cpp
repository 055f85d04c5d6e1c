#include "netsmooth/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "netsmooth/errors.hpp"

namespace netsmooth {

StackLayout StackLayout::from(const NetworkDataset& ds) {
    StackLayout layout;
    layout.offsets.resize(ds.K() + 1);
    layout.offsets[0] = 0;
    for (int k = 0; k < ds.K(); ++k)
        layout.offsets[k + 1] = layout.offsets[k] + ds.agents[k].dim();
    layout.total = layout.offsets[ds.K()];
    return layout;
}

Eigen::VectorXd stack_state(const NetworkState& state, const StackLayout& layout) {
    Eigen::VectorXd out(layout.total);
    for (std::size_t k = 0; k < state.w.size(); ++k)
        out.segment(layout.offsets[k], state.w[k].size()) = state.w[k];
    return out;
}

NetworkState unstack_state(const Eigen::VectorXd& stacked, const StackLayout& layout) {
    NetworkState state;
    const int K = static_cast<int>(layout.offsets.size()) - 1;
    state.w.resize(K);
    for (int k = 0; k < K; ++k)
        state.w[k] = stacked.segment(layout.offsets[k], layout.dim(k));
    return state;
}

FeatureBlock FeatureBlock::at(const NetworkDataset& ds, int n) {
    FeatureBlock fb;
    fb.h.resize(ds.K());
    for (int k = 0; k < ds.K(); ++k) fb.h[k] = ds.agents[k].features.row(n).transpose();
    return fb;
}

Eigen::VectorXd FeatureBlock::predictions(const Eigen::VectorXd& stacked,
                                          const StackLayout& layout) const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(h.size()));
    for (std::size_t k = 0; k < h.size(); ++k)
        y(static_cast<Eigen::Index>(k)) =
            h[k].dot(stacked.segment(layout.offsets[k], h[k].size()));
    return y;
}

Eigen::VectorXd FeatureBlock::embed(const Eigen::VectorXd& y,
                                    const StackLayout& layout) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(layout.total);
    for (std::size_t k = 0; k < h.size(); ++k)
        out.segment(layout.offsets[k], h[k].size()) = h[k] * y(static_cast<Eigen::Index>(k));
    return out;
}

Eigen::VectorXd FeatureBlock::coupling_apply(const Eigen::VectorXd& stacked,
                                             const Laplacian& lap,
                                             const StackLayout& layout) const {
    return embed(lap.L * predictions(stacked, layout), layout);
}

Eigen::MatrixXd FeatureBlock::coupling_dense(const Laplacian& lap,
                                             const StackLayout& layout) const {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(layout.total, layout.total);
    const int K = static_cast<int>(h.size());
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
            if (lap.L(k, l) == 0.0) continue;
            B.block(layout.offsets[k], layout.offsets[l], h[k].size(), h[l].size()) =
                lap.L(k, l) * (h[k] * h[l].transpose());
        }
    return B;
}

// ---------------------------------------------------------------------------
// trainers

namespace {

void check_hyperparams(const HyperParams& hp) {
    if (!(hp.mu > 0.0)) throw ConfigError("train: step size mu must be positive");
    if (hp.rho < 0.0) throw ConfigError("train: rho must be >= 0");
    if (hp.eta < 0.0) throw ConfigError("train: eta must be >= 0");
    if (hp.passes < 1) throw ConfigError("train: passes must be >= 1");
    if (hp.eval_every < 1) throw ConfigError("train: eval_every must be >= 1");
}

NetworkState zero_state(const NetworkDataset& ds) {
    NetworkState state;
    state.w.resize(ds.K());
    for (int k = 0; k < ds.K(); ++k)
        state.w[k] = Eigen::VectorXd::Zero(ds.agents[k].dim());
    return state;
}

// Single SGD update w -= mu * (coef*h + 2*eta*w). Every trainer funnels its
// per-agent update through this so that the rho = 0 and singleton-cluster
// reductions are reproduced bit-for-bit.
template <typename Row>
inline void sgd_step(Eigen::VectorXd& w, double coef, const Row& h, double mu, double eta) {
    const Eigen::Index m = w.size();
    for (Eigen::Index j = 0; j < m; ++j)
        w(j) -= mu * (coef * h(j) + 2.0 * eta * w(j));
}

void guard_divergence(const NetworkState& state, long iter) {
    for (const auto& w : state.w) {
        if (!w.allFinite() || (w.size() > 0 && w.cwiseAbs().maxCoeff() > 1e12))
            throw DivergedError(iter, "training diverged at iteration " +
                                          std::to_string(iter));
    }
}

// The frozen-state machinery shared by the three engines: shared sample
// index per iteration, evaluation cadence, divergence guard, squared
// distance to an optional reference.
template <typename ComputeCoefs>
std::pair<NetworkState, RunRecord> run_engine(
    const NetworkDataset& ds, const SplitIndices& split, const HyperParams& hp,
    const ClusterMap* cm_eval, EvalRule eval_rule, EvalRule loss_rule,
    const Eigen::VectorXd* msd_reference, ComputeCoefs&& compute_coefs) {
    check_hyperparams(hp);
    if (split.train.empty()) throw ConfigError("train: empty training split");

    const int K = ds.K();
    NetworkState state = zero_state(ds);
    RunRecord rec;
    rec.hp = hp;
    const long T = static_cast<long>(hp.passes) * static_cast<long>(split.train.size());
    rec.iterations = T;
    rec.sampled.reserve(T);

    StackLayout layout;
    if (msd_reference) {
        layout = StackLayout::from(ds);
        if (msd_reference->size() != layout.total)
            throw ConfigError("train: reference length does not match stacked dimension");
        rec.msd.reserve(T + 1);
        rec.msd.push_back((*msd_reference - stack_state(state, layout)).squaredNorm());
    }

    IndexSampler sampler(split.train, hp.seed);
    std::vector<double> coef(K);
    for (long iter = 1; iter <= T; ++iter) {
        const int n = sampler.next();
        rec.sampled.push_back(n);

        compute_coefs(state, n, coef);
        for (int k = 0; k < K; ++k)
            sgd_step(state.w[k], coef[k], ds.agents[k].features.row(n), hp.mu, hp.eta);
        state.iteration = iter;

        guard_divergence(state, iter);
        if (msd_reference)
            rec.msd.push_back((*msd_reference - stack_state(state, layout)).squaredNorm());
        if (iter % hp.eval_every == 0 || iter == T) {
            EvalPoint p;
            p.iter = iter;
            p.avg_train_loss = mean_loss(state, ds, split.train, cm_eval, loss_rule);
            p.avg_test_err = evaluate(state, ds, split.test, cm_eval, eval_rule).average;
            rec.evals.push_back(p);
        }
    }
    return {std::move(state), std::move(rec)};
}

} // namespace

std::pair<NetworkState, RunRecord> train_global_smoothing(
    const NetworkDataset& ds, const SplitIndices& split, const Graph& g,
    const CombinationMatrix& A, const Laplacian& lap, const HyperParams& hp,
    const ClusterMap& cm, EvalRule eval_rule, const Eigen::VectorXd* msd_reference) {
    (void)lap; // the per-agent loop works off neighbourhood sums directly
    const int K = ds.K();
    std::vector<double> raw(K);
    auto coefs = [&](const NetworkState& state, int n, std::vector<double>& coef) {
        for (int k = 0; k < K; ++k)
            raw[k] = ds.agents[k].features.row(n).dot(state.w[k]);
        for (int k = 0; k < K; ++k) {
            const double gs = loss_grad_scalar(ds.agents[k].labels(n), raw[k]);
            if (hp.rho != 0.0) {
                double c = 0.0;
                for (int l : g.neighbors[k]) {
                    if (l == k) continue;
                    c += A.A(k, l) * (raw[k] - raw[l]);
                }
                coef[k] = hp.paper_literal_alg1 ? gs - hp.mu * hp.rho * c
                                                : gs + hp.rho * c;
            } else {
                coef[k] = gs;
            }
        }
    };
    return run_engine(ds, split, hp, &cm, eval_rule, EvalRule::Linear, msd_reference,
                      coefs);
}

std::pair<NetworkState, RunRecord> train_local_smoothing(
    const NetworkDataset& ds, const SplitIndices& split, const Graph& g,
    const CombinationMatrix& A, const HyperParams& hp, const ClusterMap& cm,
    EvalRule eval_rule, const Eigen::VectorXd* msd_reference) {
    (void)g;
    const int K = ds.K();
    std::vector<double> raw(K), gs(K);
    auto coefs = [&](const NetworkState& state, int n, std::vector<double>& coef) {
        for (int k = 0; k < K; ++k)
            raw[k] = ds.agents[k].features.row(n).dot(state.w[k]);
        Eigen::Map<const Eigen::VectorXd> raw_vec(raw.data(), K);
        for (int k = 0; k < K; ++k)
            gs[k] = loss_grad_scalar(ds.agents[k].labels(n),
                                     combine_neighborhood(raw_vec, cm, k));
        for (int k = 0; k < K; ++k) {
            if (hp.grad_mode == GradMode::OwnTerm) {
                coef[k] = gs[k] * (cm.self_weight[k] / static_cast<double>(cm.size(k)));
            } else {
                // exact chain rule: every agent l whose average k contributes to
                const auto& members = cm.members[k];
                double c = gs[members[0]] *
                           (A.A(k, members[0]) / static_cast<double>(cm.size(members[0])));
                for (std::size_t j = 1; j < members.size(); ++j) {
                    const int l = members[j];
                    c += gs[l] * (A.A(k, l) / static_cast<double>(cm.size(l)));
                }
                coef[k] = c;
            }
        }
    };
    return run_engine(ds, split, hp, &cm, eval_rule, EvalRule::Neighborhood,
                      msd_reference, coefs);
}

std::pair<NetworkState, RunRecord> train_noncooperative(
    const NetworkDataset& ds, const SplitIndices& split, const HyperParams& hp,
    const ClusterMap* cm_for_eval, EvalRule eval_rule,
    const Eigen::VectorXd* msd_reference) {
    const int K = ds.K();
    if (eval_rule == EvalRule::Neighborhood && cm_for_eval == nullptr)
        throw ConfigError("train_noncooperative: neighbourhood evaluation needs a cluster map");
    auto coefs = [&](const NetworkState& state, int n, std::vector<double>& coef) {
        for (int k = 0; k < K; ++k)
            coef[k] = loss_grad_scalar(ds.agents[k].labels(n),
                                       ds.agents[k].features.row(n).dot(state.w[k]));
    };
    return run_engine(ds, split, hp, cm_for_eval, eval_rule, EvalRule::Linear,
                      msd_reference, coefs);
}

Eigen::VectorXd block_recursion_step(const Eigen::VectorXd& stacked,
                                     const FeatureBlock& fb, const Laplacian& lap,
                                     const Eigen::VectorXd& grad_hat, double mu,
                                     double rho, const StackLayout& layout) {
    if (stacked.size() != layout.total || grad_hat.size() != layout.total)
        throw ConfigError("block_recursion_step: stacked dimension mismatch");
    Eigen::VectorXd out = stacked;
    if (rho != 0.0) out -= (mu * rho) * fb.coupling_apply(stacked, lap, layout);
    out -= mu * grad_hat;
    return out;
}

// ---------------------------------------------------------------------------
// evaluation

EvalResult evaluate(const NetworkState& state, const NetworkDataset& ds,
                    const std::vector<int>& indices, const ClusterMap* cm,
                    EvalRule rule) {
    if (indices.empty()) throw ConfigError("evaluate: empty index set");
    if (rule == EvalRule::Neighborhood && cm == nullptr)
        throw ConfigError("evaluate: neighbourhood rule needs a cluster map");
    const int K = ds.K();
    Eigen::VectorXd wrong = Eigen::VectorXd::Zero(K);
    Eigen::VectorXd raw(K);
    for (int n : indices) {
        for (int k = 0; k < K; ++k)
            raw(k) = ds.agents[k].features.row(n).dot(state.w[k]);
        for (int k = 0; k < K; ++k) {
            const double yhat =
                rule == EvalRule::Linear ? raw(k) : combine_neighborhood(raw, *cm, k);
            const int pred = yhat < 0.0 ? -1 : +1; // sign(0) counts as +1
            if (pred != ds.agents[k].labels(n)) wrong(k) += 1.0;
        }
    }
    EvalResult res;
    res.per_agent = wrong / static_cast<double>(indices.size());
    res.average = res.per_agent.mean();
    return res;
}

double mean_loss(const NetworkState& state, const NetworkDataset& ds,
                 const std::vector<int>& indices, const ClusterMap* cm, EvalRule rule) {
    if (indices.empty()) throw ConfigError("mean_loss: empty index set");
    if (rule == EvalRule::Neighborhood && cm == nullptr)
        throw ConfigError("mean_loss: neighbourhood rule needs a cluster map");
    const int K = ds.K();
    Eigen::VectorXd raw(K);
    double total = 0.0;
    for (int n : indices) {
        for (int k = 0; k < K; ++k)
            raw(k) = ds.agents[k].features.row(n).dot(state.w[k]);
        for (int k = 0; k < K; ++k) {
            const double yhat =
                rule == EvalRule::Linear ? raw(k) : combine_neighborhood(raw, *cm, k);
            total += logistic_loss(ds.agents[k].labels(n), yhat);
        }
    }
    return total / (static_cast<double>(indices.size()) * static_cast<double>(K));
}

// ---------------------------------------------------------------------------
// serialization

std::string RunRecord::to_csv() const {
    std::string out = "iter,n,avg_train_loss,avg_test_err,msd\n";
    char buf[64];
    const bool with_msd = !msd.empty();
    if (with_msd) {
        std::snprintf(buf, sizeof(buf), "0,,,,%.17g\n", msd[0]);
        out += buf;
    }
    std::size_t next_eval = 0;
    for (long i = 1; i <= iterations; ++i) {
        out += std::to_string(i);
        out += ',';
        out += std::to_string(sampled[i - 1]);
        if (next_eval < evals.size() && evals[next_eval].iter == i) {
            std::snprintf(buf, sizeof(buf), ",%.17g,%.17g",
                          evals[next_eval].avg_train_loss,
                          evals[next_eval].avg_test_err);
            out += buf;
            ++next_eval;
        } else {
            out += ",,";
        }
        if (with_msd) {
            std::snprintf(buf, sizeof(buf), ",%.17g", msd[i]);
            out += buf;
        } else {
            out += ',';
        }
        out += '\n';
    }
    return out;
}

std::string state_to_json(const NetworkState& state) {
    nlohmann::json j;
    auto& agents = j["agents"] = nlohmann::json::array();
    for (std::size_t k = 0; k < state.w.size(); ++k) {
        nlohmann::json entry;
        entry["k"] = k;
        entry["w"] = std::vector<double>(state.w[k].data(),
                                         state.w[k].data() + state.w[k].size());
        agents.push_back(std::move(entry));
    }
    return j.dump(2) + "\n";
}

NetworkState state_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("state JSON: ") + e.what());
    }
    NetworkState state;
    try {
        const auto& agents = j.at("agents");
        state.w.resize(agents.size());
        for (const auto& entry : agents) {
            const int k = entry.at("k").get<int>();
            if (k < 0 || k >= static_cast<int>(state.w.size()) || state.w[k].size() != 0)
                throw ConfigError("state JSON: agent ids must be 0..K-1 without repeats");
            const auto values = entry.at("w").get<std::vector<double>>();
            state.w[k] = Eigen::Map<const Eigen::VectorXd>(
                values.data(), static_cast<Eigen::Index>(values.size()));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("state JSON: ") + e.what());
    }
    return state;
}

void save_state(const NetworkState& state, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("save_state: cannot write " + path);
    out << state_to_json(state);
}

NetworkState load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingDataError("load_state: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return state_from_json(ss.str());
}

} // namespace netsmooth
