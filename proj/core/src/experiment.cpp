#include "netsmooth/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "netsmooth/errors.hpp"
#include "netsmooth/parallel.hpp"
#include "netsmooth/rng.hpp"

namespace fs = std::filesystem;

namespace netsmooth {

namespace {

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc;
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::vector<Eigen::Vector2d> random_coords(int K, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Eigen::Vector2d> coords(K);
    for (int k = 0; k < K; ++k) {
        const double x = rng.uniform01();
        const double y = rng.uniform01();
        coords[k] = Eigen::Vector2d(x, y);
    }
    return coords;
}

FeatureSpec feature_spec_from(const DataConfig& cfg) {
    FeatureSpec spec = FeatureSpec::defaults();
    if (!cfg.attr_means.empty()) {
        spec.attr_means = Eigen::Map<const Eigen::VectorXd>(
            cfg.attr_means.data(), static_cast<Eigen::Index>(cfg.attr_means.size()));
        spec.attr_stddevs = Eigen::VectorXd::Ones(spec.attr_means.size());
    }
    if (!cfg.attr_stddevs.empty()) {
        spec.attr_stddevs = Eigen::Map<const Eigen::VectorXd>(
            cfg.attr_stddevs.data(), static_cast<Eigen::Index>(cfg.attr_stddevs.size()));
    }
    if (spec.attr_means.size() != spec.attr_stddevs.size())
        throw ConfigError("data.attr_means and data.attr_stddevs must have equal length");
    if (static_cast<int>(spec.attr_means.size()) < cfg.M_max) {
        // default spec is 5 attributes; trim or extend to M_max
        if (cfg.attr_means.empty()) {
            Eigen::VectorXd means(cfg.M_max), devs(cfg.M_max);
            for (int m = 0; m < cfg.M_max; ++m) {
                means(m) = 0.4 * (m + 1);
                devs(m) = 1.0;
            }
            spec.attr_means = means / means.norm();
            spec.attr_stddevs = devs;
        } else {
            throw ConfigError("data.attr_means must supply at least M_max values");
        }
    }
    spec.attr_means.conservativeResize(cfg.M_max);
    spec.attr_stddevs.conservativeResize(cfg.M_max);
    spec.class_separation = cfg.class_separation;
    return spec;
}

std::vector<int> x_split_classes(const std::vector<Eigen::Vector2d>& coords) {
    std::vector<double> xs(coords.size());
    for (std::size_t k = 0; k < coords.size(); ++k) xs[k] = coords[k].x();
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    const double threshold = sorted[(sorted.size() - 1) / 2];
    std::vector<int> classes(coords.size());
    for (std::size_t k = 0; k < coords.size(); ++k)
        classes[k] = xs[k] > threshold ? +1 : -1;
    return classes;
}

LabelAssignment label_assignment_from(const DataConfig& cfg, const Graph& g) {
    if (cfg.pattern == "uniform") return LabelAssignment::uniform();
    if (!cfg.cluster_classes.empty())
        return LabelAssignment::clustered(cfg.cluster_classes);
    if (cfg.cluster_rule == "x-split")
        return LabelAssignment::clustered(x_split_classes(g.coords));
    if (!cfg.cluster_rule.empty())
        throw ConfigError("data.cluster_rule: unknown rule '" + cfg.cluster_rule +
                          "' (supported: x-split)");
    throw ConfigError("data.pattern = clustered needs data.cluster_classes or "
                      "data.cluster_rule");
}

} // namespace

Graph build_graph(const GraphConfig& cfg) {
    if (cfg.kind == "file") {
        if (cfg.file.empty()) throw ConfigError("graph.kind = file needs graph.file");
        return load_graph(cfg.file);
    }
    if (cfg.kind == "geometric") {
        for (int attempt = 0; attempt < 100; ++attempt) {
            Graph g = random_geometric_graph(cfg.K, cfg.radius, cfg.seed + attempt);
            if (g.connected) return g;
        }
        throw ConfigError("graph: no connected geometric draw within 100 attempts "
                          "(K=" + std::to_string(cfg.K) +
                          ", radius=" + std::to_string(cfg.radius) + ")");
    }
    // knn over randomly placed nodes; same bounded resample policy
    for (int attempt = 0; attempt < 100; ++attempt) {
        Graph g = knn_graph(random_coords(cfg.K, cfg.seed + attempt), cfg.k_neighbors);
        if (g.connected) return g;
    }
    throw ConfigError("graph: no connected knn draw within 100 attempts");
}

Workspace build_workspace(const ExperimentConfig& cfg) {
    Workspace ws;
    if (cfg.data.kind == "file") {
        if (cfg.data.manifest.empty())
            throw ConfigError("data.kind = file needs data.manifest");
        LoadedNetwork loaded = load_network_csv(cfg.data.manifest);
        ws.ds = std::move(loaded.ds);
        if (cfg.graph.kind == "knn" && loaded.station_coords) {
            ws.g = knn_graph(*loaded.station_coords, cfg.graph.k_neighbors);
        } else {
            ws.g = build_graph(cfg.graph);
        }
    } else {
        ws.g = build_graph(cfg.graph);
        ws.ds = generate_synthetic(ws.g, feature_spec_from(cfg.data),
                                   label_assignment_from(cfg.data, ws.g), cfg.data.N,
                                   cfg.data.seed,
                                   cfg.data.dims == "fixed" ? DimMode::Fixed
                                                            : DimMode::UniformRandom);
    }
    if (ws.ds.K() != ws.g.K)
        throw ConfigError("dataset has " + std::to_string(ws.ds.K()) +
                          " agents but the graph has " + std::to_string(ws.g.K));

    if (!cfg.graph.matrix_file.empty()) {
        ws.A.A = load_matrix_csv(cfg.graph.matrix_file);
        if (ws.A.A.rows() != ws.g.K || ws.A.A.cols() != ws.g.K)
            throw ConfigError("graph.matrix_file: size does not match the graph");
    } else {
        ws.A = metropolis_weights(ws.g);
    }
    ws.lap = laplacian(ws.A, ws.g);
    ws.split = train_test_split(ws.ds.N, cfg.data.train_fraction, cfg.data.split_seed);
    ws.cm = build_cluster_map(ws.g, ws.A, ws.ds.agent_classes);
    return ws;
}

// ---------------------------------------------------------------------------
// subcommand bodies

std::string run_gen_graph(const ExperimentConfig& cfg) {
    const Graph g = build_graph(cfg.graph);
    const CombinationMatrix A =
        cfg.graph.matrix_file.empty()
            ? metropolis_weights(g)
            : CombinationMatrix{load_matrix_csv(cfg.graph.matrix_file)};
    const Laplacian lap = laplacian(A, g);

    const fs::path out(cfg.out_dir);
    fs::create_directories(out);
    save_graph(g, (out / "graph.json").string());
    save_matrix_csv(A.A, (out / "combination.csv").string());
    save_matrix_csv(lap.L, (out / "laplacian.csv").string());

    int dmin = g.K, dmax = 0;
    double dsum = 0.0;
    for (int k = 0; k < g.K; ++k) {
        dmin = std::min(dmin, g.degree(k));
        dmax = std::max(dmax, g.degree(k));
        dsum += g.degree(k);
    }
    std::ostringstream ss;
    ss << "graph: K=" << g.K << " connected=" << (g.connected ? "yes" : "no")
       << " degree(min/mean/max incl self)=" << dmin << "/" << dsum / g.K << "/" << dmax
       << "\nwrote " << (out / "graph.json").string() << ", combination.csv, laplacian.csv";
    return ss.str();
}

std::string run_gen_data(const ExperimentConfig& cfg) {
    if (cfg.data.kind != "synthetic")
        throw ConfigError("gen-data requires data.kind = synthetic");
    const Graph g = build_graph(cfg.graph);
    const NetworkDataset ds = generate_synthetic(
        g, feature_spec_from(cfg.data), label_assignment_from(cfg.data, g), cfg.data.N,
        cfg.data.seed,
        cfg.data.dims == "fixed" ? DimMode::Fixed : DimMode::UniformRandom);
    const std::string manifest = export_network_csv(ds, g.coords, cfg.out_dir);
    std::ostringstream ss;
    ss << "dataset: K=" << ds.K() << " N=" << ds.N << " pattern=" << cfg.data.pattern
       << "\nwrote " << manifest;
    return ss.str();
}

namespace {

nlohmann::json eval_json(const NetworkState& state, const Workspace& ws,
                         const std::vector<int>& indices, EvalRule rule) {
    const EvalResult res = evaluate(state, ws.ds, indices, &ws.cm, rule);
    nlohmann::json j;
    j["rule"] = rule == EvalRule::Linear ? "linear" : "neighborhood";
    j["average_error"] = res.average;
    j["per_agent_error"] =
        std::vector<double>(res.per_agent.data(), res.per_agent.data() + res.per_agent.size());
    return j;
}

} // namespace

std::string run_train(const ExperimentConfig& cfg) {
    Workspace ws = build_workspace(cfg);
    HyperParams hp = cfg.hyperparams();

    std::pair<NetworkState, RunRecord> result = [&] {
        if (cfg.train.algorithm == "global")
            return train_global_smoothing(ws.ds, ws.split, ws.g, ws.A, ws.lap, hp, ws.cm);
        if (cfg.train.algorithm == "local")
            return train_local_smoothing(ws.ds, ws.split, ws.g, ws.A, hp, ws.cm);
        return train_noncooperative(ws.ds, ws.split, hp, &ws.cm, EvalRule::Linear);
    }();
    const NetworkState& state = result.first;
    const RunRecord& rec = result.second;

    const fs::path out(cfg.out_dir);
    fs::create_directories(out);
    write_text(out / "run_record.csv", rec.to_csv());
    save_state(state, (out / "state.json").string());

    nlohmann::json summary;
    summary["generated_at"] = timestamp_utc();
    summary["algorithm"] = cfg.train.algorithm;
    summary["iterations"] = rec.iterations;
    summary["final_train_loss"] = rec.evals.back().avg_train_loss;
    summary["test_error"] = {
        eval_json(state, ws, ws.split.test, EvalRule::Linear),
        eval_json(state, ws, ws.split.test, EvalRule::Neighborhood),
    };
    write_text(out / "summary.json", summary.dump(2) + "\n");

    std::ostringstream ss;
    ss << cfg.train.algorithm << ": " << rec.iterations
       << " iterations, final train loss " << rec.evals.back().avg_train_loss
       << ", final test error (record rule) " << rec.evals.back().avg_test_err << "\nwrote "
       << (out / "run_record.csv").string() << ", state.json, summary.json";
    return ss.str();
}

std::string run_eval(const ExperimentConfig& cfg, const std::string& state_path,
                     const std::string& rule) {
    Workspace ws = build_workspace(cfg);
    const NetworkState state = load_state(state_path);
    if (static_cast<int>(state.w.size()) != ws.ds.K())
        throw ConfigError("eval: state has " + std::to_string(state.w.size()) +
                          " agents but the dataset has " + std::to_string(ws.ds.K()));

    nlohmann::json j;
    if (rule == "linear") {
        j["results"] = {eval_json(state, ws, ws.split.test, EvalRule::Linear)};
    } else if (rule == "neighborhood") {
        j["results"] = {eval_json(state, ws, ws.split.test, EvalRule::Neighborhood)};
    } else if (rule == "both") {
        j["results"] = {eval_json(state, ws, ws.split.test, EvalRule::Linear),
                        eval_json(state, ws, ws.split.test, EvalRule::Neighborhood)};
    } else {
        throw ConfigError("eval: rule must be linear, neighborhood, or both");
    }
    const fs::path out(cfg.out_dir);
    write_text(out / "eval.json", j.dump(2) + "\n");

    std::ostringstream ss;
    ss << "test error:";
    for (const auto& r : j["results"])
        ss << " " << r["rule"].get<std::string>() << "="
           << r["average_error"].get<double>();
    ss << "\nwrote " << (out / "eval.json").string();
    return ss.str();
}

// ---------------------------------------------------------------------------
// diagnostics

std::string run_diagnose(const ExperimentConfig& cfg) {
    if (!(cfg.train.eta > 0.0))
        throw ConfigError("diagnose: eta must be positive; without strong convexity the "
                          "contraction analysis does not apply");
    if (cfg.train.algorithm == "noncoop")
        throw ConfigError("diagnose: algorithm must be global or local");
    Workspace ws = build_workspace(cfg);
    const bool global = cfg.train.algorithm == "global";

    const ReferenceSolution ref =
        global ? solve_reference(ws.ds, ws.split, ws.g, ws.A, ws.lap, cfg.train.eta,
                                 cfg.train.rho, cfg.analysis.reference_tol,
                                 cfg.analysis.max_iters)
               : solve_reference_local(ws.ds, ws.split, ws.cm, cfg.train.eta,
                                       cfg.analysis.reference_tol, cfg.analysis.max_iters);

    HyperParams hp = cfg.hyperparams();
    if (cfg.analysis.iterations > 0) {
        const long per_pass = static_cast<long>(ws.split.train.size());
        hp.passes = static_cast<int>((cfg.analysis.iterations + per_pass - 1) / per_pass);
    }

    const int R = cfg.analysis.seeds;
    std::vector<RunRecord> records(R);
    parallel_for_tasks(static_cast<std::size_t>(R), [&](std::size_t r) {
        HyperParams hp_r = hp;
        hp_r.seed = hp.seed + static_cast<std::uint64_t>(r);
        if (global) {
            records[r] = train_global_smoothing(ws.ds, ws.split, ws.g, ws.A, ws.lap, hp_r,
                                                ws.cm, EvalRule::Neighborhood, &ref.w_star)
                             .second;
        } else {
            records[r] = train_local_smoothing(ws.ds, ws.split, ws.g, ws.A, hp_r, ws.cm,
                                               EvalRule::Neighborhood, &ref.w_star)
                             .second;
        }
    });
    const MsdCurve curve = msd_curve(records, ref);

    const fs::path out(cfg.out_dir);
    fs::create_directories(out);
    write_text(out / "msd.csv", curve.to_csv());

    nlohmann::json j;
    j["algorithm"] = cfg.train.algorithm;
    j["mu"] = cfg.train.mu;
    j["rho"] = cfg.train.rho;
    j["eta"] = cfg.train.eta;
    j["seeds"] = R;
    j["iterations"] = records.front().iterations;
    j["reference"] = {{"achieved_grad_norm", ref.achieved_grad_norm},
                      {"rho", ref.rho},
                      {"tol", cfg.analysis.reference_tol}};
    j["msd"] = {{"initial", curve.mean.front()},
                {"final", curve.mean.back()},
                {"plateau", curve.plateau()}};

    std::string verdict = "n/a";
    if (global) {
        const ModelConstants consts = compute_constants(ws.ds, cfg.train.eta);
        const NoiseStats noise = gradient_noise_stats(
            ref.w_star, ws.ds, ws.split.train, ws.lap, cfg.train.eta, cfg.train.rho);
        const RateReport rate = theoretical_rate(consts, noise, cfg.train.mu);
        const BoundCheck check = check_recursion_bound(curve, rate);
        j["constants"] = {
            {"nu", consts.nu},
            {"delta", consts.delta},
            {"nu_note", "nu = 2*eta, the standard strong-convexity lower bound for the "
                        "l2-regularized logistic cost"}};
        j["noise"] = {{"empirical_mean_norm", noise.empirical_mean_norm},
                      {"empirical_second_moment", noise.empirical_second_moment},
                      {"beta_s_sq", noise.beta_s_sq},
                      {"sigma_s_sq", noise.sigma_s_sq},
                      {"b_spread", noise.b_spread}};
        j["rate"] = {
            {"lambda", rate.lambda},
            {"mu_bound", rate.mu_bound},
            {"steady_state_bound", rate.steady_state_bound},
            {"lambda_form", "1 - 2*nu*mu + mu^2*(delta^2 + beta_s_sq)"},
            {"lambda_note",
             "the curvature term carries a mu^2 factor; the variant without it is "
             "dimensionally inconsistent and cannot lie in [0,1)"}};
        j["bound_check"] = {{"holds", check.holds},
                            {"first_violation", check.first_violation},
                            {"fraction_ok", check.fraction_ok}};
        verdict = check.holds
                      ? "bound holds at every iteration"
                      : "bound holds at " + std::to_string(100.0 * check.fraction_ok) +
                            "% of iterations (first violation at " +
                            std::to_string(check.first_violation) + ")";
    } else {
        j["note"] = "local smoothing diagnostics cover the distance-to-optimum curve "
                    "only; the contraction constants are derived for the global recursion";
    }
    write_text(out / "diagnostics.json", j.dump(2) + "\n");

    std::ostringstream ss;
    ss << "diagnose(" << cfg.train.algorithm << "): reference grad norm "
       << ref.achieved_grad_norm << ", msd plateau " << curve.plateau() << ", verdict: "
       << verdict << "\nwrote " << (out / "msd.csv").string() << ", diagnostics.json";
    return ss.str();
}

// ---------------------------------------------------------------------------
// multi-seed comparisons and canned experiments

ComparisonResult run_comparison(const ExperimentConfig& cfg,
                                const std::vector<double>& rho_sweep, int seeds) {
    if (seeds < 1) throw ConfigError("run_comparison: seeds must be >= 1");
    if (cfg.data.kind != "synthetic")
        throw ConfigError("run_comparison: synthetic data only");
    const Graph g = build_graph(cfg.graph);
    const CombinationMatrix A = metropolis_weights(g);
    const Laplacian lap = laplacian(A, g);
    const FeatureSpec spec = feature_spec_from(cfg.data);
    const DimMode dims =
        cfg.data.dims == "fixed" ? DimMode::Fixed : DimMode::UniformRandom;

    struct Replicate {
        std::vector<double> global_final;
        std::vector<std::vector<double>> global_curves;
        double local_final = 0.0;
        std::vector<double> local_curve;
        double noncoop_linear = 0.0;
        double noncoop_neighborhood = 0.0;
        std::vector<double> noncoop_curve;
        std::vector<long> iters;
    };
    std::vector<Replicate> reps(seeds);

    parallel_for_tasks(static_cast<std::size_t>(seeds), [&](std::size_t r) {
        const NetworkDataset ds =
            generate_synthetic(g, spec, label_assignment_from(cfg.data, g), cfg.data.N,
                               cfg.data.seed + r, dims);
        const SplitIndices split =
            train_test_split(ds.N, cfg.data.train_fraction, cfg.data.split_seed + r);
        const ClusterMap cm = build_cluster_map(g, A, ds.agent_classes);

        HyperParams hp = cfg.hyperparams();
        hp.seed = cfg.train.seed + r;

        Replicate& rep = reps[r];
        auto curve_of = [&](const RunRecord& rec) {
            std::vector<double> curve(rec.evals.size());
            if (rep.iters.empty()) {
                rep.iters.resize(rec.evals.size());
                for (std::size_t i = 0; i < rec.evals.size(); ++i)
                    rep.iters[i] = rec.evals[i].iter;
            }
            for (std::size_t i = 0; i < rec.evals.size(); ++i)
                curve[i] = rec.evals[i].avg_test_err;
            return curve;
        };

        HyperParams hp_nc = hp;
        hp_nc.rho = 0.0;
        auto [state_nc, rec_nc] =
            train_noncooperative(ds, split, hp_nc, &cm, EvalRule::Linear);
        rep.noncoop_curve = curve_of(rec_nc);
        rep.noncoop_linear = evaluate(state_nc, ds, split.test, &cm, EvalRule::Linear).average;
        rep.noncoop_neighborhood =
            evaluate(state_nc, ds, split.test, &cm, EvalRule::Neighborhood).average;

        auto [state_lc, rec_lc] = train_local_smoothing(ds, split, g, A, hp, cm);
        (void)state_lc;
        rep.local_curve = curve_of(rec_lc);
        rep.local_final = rec_lc.evals.back().avg_test_err;

        for (double rho : rho_sweep) {
            HyperParams hp_g = hp;
            hp_g.rho = rho;
            auto [state_g, rec_g] =
                train_global_smoothing(ds, split, g, A, lap, hp_g, cm);
            (void)state_g;
            rep.global_curves.push_back(curve_of(rec_g));
            rep.global_final.push_back(rec_g.evals.back().avg_test_err);
        }
    });

    ComparisonResult res;
    res.rho_sweep = rho_sweep;
    res.seeds = seeds;
    res.iterations_per_pass = static_cast<long>(
        std::floor(cfg.data.train_fraction * cfg.data.N));
    res.curve_iters = reps.front().iters;
    const double R = static_cast<double>(seeds);

    auto average_curves = [&](auto&& pick) {
        std::vector<double> mean(res.curve_iters.size(), 0.0);
        for (const Replicate& rep : reps) {
            const std::vector<double>& c = pick(rep);
            for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += c[i];
        }
        for (double& v : mean) v /= R;
        return mean;
    };

    res.noncoop_curve = average_curves([](const Replicate& r) -> const std::vector<double>& {
        return r.noncoop_curve;
    });
    res.local_curve = average_curves([](const Replicate& r) -> const std::vector<double>& {
        return r.local_curve;
    });
    for (std::size_t j = 0; j < rho_sweep.size(); ++j) {
        res.global_curves.push_back(average_curves(
            [j](const Replicate& r) -> const std::vector<double>& {
                return r.global_curves[j];
            }));
        double err = 0.0;
        for (const Replicate& rep : reps) err += rep.global_final[j];
        res.global_errors.push_back(err / R);
    }
    for (const Replicate& rep : reps) {
        res.local_error += rep.local_final;
        res.noncoop_error_linear += rep.noncoop_linear;
        res.noncoop_error_neighborhood += rep.noncoop_neighborhood;
    }
    res.local_error /= R;
    res.noncoop_error_linear /= R;
    res.noncoop_error_neighborhood /= R;

    const auto best = std::min_element(res.global_errors.begin(), res.global_errors.end());
    res.best_global_error = *best;
    res.best_rho = rho_sweep[static_cast<std::size_t>(best - res.global_errors.begin())];
    return res;
}

std::vector<std::string> reproduce_names() {
    return {"exp1-uniform", "exp2-clustered", "weather-shape"};
}

namespace {

std::string curves_csv(const ComparisonResult& res) {
    std::string out = "iter,noncoop,local";
    char buf[64];
    for (double rho : res.rho_sweep) {
        std::snprintf(buf, sizeof(buf), ",global_rho_%g", rho);
        out += buf;
    }
    out += '\n';
    for (std::size_t i = 0; i < res.curve_iters.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g", res.curve_iters[i],
                      res.noncoop_curve[i], res.local_curve[i]);
        out += buf;
        for (const auto& curve : res.global_curves) {
            std::snprintf(buf, sizeof(buf), ",%.17g", curve[i]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

nlohmann::json comparison_json(const ComparisonResult& res) {
    nlohmann::json j;
    j["seeds"] = res.seeds;
    j["iterations_per_pass"] = res.iterations_per_pass;
    j["rho_sweep"] = res.rho_sweep;
    j["global_errors"] = res.global_errors;
    j["best_rho"] = res.best_rho;
    j["best_global_error"] = res.best_global_error;
    j["local_error"] = res.local_error;
    j["noncoop_error_linear"] = res.noncoop_error_linear;
    j["noncoop_error_neighborhood"] = res.noncoop_error_neighborhood;
    return j;
}

// Canned instances: one fixed connected geometric draw per experiment (the
// two synthetic scenarios use different network instances), fixed replicate
// seed bases, published hyperparameters.
ExperimentConfig canned_synthetic_config(std::uint64_t graph_seed) {
    ExperimentConfig cfg;
    cfg.graph.kind = "geometric";
    cfg.graph.K = 50;
    cfg.graph.radius = 0.3;
    cfg.graph.seed = graph_seed;
    cfg.data.N = 200;
    cfg.data.M_max = 5;
    cfg.data.pattern = "uniform";
    cfg.data.train_fraction = 0.7;
    cfg.data.seed = 500;
    cfg.data.split_seed = 1000500;
    cfg.train.mu = 5e-3;
    cfg.train.eta = 0.1;
    cfg.train.passes = 5;
    cfg.train.seed = 2000500;
    cfg.train.eval_every = 10;
    return cfg;
}

} // namespace

std::string run_reproduce(const std::string& name, const CliOverrides& overrides) {
    const auto names = reproduce_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::string msg = "unknown experiment '" + name + "'; valid names:";
        for (const auto& n : names) msg += " " + n;
        throw ConfigError(msg);
    }

    ExperimentConfig cfg = canned_synthetic_config(name == "exp2-clustered" ? 7 : 10);
    apply_overrides(cfg, overrides);

    const fs::path out = fs::path(cfg.out_dir) / name;
    nlohmann::json report;
    report["experiment"] = name;
    std::ostringstream ss;

    if (name == "exp1-uniform" || name == "exp2-clustered") {
        if (name == "exp2-clustered") {
            cfg.data.pattern = "clustered";
            if (cfg.data.cluster_classes.empty() && cfg.data.cluster_rule.empty())
                cfg.data.cluster_rule = "x-split";
        }
        const std::vector<double> sweep{0.1, 0.5, 1.0, 5.0};
        const int seeds = 10;
        const ComparisonResult res = run_comparison(cfg, sweep, seeds);
        report["comparison"] = comparison_json(res);
        report["hyperparams"] = {{"mu", cfg.train.mu},   {"eta", cfg.train.eta},
                                 {"passes", cfg.train.passes}, {"K", cfg.graph.K},
                                 {"N", cfg.data.N},      {"M_max", cfg.data.M_max}};
        nlohmann::json verdict;
        if (name == "exp1-uniform") {
            verdict["global_best_le_local"] = res.best_global_error <= res.local_error;
            verdict["local_beats_noncoop_by_0.03"] =
                res.local_error <= res.noncoop_error_linear - 0.03;
            verdict["global_best_le_0.05"] = res.best_global_error <= 0.05;
        } else {
            verdict["global_beats_noncoop_by_0.02"] =
                res.best_global_error <= res.noncoop_error_linear - 0.02;
            verdict["local_beats_noncoop_by_0.02"] =
                res.local_error <= res.noncoop_error_linear - 0.02;
            verdict["global_error_above_0.005"] = res.best_global_error >= 0.005;
            verdict["local_error_above_0.005"] = res.local_error >= 0.005;
        }
        bool all_ok = true;
        for (const auto& [key, value] : verdict.items()) all_ok &= value.get<bool>();
        verdict["all"] = all_ok;
        report["verdict"] = verdict;
        write_text(out / "curves.csv", curves_csv(res));
        write_text(out / "report.json", report.dump(2) + "\n");

        ss << name << " over " << seeds << " seeds:\n"
           << "  noncoop (linear rule):        " << res.noncoop_error_linear << "\n"
           << "  local smoothing:              " << res.local_error << "\n"
           << "  global smoothing (best rho=" << res.best_rho
           << "): " << res.best_global_error << "\n"
           << "  ordering verdict: " << (all_ok ? "PASS" : "FAIL") << "\nwrote "
           << (out / "report.json").string() << ", curves.csv";
        return ss.str();
    }

    // weather-shape: synthetic stand-in exercised through the CSV ingestion path
    cfg.graph.kind = "knn";
    cfg.graph.K = 139;
    cfg.graph.k_neighbors = 6;
    cfg.data.N = 3288;
    cfg.data.M_max = 5;
    cfg.data.dims = "fixed";
    cfg.data.pattern = "uniform";
    cfg.train.mu = 3e-4;
    cfg.train.eta = 1e-5;
    cfg.train.rho = 0.3;
    cfg.train.passes = 2;
    cfg.train.eval_every = 200;

    const int seeds = 5;
    const Graph g = build_graph(cfg.graph);
    const CombinationMatrix A = metropolis_weights(g);
    const Laplacian lap = laplacian(A, g);
    const FeatureSpec spec = feature_spec_from(cfg.data);

    // seed 0 goes to disk and back to prove the ingestion pipeline round-trips
    const NetworkDataset ds0 = generate_synthetic(g, spec, LabelAssignment::uniform(),
                                                  cfg.data.N, cfg.data.seed, DimMode::Fixed);
    const std::string manifest =
        export_network_csv(ds0, g.coords, (out / "standin").string());
    const LoadedNetwork loaded = load_network_csv(manifest);
    bool roundtrip_ok = loaded.ds.N == ds0.N && loaded.ds.K() == ds0.K();
    for (int k = 0; roundtrip_ok && k < ds0.K(); ++k) {
        roundtrip_ok = loaded.ds.agents[k].labels == ds0.agents[k].labels &&
                       loaded.ds.agents[k].features == ds0.agents[k].features;
    }
    if (!roundtrip_ok)
        throw ConfigError("weather-shape: ingestion round-trip mismatch");

    std::vector<double> coop(seeds), noncoop(seeds);
    parallel_for_tasks(static_cast<std::size_t>(seeds), [&](std::size_t r) {
        const NetworkDataset ds =
            r == 0 ? loaded.ds
                   : generate_synthetic(g, spec, LabelAssignment::uniform(), cfg.data.N,
                                        cfg.data.seed + r, DimMode::Fixed);
        const SplitIndices split =
            train_test_split(ds.N, cfg.data.train_fraction, cfg.data.split_seed + r);
        ClusterMap cm = build_cluster_map(g, A, std::vector<int>(g.K, +1));
        HyperParams hp = cfg.hyperparams();
        hp.seed = cfg.train.seed + r;

        auto [state_g, rec_g] = train_global_smoothing(ds, split, g, A, lap, hp, cm);
        (void)rec_g;
        coop[r] = evaluate(state_g, ds, split.test, &cm, EvalRule::Neighborhood).average;

        HyperParams hp_nc = hp;
        hp_nc.rho = 0.0;
        auto [state_nc, rec_nc] = train_noncooperative(ds, split, hp_nc);
        (void)rec_nc;
        noncoop[r] = evaluate(state_nc, ds, split.test, nullptr, EvalRule::Linear).average;
    });
    const double coop_mean = std::accumulate(coop.begin(), coop.end(), 0.0) / seeds;
    const double noncoop_mean =
        std::accumulate(noncoop.begin(), noncoop.end(), 0.0) / seeds;

    report["note"] =
        "synthetic stand-in of the sensor-network shape (K=139, 6-NN, N=3288, M=5); "
        "the published reference errors (0.2001 non-cooperative, 0.1851 cooperative) "
        "require the original station recordings, which are not bundled";
    report["roundtrip_ok"] = roundtrip_ok;
    report["seeds"] = seeds;
    report["coop_error_neighborhood"] = coop_mean;
    report["noncoop_error_linear"] = noncoop_mean;
    report["hyperparams"] = {{"mu", cfg.train.mu}, {"eta", cfg.train.eta},
                             {"rho", cfg.train.rho}, {"passes", cfg.train.passes}};
    report["verdict"] = {{"coop_le_noncoop", coop_mean <= noncoop_mean}};
    write_text(out / "report.json", report.dump(2) + "\n");

    ss << "weather-shape stand-in over " << seeds << " seeds:\n"
       << "  ingestion round-trip: " << (roundtrip_ok ? "exact" : "MISMATCH") << "\n"
       << "  cooperative (rho=0.3):  " << coop_mean << "\n"
       << "  non-cooperative:        " << noncoop_mean << "\n"
       << "  ordering verdict: " << (coop_mean <= noncoop_mean ? "PASS" : "FAIL")
       << "\nnote: published reference errors require the original station recordings"
       << "\nwrote " << (out / "report.json").string();
    return ss.str();
}

} // namespace netsmooth
