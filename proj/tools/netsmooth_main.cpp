#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "netsmooth/config.hpp"
#include "netsmooth/errors.hpp"
#include "netsmooth/experiment.hpp"

namespace {

struct CliState {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::int64_t> seed;
    std::optional<std::string> grad_mode;
    bool paper_literal_alg1 = false;

    netsmooth::CliOverrides overrides() const {
        netsmooth::CliOverrides ov;
        ov.out_dir = out_dir;
        if (seed) {
            if (*seed < 0) throw netsmooth::ConfigError("--seed must be >= 0");
            ov.seed = static_cast<std::uint64_t>(*seed);
        }
        ov.grad_mode = grad_mode;
        ov.paper_literal_alg1 = paper_literal_alg1;
        return ov;
    }

    netsmooth::ExperimentConfig load() const {
        netsmooth::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = netsmooth::parse_config_file(config_path);
        netsmooth::apply_overrides(cfg, overrides());
        return cfg;
    }
};

void add_common_options(CLI::App* cmd, CliState& state) {
    cmd->add_option("--config", state.config_path, "experiment config file (TOML-style)");
    cmd->add_option("--out", state.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", state.seed, "run seed (overrides train.seed)");
    cmd->add_option("--grad-mode", state.grad_mode, "local-smoothing gradient scope")
        ->check(CLI::IsMember({"own-term", "full"}));
    cmd->add_flag("--paper-literal-alg1", state.paper_literal_alg1,
                  "use the legacy global-smoothing update g' = g - mu*rho*sum(...)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"netsmooth: cooperative classification over heterogeneous agent networks"};
    app.require_subcommand(1);

    CliState state;
    std::string eval_state_path, eval_rule = "both", reproduce_name;

    CLI::App* gen_graph = app.add_subcommand(
        "gen-graph", "generate a topology with combination and Laplacian matrices");
    add_common_options(gen_graph, state);

    CLI::App* gen_data =
        app.add_subcommand("gen-data", "generate a synthetic dataset and export it as CSV");
    add_common_options(gen_data, state);

    CLI::App* train = app.add_subcommand("train", "run one training configuration");
    add_common_options(train, state);

    CLI::App* eval = app.add_subcommand("eval", "evaluate a saved classifier state");
    add_common_options(eval, state);
    eval->add_option("--state", eval_state_path, "state JSON produced by train")
        ->required();
    eval->add_option("--rule", eval_rule, "prediction rule")
        ->check(CLI::IsMember({"linear", "neighborhood", "both"}));

    CLI::App* diagnose = app.add_subcommand(
        "diagnose", "reference optimum, deviation curves, and contraction diagnostics");
    add_common_options(diagnose, state);

    CLI::App* reproduce =
        app.add_subcommand("reproduce", "run a canned experiment end to end");
    add_common_options(reproduce, state);
    reproduce->add_option("name", reproduce_name, "experiment name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::string summary;
        if (gen_graph->parsed()) {
            summary = netsmooth::run_gen_graph(state.load());
        } else if (gen_data->parsed()) {
            summary = netsmooth::run_gen_data(state.load());
        } else if (train->parsed()) {
            summary = netsmooth::run_train(state.load());
        } else if (eval->parsed()) {
            summary = netsmooth::run_eval(state.load(), eval_state_path, eval_rule);
        } else if (diagnose->parsed()) {
            summary = netsmooth::run_diagnose(state.load());
        } else if (reproduce->parsed()) {
            summary = netsmooth::run_reproduce(reproduce_name, state.overrides());
        }
        std::cout << summary << std::endl;
        return 0;
    } catch (const netsmooth::DivergedError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 3;
    } catch (const netsmooth::MissingDataError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 4;
    } catch (const netsmooth::ConfigError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
