// Command-line experiment runner: frontier sweeps, sorted return distributions,
// LP timing benchmarks, Bayesian IRL posteriors and single policy solves.
//
// Exit codes: 0 success, 1 runtime or I/O failure, 2 invalid arguments or configuration.

#include "broil/baselines.hpp"
#include "broil/broil.hpp"
#include "broil/environments.hpp"
#include "broil/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using broil::io::json;
namespace fs = std::filesystem;
using broil::VectorXd;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string environment = "machine_replacement"; ///< keyword or path to an environment JSON
    json environment_inline;                          ///< set when a config file embeds the environment
    fs::path base_dir = ".";                          ///< relative paths in a config file resolve here
    std::string algorithm;
    std::optional<double> alpha;
    std::optional<double> lambda;
    std::vector<double> lambdas;
    std::vector<std::string> algorithms;
    std::string measure = "return";
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    std::string posterior_path;
    broil::BirlConfig birl;
    broil::MaxEntConfig maxent;
    // bench
    std::vector<long> bench_states{10, 50, 100};
    std::vector<long> bench_samples{200, 2000};
    std::size_t bench_trials = 20;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

std::string default_output_dir() {
    if (const char* env = std::getenv("BROIL_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
    return "results";
}

void apply_config_file(ExperimentConfig& cfg, const fs::path& path) {
    const json j = broil::io::read_json_file(path);
    if (!j.is_object()) throw UsageError("config " + path.string() + ": expected a JSON object");
    cfg.base_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    try {
        if (j.contains("environment")) {
            const auto& env = j.at("environment");
            if (env.is_object())
                cfg.environment_inline = env;
            else
                cfg.environment = env.get<std::string>();
        }
        if (j.contains("algorithm")) cfg.algorithm = j.at("algorithm").get<std::string>();
        if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
        if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
        if (j.contains("lambdas")) cfg.lambdas = j.at("lambdas").get<std::vector<double>>();
        if (j.contains("algorithms")) cfg.algorithms = j.at("algorithms").get<std::vector<std::string>>();
        if (j.contains("measure")) cfg.measure = j.at("measure").get<std::string>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("posterior")) cfg.posterior_path = (cfg.base_dir / j.at("posterior").get<std::string>()).string();
        if (j.contains("birl")) {
            const auto& b = j.at("birl");
            cfg.birl.beta = b.value("beta", cfg.birl.beta);
            cfg.birl.proposal_std = b.value("proposal_std", cfg.birl.proposal_std);
            cfg.birl.burn_in = b.value("burn_in", cfg.birl.burn_in);
            cfg.birl.skip = b.value("skip", cfg.birl.skip);
            cfg.birl.num_samples = b.value("num_samples", cfg.birl.num_samples);
            cfg.birl.seed = b.value("seed", cfg.birl.seed);
        }
        if (j.contains("maxent")) {
            const auto& m = j.at("maxent");
            cfg.maxent.beta = m.value("beta", cfg.maxent.beta);
            cfg.maxent.learning_rate = m.value("learning_rate", cfg.maxent.learning_rate);
            cfg.maxent.horizon = m.value("horizon", cfg.maxent.horizon);
            cfg.maxent.convergence_eps = m.value("convergence_eps", cfg.maxent.convergence_eps);
            cfg.maxent.max_iters = m.value("max_iters", cfg.maxent.max_iters);
            cfg.maxent.seed = m.value("seed", cfg.maxent.seed);
        }
        if (j.contains("bench")) {
            const auto& b = j.at("bench");
            cfg.bench_states = b.value("states", cfg.bench_states);
            cfg.bench_samples = b.value("samples", cfg.bench_samples);
            cfg.bench_trials = b.value("trials", cfg.bench_trials);
        }
    } catch (const json::exception& e) {
        throw UsageError("config " + path.string() + ": " + e.what());
    }
}

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw UsageError("invalid parameter alpha = " + std::to_string(alpha) + ": alpha must lie in [0, 1)");
}

void check_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw UsageError("invalid parameter lambda = " + std::to_string(lambda) + ": lambda must lie in [0, 1]");
}

// ---------------------------------------------------------------------------
// Environment and posterior
// ---------------------------------------------------------------------------

struct Environment {
    bool is_gridworld = false;
    broil::MachineReplacementSpec machine;
    broil::GridworldSpec grid;
    std::vector<broil::Demonstration> demos;
    broil::TabularMDP mdp;
    json spec_json;
};

std::vector<broil::Demonstration> demos_from_json(const json& j, Eigen::Index num_states) {
    std::vector<broil::Demonstration> demos;
    for (const auto& trajectory : j) {
        broil::Demonstration demo;
        for (const auto& step : trajectory) {
            const auto s = step.at(0).get<Eigen::Index>();
            const auto a = step.at(1).get<Eigen::Index>();
            if (s < 0 || s >= num_states || a < 0 || a >= broil::kGridActions)
                throw UsageError("demonstration step out of range");
            demo.steps.emplace_back(s, a);
        }
        if (demo.steps.empty()) throw UsageError("empty demonstration");
        demos.push_back(std::move(demo));
    }
    return demos;
}

Environment load_environment(const ExperimentConfig& cfg) {
    json spec;
    if (!cfg.environment_inline.is_null()) {
        spec = cfg.environment_inline;
    } else if (cfg.environment == "machine_replacement" || cfg.environment == "machine-replacement") {
        spec = broil::io::machine_replacement_to_json(broil::default_machine_replacement_spec());
    } else if (cfg.environment == "gridworld") {
        spec = broil::io::gridworld_to_json(broil::default_gridworld_spec());
    } else {
        fs::path path = cfg.environment;
        if (path.is_relative() && !fs::exists(path)) path = cfg.base_dir / path;
        spec = broil::io::read_json_file(path);
    }

    Environment env;
    env.spec_json = spec;
    try {
        const auto type = spec.value("type", std::string("machine_replacement"));
        if (type == "machine_replacement") {
            env.machine = broil::io::machine_replacement_from_json(spec);
            env.mdp = broil::machine_replacement_mdp(env.machine);
        } else if (type == "gridworld") {
            env.is_gridworld = true;
            env.grid = broil::io::gridworld_from_json(spec);
            env.mdp = broil::build_gridworld(env.grid);
            env.demos = spec.contains("demonstrations")
                            ? demos_from_json(spec.at("demonstrations"), env.mdp.num_states)
                            : std::vector<broil::Demonstration>{broil::default_demonstration(env.grid)};
        } else {
            throw UsageError("environment type must be 'machine_replacement' or 'gridworld', got '" + type + "'");
        }
    } catch (const json::exception& e) {
        throw UsageError(std::string("environment: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("environment: ") + e.what());
    }
    return env;
}

struct PosteriorRun {
    broil::RewardPosterior posterior;
    json metadata;
};

PosteriorRun acquire_posterior(const Environment& env, const ExperimentConfig& cfg) {
    PosteriorRun run;
    if (!cfg.posterior_path.empty()) {
        const json j = broil::io::read_json_file(cfg.posterior_path);
        run.posterior = broil::io::posterior_from_json(j);
        run.posterior.validate(env.mdp);
        run.metadata = j.value("metadata", json::object());
        return run;
    }
    if (!env.is_gridworld) {
        auto spec = env.machine;
        if (cfg.seed) spec.seed = *cfg.seed;
        run.posterior = broil::build_machine_replacement(spec).second;
        run.metadata = {{"source", "prior"}, {"seed", spec.seed}, {"num_samples", spec.num_posterior_samples}};
        return run;
    }
    auto birl = cfg.birl;
    if (cfg.seed) birl.seed = *cfg.seed;
    const auto result = broil::birl_mcmc(env.mdp, env.demos, birl);
    run.posterior = result.posterior;
    run.metadata = {{"source", "birl"},
                    {"seed", birl.seed},
                    {"beta", birl.beta},
                    {"proposal_std", birl.proposal_std},
                    {"burn_in", birl.burn_in},
                    {"skip", birl.skip},
                    {"num_samples", birl.num_samples},
                    {"proposals", result.proposals},
                    {"accepted", result.accepted},
                    {"accept_ratio", result.accept_ratio()}};
    return run;
}

double default_alpha(const Environment& env) { return env.is_gridworld ? 0.95 : 0.99; }

std::string default_algorithm(const Environment& env) { return env.is_gridworld ? "broil-regret" : "broil-robust"; }

broil::ObjectiveKind objective_for(const std::string& algorithm, const Environment& env,
                                   const broil::RewardPosterior& posterior) {
    if (algorithm == "broil-robust") return broil::RobustObjective{};
    if (algorithm == "broil-regret") {
        if (env.demos.empty()) throw UsageError("broil-regret needs demonstrations (gridworld environments only)");
        if (!posterior.weights) throw UsageError("broil-regret needs a posterior with weight samples");
        return broil::BaselineRegretFeatures{broil::empirical_expert_feature_counts(env.demos, env.mdp)};
    }
    throw UsageError("unknown BROIL algorithm '" + algorithm + "'");
}

struct PolicyRun {
    broil::StochasticPolicy policy;
    broil::OccupancyVector u;
    json summary;
};

PolicyRun run_algorithm(const std::string& algorithm, double lambda, double alpha, const Environment& env,
                        const broil::RewardPosterior& posterior, const ExperimentConfig& cfg) {
    PolicyRun run;
    if (algorithm == "broil-robust" || algorithm == "broil-regret") {
        const auto sol = broil::solve_broil(env.mdp, posterior, alpha, lambda, objective_for(algorithm, env, posterior));
        run.policy = sol.policy;
        run.u = sol.u;
        run.summary = {{"objective_value", sol.objective_value},
                       {"expected_psi", sol.expected_psi},
                       {"cvar_psi", sol.cvar_psi},
                       {"sigma_star", sol.sigma_star},
                       {"lambda", lambda},
                       {"alpha", alpha}};
    } else if (algorithm == "mean-reward") {
        const auto sol = broil::solve_max_return(env.mdp, posterior.mean_reward());
        run.policy = sol.policy;
        run.u = sol.u;
        run.summary = {{"expected_return", sol.value}};
    } else if (algorithm == "lpal") {
        if (env.demos.empty()) throw UsageError("lpal needs demonstrations (gridworld environments only)");
        const auto sol = broil::lpal(env.mdp, broil::empirical_expert_feature_counts(env.demos, env.mdp));
        run.policy = sol.policy;
        run.u = sol.u;
        run.summary = {{"b_star", sol.b_star}};
    } else if (algorithm == "maxent") {
        if (env.demos.empty()) throw UsageError("maxent needs demonstrations (gridworld environments only)");
        auto mc = cfg.maxent;
        if (cfg.seed) mc.seed = *cfg.seed;
        const auto result = broil::maxent_irl(env.mdp, env.demos, mc);
        run.policy = broil::maxent_policy(env.mdp, result.weights, mc.beta, mc.horizon);
        run.u = broil::occupancy_from_policy(env.mdp, run.policy);
        run.summary = {{"weights", broil::io::vector_to_json(result.weights)},
                       {"iterations", result.iterations},
                       {"converged", result.converged}};
    } else {
        throw UsageError("unknown algorithm '" + algorithm +
                         "' (expected broil-robust, broil-regret, maxent, lpal or mean-reward)");
    }
    return run;
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

fs::path output_dir(const ExperimentConfig& cfg) {
    return cfg.output_dir.empty() ? fs::path(default_output_dir()) : fs::path(cfg.output_dir);
}

void write_output(const fs::path& path, const std::string& contents) {
    broil::io::write_text_file(path, contents);
    std::cout << "wrote " << path.string() << '\n';
}

std::string lambda_label(double lambda) {
    std::string s = fmt(lambda);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

void run_frontier(const ExperimentConfig& cfg) {
    const auto env = load_environment(cfg);
    const double alpha = cfg.alpha.value_or(default_alpha(env));
    check_alpha(alpha);
    std::vector<double> lambdas = cfg.lambdas;
    if (lambdas.empty())
        for (int i = 0; i <= 10; ++i) lambdas.push_back(i / 10.0);
    for (const double l : lambdas) check_lambda(l);
    const auto algorithm = cfg.algorithm.empty() ? default_algorithm(env) : cfg.algorithm;

    const auto run = acquire_posterior(env, cfg);
    const auto kind = objective_for(algorithm, env, run.posterior);
    const auto points = broil::frontier(env.mdp, run.posterior, alpha, lambdas, kind);

    std::ostringstream csv;
    csv << "lambda,expected_psi,cvar_psi,sigma_star\n";
    for (const auto& p : points)
        csv << fmt(p.lambda) << ',' << fmt(p.expected_psi) << ',' << fmt(p.cvar_psi) << ',' << fmt(p.sigma_star) << '\n';
    write_output(output_dir(cfg) / "frontier.csv", csv.str());
}

void run_returns(const ExperimentConfig& cfg) {
    const auto env = load_environment(cfg);
    const double alpha = cfg.alpha.value_or(default_alpha(env));
    check_alpha(alpha);
    if (cfg.measure != "return" && cfg.measure != "regret")
        throw UsageError("invalid parameter measure = '" + cfg.measure + "': expected 'return' or 'regret'");
    std::vector<double> lambdas = cfg.lambdas.empty() ? std::vector<double>{0.0, 1.0} : cfg.lambdas;
    for (const double l : lambdas) check_lambda(l);
    std::vector<std::string> algorithms = cfg.algorithms;
    if (algorithms.empty()) {
        algorithms = {default_algorithm(env), "mean-reward"};
        if (env.is_gridworld) algorithms.insert(algorithms.end(), {"maxent", "lpal", "demonstrator"});
    }

    const auto run = acquire_posterior(env, cfg);
    const auto& posterior = run.posterior;
    broil::ObjectiveKind measure_kind = broil::RobustObjective{};
    if (cfg.measure == "regret") measure_kind = objective_for("broil-regret", env, posterior);

    std::vector<std::pair<std::string, VectorXd>> columns;
    auto add_column = [&](const std::string& name, VectorXd values) {
        std::sort(values.begin(), values.end());
        columns.emplace_back(name, std::move(values));
    };
    for (const auto& algorithm : algorithms) {
        if (algorithm == "demonstrator") {
            if (!posterior.weights || env.demos.empty())
                throw UsageError("demonstrator column needs demonstrations and posterior weight samples");
            const VectorXd mu = broil::empirical_expert_feature_counts(env.demos, env.mdp);
            VectorXd values = posterior.weights->transpose() * mu;
            if (cfg.measure == "regret") values.setZero();
            add_column("demonstrator", values);
        } else if (algorithm == "broil-robust" || algorithm == "broil-regret") {
            for (const double l : lambdas) {
                const auto pr = run_algorithm(algorithm, l, alpha, env, posterior, cfg);
                std::string name = algorithm + "_lambda_" + lambda_label(l);
                std::replace(name.begin(), name.end(), '-', '_');
                add_column(name, broil::evaluate_psi(pr.u, posterior, measure_kind));
            }
        } else {
            const auto pr = run_algorithm(algorithm, 0.0, alpha, env, posterior, cfg);
            std::string name = algorithm;
            std::replace(name.begin(), name.end(), '-', '_');
            add_column(name, broil::evaluate_psi(pr.u, posterior, measure_kind));
        }
    }

    std::ostringstream csv;
    for (std::size_t c = 0; c < columns.size(); ++c) csv << (c ? "," : "") << columns[c].first;
    csv << '\n';
    for (Eigen::Index i = 0; i < posterior.size(); ++i) {
        for (std::size_t c = 0; c < columns.size(); ++c) csv << (c ? "," : "") << fmt(columns[c].second(i));
        csv << '\n';
    }
    write_output(output_dir(cfg) / "returns.csv", csv.str());
}

void run_bench(const ExperimentConfig& cfg) {
    const double alpha = cfg.alpha.value_or(0.99);
    const double lambda = cfg.lambda.value_or(0.5);
    check_alpha(alpha);
    check_lambda(lambda);
    if (cfg.bench_states.empty() || cfg.bench_samples.empty() || cfg.bench_trials == 0)
        throw UsageError("bench needs nonempty --states and --samples grids and --trials >= 1");
    for (const long s : cfg.bench_states)
        if (s < 2) throw UsageError("invalid parameter states: every entry must be >= 2");
    for (const long n : cfg.bench_samples)
        if (n < 1) throw UsageError("invalid parameter samples: every entry must be >= 1");
    const std::uint64_t seed = cfg.seed.value_or(0);

    const fs::path path = output_dir(cfg) / "bench.csv";
    std::ostringstream csv;
    csv << "num_states,num_samples,trial,seconds\n";
    for (const long states : cfg.bench_states) {
        for (const long samples : cfg.bench_samples) {
            for (std::size_t trial = 0; trial < cfg.bench_trials; ++trial) {
                auto spec = broil::default_machine_replacement_spec(states);
                spec.num_posterior_samples = static_cast<std::size_t>(samples);
                spec.seed = seed + trial;
                const auto [mdp, posterior] = broil::build_machine_replacement(spec);
                const auto start = std::chrono::steady_clock::now();
                broil::solve_broil(mdp, posterior, alpha, lambda, broil::RobustObjective{});
                const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                csv << states << ',' << samples << ',' << trial << ',' << fmt(seconds) << '\n';
                std::cerr << "states=" << states << " samples=" << samples << " trial=" << trial << " seconds=" << fmt(seconds)
                          << '\n';
            }
        }
    }
    write_output(path, csv.str());
}

void run_birl_command(const ExperimentConfig& cfg) {
    const auto env = load_environment(cfg);
    if (!env.is_gridworld) throw UsageError("birl needs a gridworld environment with demonstrations");
    auto birl = cfg.birl;
    if (cfg.seed) birl.seed = *cfg.seed;
    try {
        birl.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    ExperimentConfig local = cfg;
    local.birl = birl;
    local.posterior_path.clear();
    const auto run = acquire_posterior(env, local);

    const fs::path dir = output_dir(cfg);
    write_output(dir / "posterior.json", broil::io::posterior_to_json(run.posterior, run.metadata).dump(2) + "\n");
    json diagnostics = run.metadata;
    diagnostics["chain_length"] = run.metadata.at("proposals");
    std::cout << "accept_ratio " << fmt(run.metadata.at("accept_ratio").get<double>()) << '\n';
    write_output(dir / "birl_diagnostics.json", diagnostics.dump(2) + "\n");
}

void run_solve(const ExperimentConfig& cfg) {
    const auto env = load_environment(cfg);
    const double alpha = cfg.alpha.value_or(default_alpha(env));
    const double lambda = cfg.lambda.value_or(0.0);
    check_alpha(alpha);
    check_lambda(lambda);
    const auto algorithm = cfg.algorithm.empty() ? default_algorithm(env) : cfg.algorithm;

    const auto posterior_run = acquire_posterior(env, cfg);
    const auto run = run_algorithm(algorithm, lambda, alpha, env, posterior_run.posterior, cfg);

    json out = broil::io::policy_to_json(run.policy);
    out["algorithm"] = algorithm;
    out["summary"] = run.summary;
    out["occupancy"] = broil::io::vector_to_json(run.u.values);
    const fs::path dir = output_dir(cfg);
    write_output(dir / "policy.json", out.dump(2) + "\n");
    if (env.is_gridworld) {
        std::ostringstream table;
        table << broil::io::gridworld_policy_table(env.grid, run.policy);
        table << "red occupancy " << fmt(broil::red_occupancy(env.grid, run.u)) << '\n';
        write_output(dir / "policy_table.txt", table.str());
        std::cout << table.str();
    }
    std::cout << run.summary.dump() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soft-robust policy optimization under reward uncertainty"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string config_path;
    double alpha = 0.0;
    double lambda = 0.0;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON experiment config; its fields override the flags");
        sub->add_option("--env", cfg.environment, "machine_replacement, gridworld, or a path to an environment JSON");
        sub->add_option("--seed", seed, "seed for posterior sampling, BIRL and MaxEnt");
        sub->add_option("--output-dir", cfg.output_dir, "output directory (default $BROIL_OUTPUT_DIR or ./results)");
        sub->add_option("--posterior", cfg.posterior_path, "posterior JSON to use instead of sampling one");
        sub->add_option("--birl-samples", cfg.birl.num_samples, "retained BIRL samples");
        sub->add_option("--birl-burn-in", cfg.birl.burn_in, "BIRL burn-in proposals");
        sub->add_option("--birl-skip", cfg.birl.skip, "BIRL thinning interval");
        sub->add_option("--birl-beta", cfg.birl.beta, "BIRL Boltzmann inverse temperature");
        sub->add_option("--birl-proposal-std", cfg.birl.proposal_std, "BIRL proposal standard deviation");
    };

    auto* frontier = app.add_subcommand("frontier", "sweep lambda and write frontier.csv");
    add_common(frontier);
    frontier->add_option("--algorithm", cfg.algorithm, "broil-robust or broil-regret");
    frontier->add_option("--alpha", alpha, "CVaR level in [0, 1)");
    frontier->add_option("--lambdas", cfg.lambdas, "lambda grid (default 0, 0.1, ..., 1)")->delimiter(',');

    auto* returns = app.add_subcommand("returns", "write sorted per-sample returns for several algorithms");
    add_common(returns);
    returns->add_option("--algorithms", cfg.algorithms,
                        "broil-robust, broil-regret, maxent, lpal, mean-reward, demonstrator")
        ->delimiter(',');
    returns->add_option("--alpha", alpha, "CVaR level in [0, 1)");
    returns->add_option("--lambdas", cfg.lambdas, "lambda values for BROIL columns (default 0,1)")->delimiter(',');
    returns->add_option("--measure", cfg.measure, "return (R^T u) or regret (R^T u - W^T mu_E)");

    auto* bench = app.add_subcommand("bench", "time BROIL LP solves on machine-replacement chains");
    bench->add_option("--config", config_path, "JSON experiment config; its fields override the flags");
    bench->add_option("--states", cfg.bench_states, "state-count grid")->delimiter(',');
    bench->add_option("--samples", cfg.bench_samples, "posterior-size grid")->delimiter(',');
    bench->add_option("--trials", cfg.bench_trials, "trials per grid cell");
    bench->add_option("--alpha", alpha, "CVaR level in [0, 1)");
    bench->add_option("--lambda", lambda, "lambda in [0, 1]");
    bench->add_option("--seed", seed, "base seed; trial t uses seed + t");
    bench->add_option("--output-dir", cfg.output_dir, "output directory (default $BROIL_OUTPUT_DIR or ./results)");

    auto* birl = app.add_subcommand("birl", "run Bayesian IRL and write posterior.json and birl_diagnostics.json");
    add_common(birl);

    auto* solve = app.add_subcommand("solve", "solve one policy and write policy.json");
    add_common(solve);
    solve->add_option("--algorithm", cfg.algorithm, "broil-robust, broil-regret, maxent, lpal or mean-reward");
    solve->add_option("--alpha", alpha, "CVaR level in [0, 1)");
    solve->add_option("--lambda", lambda, "lambda in [0, 1]");

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
        for (auto* sub : app.get_subcommands()) {
            auto given = [sub](const char* name) {
                const auto* opt = sub->get_option_no_throw(name);
                return opt != nullptr && opt->count() > 0;
            };
            if (given("--alpha")) cfg.alpha = alpha;
            if (given("--lambda")) cfg.lambda = lambda;
            if (given("--seed")) cfg.seed = seed;
        }
        if (!config_path.empty()) apply_config_file(cfg, config_path);

        if (frontier->parsed()) run_frontier(cfg);
        if (returns->parsed()) run_returns(cfg);
        if (bench->parsed()) run_bench(cfg);
        if (birl->parsed()) run_birl_command(cfg);
        if (solve->parsed()) run_solve(cfg);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
