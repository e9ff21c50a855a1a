#pragma once

#include "broil/environments.hpp"
#include "broil/mdp.hpp"
#include "broil/posterior.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

/**
 * JSON schemas (all matrices are arrays of rows):
 *
 * MDP
 *   { "num_states": S, "num_actions": A, "gamma": g, "p0": [S],
 *     "transitions": [A][S][S], "features": [S*A][k] }
 *   Feature rows follow the action-major order index(s, a) = a*S + s.
 *   Each transition matrix may also be given flat, row-major, length S*S.
 *
 * Posterior
 *   { "weights": [k][N] (optional), "rewards": [S*A][N], "probs": [N],
 *     "metadata": {...} }
 *
 * Entry prior
 *   { "type": "constant", "value": v }
 *   { "type": "normal", "mean": m, "stddev": s }
 *   { "type": "negated_gamma", "shape": k, "scale": theta }
 *
 * Machine replacement spec
 *   { "type": "machine_replacement", "num_states": S, "gamma": g, "seed": n,
 *     "num_posterior_samples": N, "repair": [prior x S], "do_nothing": [prior x S] }
 *
 * Gridworld spec
 *   { "type": "gridworld", "rows": ["WWWWW", ...], "gamma": g,
 *     "initial": "white" | "non_terminal",
     "demonstrations": [[[s, a], ...], ...] (optional, read by the CLI) }
   Without "demonstrations" the CLI uses the built-in demonstration.
 */
namespace broil::io {

using nlohmann::json;

json matrix_to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const json& j);
json vector_to_json(const VectorXd& v);
VectorXd vector_from_json(const json& j);

json mdp_to_json(const TabularMDP& mdp);
TabularMDP mdp_from_json(const json& j);

json posterior_to_json(const RewardPosterior& posterior, const json& metadata = json::object());
RewardPosterior posterior_from_json(const json& j);

json prior_to_json(const EntryPrior& prior);
EntryPrior prior_from_json(const json& j);

json machine_replacement_to_json(const MachineReplacementSpec& spec);
MachineReplacementSpec machine_replacement_from_json(const json& j);

json gridworld_to_json(const GridworldSpec& spec);
GridworldSpec gridworld_from_json(const json& j);

json policy_to_json(const StochasticPolicy& policy);

/// Human-readable policy grid: argmax arrows followed by the full probability table.
std::string gridworld_policy_table(const GridworldSpec& spec, const StochasticPolicy& policy);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

} // namespace broil::io
