#pragma once

#include "broil/mdp.hpp"
#include "broil/posterior.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace broil {

// ---------------------------------------------------------------------------
// Machine replacement
//
// States 0..S-1 are machine ages. Action 0 (do nothing) ages the machine by
// one step, the oldest state loops on itself. Action 1 (replace) sends the
// machine back to state 0. Rewards are negated costs drawn from per-state
// priors; features are the identity so each pair carries its own sample.
// ---------------------------------------------------------------------------

inline constexpr Eigen::Index kDoNothing = 0;
inline constexpr Eigen::Index kReplace = 1;

struct MachineReplacementSpec {
    Eigen::Index num_states = 4;
    double gamma = 0.95;
    std::vector<EntryPrior> repair_reward;     ///< one per state
    std::vector<EntryPrior> do_nothing_reward; ///< one per state
    std::uint64_t seed = 0;
    std::size_t num_posterior_samples = 2000;

    void validate() const;
};

/// Default cost model: repair ~ -Normal(130, 20); do nothing ~ -Gamma with tails that widen with age.
/// Chains longer or shorter than 4 reuse the four age profiles by age quartile.
MachineReplacementSpec default_machine_replacement_spec(Eigen::Index num_states = 4);

TabularMDP machine_replacement_mdp(const MachineReplacementSpec& spec);

std::pair<TabularMDP, RewardPosterior> build_machine_replacement(const MachineReplacementSpec& spec);

// ---------------------------------------------------------------------------
// Two-feature gridworld with an absorbing goal.
// ---------------------------------------------------------------------------

enum class CellLabel { White, Red, Terminal };

enum class GridAction : Eigen::Index { Up = 0, Down = 1, Left = 2, Right = 3 };
inline constexpr Eigen::Index kGridActions = 4;

/// Where the initial state distribution puts mass.
enum class InitialCells { White, NonTerminal };

struct GridworldSpec {
    Eigen::Index width = 0;
    Eigen::Index height = 0;
    std::vector<CellLabel> cells; ///< row-major, row 0 at the top
    Eigen::Index terminal_row = 0;
    Eigen::Index terminal_col = 0;
    double gamma = 0.95;
    InitialCells initial = InitialCells::White;

    Eigen::Index state(Eigen::Index row, Eigen::Index col) const { return row * width + col; }
    CellLabel label(Eigen::Index state) const { return cells[static_cast<std::size_t>(state)]; }
    void validate() const;
    bool operator==(const GridworldSpec&) const = default;
};

/// Parses rows such as "WWRRT" (W white, R red, T terminal).
GridworldSpec gridworld_from_rows(const std::vector<std::string>& rows, double gamma = 0.95,
                                  InitialCells initial = InitialCells::White);

/// 5 x 4 layout: a red band separates the top row from the lower corridor, terminal bottom-right.
GridworldSpec default_gridworld_spec();

/// Features: column 0 white, column 1 red; the terminal row is all zero.
TabularMDP build_gridworld(const GridworldSpec& spec);

/// The single demonstration on the default layout; throws for any other layout.
Demonstration default_demonstration(const GridworldSpec& spec);

/// Discounted occupancy on red cells (all actions).
double red_occupancy(const GridworldSpec& spec, const OccupancyVector& u);

char action_arrow(Eigen::Index action);

} // namespace broil
