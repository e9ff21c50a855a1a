#include "broil/environments.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace broil {

void MachineReplacementSpec::validate() const {
    if (num_states < 2) throw std::invalid_argument("machine replacement: need at least 2 states");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("machine replacement: gamma must lie in [0, 1)");
    if (static_cast<Eigen::Index>(repair_reward.size()) != num_states ||
        static_cast<Eigen::Index>(do_nothing_reward.size()) != num_states)
        throw std::invalid_argument("machine replacement: need one prior per state for each action");
    for (const auto& p : repair_reward) validate_prior(p);
    for (const auto& p : do_nothing_reward) validate_prior(p);
    if (num_posterior_samples == 0) throw std::invalid_argument("machine replacement: need at least one sample");
}

MachineReplacementSpec default_machine_replacement_spec(Eigen::Index num_states) {
    // Reconstructed four-age cost model, tuned for 2000 samples and seed 0: do-nothing
    // costs keep a low mean while the scale (and so the tail) grows with age.
    static constexpr double kShape[4] = {3.0, 2.5, 1.2, 0.04};
    static constexpr double kScale[4] = {5.0, 12.0, 37.5, 1250.0};
    MachineReplacementSpec spec;
    spec.num_states = num_states;
    for (Eigen::Index s = 0; s < num_states; ++s) {
        const auto age = static_cast<std::size_t>(std::min<Eigen::Index>(3, s * 4 / std::max<Eigen::Index>(num_states, 1)));
        spec.repair_reward.push_back(NormalPrior{-130.0, 20.0});
        spec.do_nothing_reward.push_back(NegatedGammaPrior{kShape[age], kScale[age]});
    }
    return spec;
}

TabularMDP machine_replacement_mdp(const MachineReplacementSpec& spec) {
    spec.validate();
    const auto S = spec.num_states;
    TabularMDP mdp;
    mdp.num_states = S;
    mdp.num_actions = 2;
    mdp.gamma = spec.gamma;
    mdp.p0 = VectorXd::Constant(S, 1.0 / static_cast<double>(S));

    MatrixXd age = MatrixXd::Zero(S, S);
    for (Eigen::Index s = 0; s + 1 < S; ++s) age(s, s + 1) = 1.0;
    age(S - 1, S - 1) = 1.0;
    MatrixXd reset = MatrixXd::Zero(S, S);
    reset.col(0).setOnes();
    mdp.transitions = {age, reset};
    mdp.features = MatrixXd::Identity(mdp.num_pairs(), mdp.num_pairs());
    return mdp;
}

std::pair<TabularMDP, RewardPosterior> build_machine_replacement(const MachineReplacementSpec& spec) {
    auto mdp = machine_replacement_mdp(spec);
    PriorSpec prior;
    prior.entries.resize(static_cast<std::size_t>(mdp.num_pairs()));
    for (Eigen::Index s = 0; s < spec.num_states; ++s) {
        prior.entries[static_cast<std::size_t>(sa_index(s, kDoNothing, spec.num_states))] =
            spec.do_nothing_reward[static_cast<std::size_t>(s)];
        prior.entries[static_cast<std::size_t>(sa_index(s, kReplace, spec.num_states))] =
            spec.repair_reward[static_cast<std::size_t>(s)];
    }
    auto posterior = sample_prior_posterior(prior, mdp, spec.num_posterior_samples, spec.seed);
    return {std::move(mdp), std::move(posterior)};
}

void GridworldSpec::validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("gridworld: width and height must be positive");
    if (static_cast<Eigen::Index>(cells.size()) != width * height)
        throw std::invalid_argument("gridworld: need exactly one label per cell");
    if (terminal_row < 0 || terminal_row >= height || terminal_col < 0 || terminal_col >= width)
        throw std::invalid_argument("gridworld: terminal cell out of range");
    for (Eigen::Index s = 0; s < width * height; ++s) {
        const bool is_terminal = s == state(terminal_row, terminal_col);
        if ((label(s) == CellLabel::Terminal) != is_terminal)
            throw std::invalid_argument("gridworld: exactly the terminal cell must carry the terminal label");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gridworld: gamma must lie in [0, 1)");
}

GridworldSpec gridworld_from_rows(const std::vector<std::string>& rows, double gamma, InitialCells initial) {
    GridworldSpec spec;
    spec.height = static_cast<Eigen::Index>(rows.size());
    spec.width = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
    spec.gamma = gamma;
    spec.initial = initial;
    bool found_terminal = false;
    for (Eigen::Index r = 0; r < spec.height; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(row.size()) != spec.width)
            throw std::invalid_argument("gridworld: rows must all have the same length");
        for (Eigen::Index c = 0; c < spec.width; ++c) {
            switch (row[static_cast<std::size_t>(c)]) {
            case 'W': spec.cells.push_back(CellLabel::White); break;
            case 'R': spec.cells.push_back(CellLabel::Red); break;
            case 'T':
                if (found_terminal) throw std::invalid_argument("gridworld: more than one terminal cell");
                found_terminal = true;
                spec.cells.push_back(CellLabel::Terminal);
                spec.terminal_row = r;
                spec.terminal_col = c;
                break;
            default: throw std::invalid_argument(std::string("gridworld: unknown cell label '") + row[c] + "'");
            }
        }
    }
    if (!found_terminal) throw std::invalid_argument("gridworld: no terminal cell");
    spec.validate();
    return spec;
}

GridworldSpec default_gridworld_spec() {
    return gridworld_from_rows({
        "WWWWW",
        "WRRRR",
        "WWWWW",
        "WWWWT",
    });
}

TabularMDP build_gridworld(const GridworldSpec& spec) {
    spec.validate();
    const auto S = spec.width * spec.height;
    TabularMDP mdp;
    mdp.num_states = S;
    mdp.num_actions = kGridActions;
    mdp.gamma = spec.gamma;
    mdp.transitions.assign(kGridActions, MatrixXd::Zero(S, S));
    mdp.features = MatrixXd::Zero(S * kGridActions, 2);

    const Eigen::Index terminal = spec.state(spec.terminal_row, spec.terminal_col);
    for (Eigen::Index r = 0; r < spec.height; ++r) {
        for (Eigen::Index c = 0; c < spec.width; ++c) {
            const auto s = spec.state(r, c);
            const Eigen::Index moves[kGridActions][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
            for (Eigen::Index a = 0; a < kGridActions; ++a) {
                Eigen::Index next = s;
                const auto [nr, nc] = moves[a];
                if (s != terminal && nr >= 0 && nr < spec.height && nc >= 0 && nc < spec.width)
                    next = spec.state(nr, nc);
                mdp.transitions[static_cast<std::size_t>(a)](s, next) = 1.0;
                if (spec.label(s) == CellLabel::White) mdp.features(sa_index(s, a, S), 0) = 1.0;
                if (spec.label(s) == CellLabel::Red) mdp.features(sa_index(s, a, S), 1) = 1.0;
            }
        }
    }

    mdp.p0 = VectorXd::Zero(S);
    for (Eigen::Index s = 0; s < S; ++s) {
        const auto label = spec.label(s);
        const bool start = spec.initial == InitialCells::White ? label == CellLabel::White : label != CellLabel::Terminal;
        if (start) mdp.p0(s) = 1.0;
    }
    if (mdp.p0.sum() == 0.0) mdp.p0(terminal) = 1.0;
    mdp.p0 /= mdp.p0.sum();
    return mdp;
}

Demonstration default_demonstration(const GridworldSpec& spec) {
    const auto reference = default_gridworld_spec();
    if (spec.width != reference.width || spec.height != reference.height || spec.cells != reference.cells)
        throw std::invalid_argument("default_demonstration: only defined for the default gridworld layout");

    using enum GridAction;
    // Starts next to the red band, walks around it on white cells and exits bottom-right.
    const std::vector<std::tuple<Eigen::Index, Eigen::Index, GridAction>> path = {
        {0, 1, Left}, {0, 0, Down}, {1, 0, Down}, {2, 0, Down},
        {3, 0, Right}, {3, 1, Right}, {3, 2, Right}, {3, 3, Right},
    };
    Demonstration demo;
    for (const auto& [r, c, a] : path) demo.steps.emplace_back(spec.state(r, c), static_cast<Eigen::Index>(a));
    return demo;
}

double red_occupancy(const GridworldSpec& spec, const OccupancyVector& u) {
    const auto S = spec.width * spec.height;
    double total = 0.0;
    for (Eigen::Index s = 0; s < S; ++s)
        if (spec.label(s) == CellLabel::Red)
            for (Eigen::Index a = 0; a < kGridActions; ++a) total += u.values(sa_index(s, a, S));
    return total;
}

char action_arrow(Eigen::Index action) {
    switch (action) {
    case 0: return '^';
    case 1: return 'v';
    case 2: return '<';
    case 3: return '>';
    default: return '?';
    }
}

} // namespace broil
