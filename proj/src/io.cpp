#include "broil/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace broil::io {

json matrix_to_json(const MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("json: expected an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.front().size());
    MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument("json: ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

json vector_to_json(const VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("json: expected an array");
    VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

json mdp_to_json(const TabularMDP& mdp) {
    json transitions = json::array();
    for (const auto& p : mdp.transitions) transitions.push_back(matrix_to_json(p));
    return {{"num_states", mdp.num_states}, {"num_actions", mdp.num_actions}, {"gamma", mdp.gamma},
            {"p0", vector_to_json(mdp.p0)},   {"transitions", transitions},     {"features", matrix_to_json(mdp.features)}};
}

TabularMDP mdp_from_json(const json& j) {
    TabularMDP mdp;
    mdp.num_states = j.at("num_states").get<Eigen::Index>();
    mdp.num_actions = j.at("num_actions").get<Eigen::Index>();
    mdp.gamma = j.at("gamma").get<double>();
    mdp.p0 = vector_from_json(j.at("p0"));
    const auto S = mdp.num_states;
    for (const auto& t : j.at("transitions")) {
        if (!t.empty() && t.front().is_number()) {
            const VectorXd flat = vector_from_json(t);
            if (flat.size() != S * S) throw std::invalid_argument("mdp json: flat transition matrix must have S*S entries");
            mdp.transitions.emplace_back(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                flat.data(), S, S));
        } else {
            mdp.transitions.push_back(matrix_from_json(t));
        }
    }
    mdp.features = matrix_from_json(j.at("features"));
    mdp.validate();
    return mdp;
}

json posterior_to_json(const RewardPosterior& posterior, const json& metadata) {
    json j;
    if (posterior.weights) j["weights"] = matrix_to_json(*posterior.weights);
    j["rewards"] = matrix_to_json(posterior.rewards);
    j["probs"] = vector_to_json(posterior.probs);
    j["metadata"] = metadata;
    return j;
}

RewardPosterior posterior_from_json(const json& j) {
    RewardPosterior posterior;
    if (j.contains("weights")) posterior.weights = matrix_from_json(j.at("weights"));
    posterior.rewards = matrix_from_json(j.at("rewards"));
    posterior.probs = vector_from_json(j.at("probs"));
    return posterior;
}

json prior_to_json(const EntryPrior& prior) {
    struct Visitor {
        json operator()(const ConstantPrior& p) const { return {{"type", "constant"}, {"value", p.value}}; }
        json operator()(const NormalPrior& p) const {
            return {{"type", "normal"}, {"mean", p.mean}, {"stddev", p.stddev}};
        }
        json operator()(const NegatedGammaPrior& p) const {
            return {{"type", "negated_gamma"}, {"shape", p.shape}, {"scale", p.scale}};
        }
    };
    return std::visit(Visitor{}, prior);
}

EntryPrior prior_from_json(const json& j) {
    const auto type = j.at("type").get<std::string>();
    EntryPrior prior;
    if (type == "constant")
        prior = ConstantPrior{j.at("value").get<double>()};
    else if (type == "normal")
        prior = NormalPrior{j.at("mean").get<double>(), j.at("stddev").get<double>()};
    else if (type == "negated_gamma")
        prior = NegatedGammaPrior{j.at("shape").get<double>(), j.at("scale").get<double>()};
    else
        throw std::invalid_argument("prior json: unknown type '" + type + "'");
    validate_prior(prior);
    return prior;
}

json machine_replacement_to_json(const MachineReplacementSpec& spec) {
    json repair = json::array();
    json nothing = json::array();
    for (const auto& p : spec.repair_reward) repair.push_back(prior_to_json(p));
    for (const auto& p : spec.do_nothing_reward) nothing.push_back(prior_to_json(p));
    return {{"type", "machine_replacement"},
            {"num_states", spec.num_states},
            {"gamma", spec.gamma},
            {"seed", spec.seed},
            {"num_posterior_samples", spec.num_posterior_samples},
            {"repair", repair},
            {"do_nothing", nothing}};
}

MachineReplacementSpec machine_replacement_from_json(const json& j) {
    MachineReplacementSpec spec;
    spec.num_states = j.value("num_states", Eigen::Index{4});
    if (!j.contains("repair") && !j.contains("do_nothing")) spec = default_machine_replacement_spec(spec.num_states);
    spec.gamma = j.value("gamma", spec.gamma);
    spec.seed = j.value("seed", spec.seed);
    spec.num_posterior_samples = j.value("num_posterior_samples", spec.num_posterior_samples);
    if (j.contains("repair")) {
        spec.repair_reward.clear();
        for (const auto& p : j.at("repair")) spec.repair_reward.push_back(prior_from_json(p));
    }
    if (j.contains("do_nothing")) {
        spec.do_nothing_reward.clear();
        for (const auto& p : j.at("do_nothing")) spec.do_nothing_reward.push_back(prior_from_json(p));
    }
    spec.validate();
    return spec;
}

json gridworld_to_json(const GridworldSpec& spec) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < spec.height; ++r) {
        std::string row;
        for (Eigen::Index c = 0; c < spec.width; ++c) {
            switch (spec.label(spec.state(r, c))) {
            case CellLabel::White: row += 'W'; break;
            case CellLabel::Red: row += 'R'; break;
            case CellLabel::Terminal: row += 'T'; break;
            }
        }
        rows.push_back(row);
    }
    return {{"type", "gridworld"},
            {"rows", rows},
            {"gamma", spec.gamma},
            {"initial", spec.initial == InitialCells::White ? "white" : "non_terminal"}};
}

GridworldSpec gridworld_from_json(const json& j) {
    const auto initial_name = j.value("initial", std::string("white"));
    InitialCells initial;
    if (initial_name == "white")
        initial = InitialCells::White;
    else if (initial_name == "non_terminal")
        initial = InitialCells::NonTerminal;
    else
        throw std::invalid_argument("gridworld json: initial must be 'white' or 'non_terminal'");
    return gridworld_from_rows(j.at("rows").get<std::vector<std::string>>(), j.value("gamma", 0.95), initial);
}

json policy_to_json(const StochasticPolicy& policy) {
    return {{"num_states", policy.probs.rows()},
            {"num_actions", policy.probs.cols()},
            {"action_probs", matrix_to_json(policy.probs)}};
}

std::string gridworld_policy_table(const GridworldSpec& spec, const StochasticPolicy& policy) {
    std::ostringstream out;
    for (Eigen::Index r = 0; r < spec.height; ++r) {
        for (Eigen::Index c = 0; c < spec.width; ++c) {
            const auto s = spec.state(r, c);
            char cell = '.';
            if (spec.label(s) == CellLabel::Terminal) {
                cell = 'T';
            } else {
                Eigen::Index best = 0;
                policy.probs.row(s).maxCoeff(&best);
                cell = action_arrow(best);
            }
            out << cell << (spec.label(s) == CellLabel::Red ? '*' : ' ');
        }
        out << '\n';
    }
    out << "(* marks red cells)\n\nstate row col   up     down   left   right\n";
    out << std::fixed << std::setprecision(3);
    for (Eigen::Index s = 0; s < spec.width * spec.height; ++s) {
        out << std::setw(5) << s << std::setw(4) << s / spec.width << std::setw(4) << s % spec.width << ' ';
        for (Eigen::Index a = 0; a < policy.probs.cols(); ++a) out << std::setw(7) << policy.probs(s, a);
        out << '\n';
    }
    return out.str();
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("invalid JSON in " + path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << contents;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

} // namespace broil::io
