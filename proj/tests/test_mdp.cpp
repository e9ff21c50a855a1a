#include "broil/mdp.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace broil;

namespace {

TabularMDP self_loop(double gamma) {
    TabularMDP mdp;
    mdp.num_states = 1;
    mdp.num_actions = 1;
    mdp.gamma = gamma;
    mdp.transitions = {MatrixXd::Ones(1, 1)};
    mdp.p0 = VectorXd::Ones(1);
    mdp.features = MatrixXd::Ones(1, 1);
    return mdp;
}

// Two states, two actions; action 1 moves to the absorbing state 1.
TabularMDP two_state_chain(double gamma) {
    TabularMDP mdp;
    mdp.num_states = 2;
    mdp.num_actions = 2;
    mdp.gamma = gamma;
    MatrixXd stay(2, 2), move(2, 2);
    stay << 1, 0, 0, 1;
    move << 0, 1, 0, 1;
    mdp.transitions = {stay, move};
    mdp.p0 = (VectorXd(2) << 1, 0).finished();
    mdp.features = MatrixXd::Identity(4, 4);
    return mdp;
}

} // namespace

TEST_CASE("validate rejects malformed MDPs") {
    auto mdp = two_state_chain(0.5);
    CHECK_NOTHROW(mdp.validate());

    auto bad = mdp;
    bad.gamma = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = mdp;
    bad.transitions[0](0, 0) = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = mdp;
    bad.p0(0) = 0.7;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = mdp;
    bad.features = MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = mdp;
    bad.transitions.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sa_index is action-major") {
    CHECK(sa_index(0, 0, 5) == 0);
    CHECK(sa_index(4, 0, 5) == 4);
    CHECK(sa_index(0, 1, 5) == 5);
    CHECK(sa_index(3, 2, 5) == 13);
}

// ---------------------------------------------------------------------------
// occupancy_from_policy
// ---------------------------------------------------------------------------

TEST_CASE("occupancy of a one-state self-loop is 1/(1-gamma)") {
    const auto mdp = self_loop(0.95);
    StochasticPolicy pi{MatrixXd::Ones(1, 1)};
    const auto u = occupancy_from_policy(mdp, pi);
    REQUIRE(u.values.size() == 1);
    CHECK(u.values(0) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("occupancy of a two-state chain matches the hand solution") {
    // d = p0 + gamma P_pi^T d with P_pi sending both states to 1:
    // d0 = 1, d1 = 0.5 (d0 + d1) -> d1 = 1.
    const auto mdp = two_state_chain(0.5);
    StochasticPolicy pi{(MatrixXd(2, 2) << 0, 1, 0, 1).finished()};
    const auto u = occupancy_from_policy(mdp, pi);
    CHECK(u.values(sa_index(0, 1, 2)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u.values(sa_index(1, 1, 2)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u.values(sa_index(0, 0, 2)) == 0.0);
    CHECK(u.values(sa_index(1, 0, 2)) == 0.0);
}

TEST_CASE("uniform policy conserves total mass") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mdp = testing::random_mdp(rng, 1 + trial % 7, 1 + trial % 3, 2, 0.9);
        const auto u = occupancy_from_policy(mdp, uniform_policy(mdp));
        CHECK(std::abs(u.values.sum() - 10.0) < 1e-9);
    }
}

TEST_CASE("occupancy satisfies the flow equations and round-trips through extract_policy") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const auto S = testing::uniform_int(rng, 1, 8);
        const auto A = testing::uniform_int(rng, 1, 4);
        const auto mdp = testing::random_mdp(rng, S, A, 3, testing::uniform(rng, 0.0, 0.99));
        const auto pi = testing::random_policy(rng, S, A);
        const auto u = occupancy_from_policy(mdp, pi);
        CHECK((flow_residual_lhs(mdp, u.values) - mdp.p0).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(u.values.minCoeff() >= -1e-12);

        const auto back = extract_policy(u, mdp);
        for (Eigen::Index s = 0; s < S; ++s) {
            double mass = 0.0;
            for (Eigen::Index a = 0; a < A; ++a) mass += u.values(sa_index(s, a, S));
            if (mass > 1e-8) CHECK((back.probs.row(s) - pi.probs.row(s)).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

// ---------------------------------------------------------------------------
// extract_policy
// ---------------------------------------------------------------------------

TEST_CASE("extract_policy normalizes rows and falls back to uniform") {
    TabularMDP mdp = two_state_chain(0.5);
    mdp.transitions = {MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2)};
    OccupancyVector u{VectorXd(4)};
    // state 0: [3, 1], state 1: [0, 0]
    u.values << 3.0, 0.0, 1.0, 0.0;
    const auto pi = extract_policy(u, mdp);
    CHECK(pi.probs(0, 0) == doctest::Approx(0.75));
    CHECK(pi.probs(0, 1) == doctest::Approx(0.25));
    CHECK(pi.probs(1, 0) == 0.5);
    CHECK(pi.probs(1, 1) == 0.5);

    u.values << 0.6, 0.0, 0.4, 0.0;
    const auto pi2 = extract_policy(u, mdp);
    CHECK(pi2.probs(0, 0) == doctest::Approx(0.6));
    CHECK(pi2.probs(0, 1) == doctest::Approx(0.4));
}

// ---------------------------------------------------------------------------
// expected_return / feature_counts
// ---------------------------------------------------------------------------

TEST_CASE("expected_return examples") {
    OccupancyVector u{VectorXd::Constant(1, 20.0)};
    CHECK(expected_return(u, VectorXd::Ones(1)) == 20.0);
    CHECK(expected_return(u, VectorXd::Zero(1)) == 0.0);
    CHECK_THROWS_AS(expected_return(u, VectorXd::Ones(2)), std::invalid_argument);
}

TEST_CASE("feature counts agree with per-entry sums and linear returns") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mdp = testing::random_mdp(rng, 5, 3, 4, 0.9);
        const auto u = occupancy_from_policy(mdp, testing::random_policy(rng, 5, 3));
        const auto mu = feature_counts(u, mdp);
        VectorXd manual = VectorXd::Zero(4);
        for (Eigen::Index i = 0; i < mdp.num_pairs(); ++i)
            for (Eigen::Index k = 0; k < 4; ++k) manual(k) += mdp.features(i, k) * u.values(i);
        CHECK((mu - manual).cwiseAbs().maxCoeff() < 1e-12);

        const VectorXd w = VectorXd::Random(4);
        CHECK(std::abs(expected_return(u, mdp.features * w) - mu.dot(w)) < 1e-10);
        CHECK(expected_return(u, mdp.features * VectorXd::Zero(4)) == 0.0);
    }
}

TEST_CASE("feature counts for identity and all-ones features") {
    std::mt19937_64 rng(14);
    auto mdp = testing::random_mdp(rng, 4, 2, 1, 0.8);
    const auto pi = testing::random_policy(rng, 4, 2);

    mdp.features = MatrixXd::Ones(8, 1);
    const auto u = occupancy_from_policy(mdp, pi);
    CHECK(feature_counts(u, mdp)(0) == doctest::Approx(5.0).epsilon(1e-12));

    mdp.features = MatrixXd::Identity(8, 8);
    CHECK((feature_counts(u, mdp) - u.values).cwiseAbs().maxCoeff() == 0.0);
}

// ---------------------------------------------------------------------------
// empirical_expert_feature_counts
// ---------------------------------------------------------------------------

TEST_CASE("empirical feature counts discount per trajectory") {
    auto mdp = two_state_chain(0.5);
    mdp.features = (MatrixXd(4, 2) << 1, 0, 0, 1, 2, 3, 4, 5).finished();
    const VectorXd phi_00 = mdp.features.row(sa_index(0, 0, 2)).transpose();
    const VectorXd phi_11 = mdp.features.row(sa_index(1, 1, 2)).transpose();

    std::vector<Demonstration> one{Demonstration{{{0, 0}}}};
    CHECK((empirical_expert_feature_counts(one, mdp) - phi_00).norm() == 0.0);

    std::vector<Demonstration> repeat{Demonstration{{{0, 0}, {0, 0}}}};
    CHECK((empirical_expert_feature_counts(repeat, mdp) - 1.5 * phi_00).norm() < 1e-15);

    std::vector<Demonstration> two{Demonstration{{{0, 0}}}, Demonstration{{{1, 1}}}};
    CHECK((empirical_expert_feature_counts(two, mdp) - 0.5 * (phi_00 + phi_11)).norm() < 1e-15);

    CHECK_THROWS_AS(empirical_expert_feature_counts(std::vector<Demonstration>{}, mdp), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// q_values
// ---------------------------------------------------------------------------

TEST_CASE("q_values examples") {
    const auto mdp = self_loop(0.95);
    CHECK(std::abs(q_values(mdp, VectorXd::Ones(1))(0, 0) - 20.0) < 1e-8);

    std::mt19937_64 rng(15);
    const auto random = testing::random_mdp(rng, 4, 3, 2, 0.9);
    CHECK(q_values(random, VectorXd::Zero(12)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("q_values matches policy evaluation of its greedy policy") {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mdp = testing::random_mdp(rng, 3, 2, 1, 0.9);
        const VectorXd r = VectorXd::Random(6);
        const auto q = q_values(mdp, r);
        const auto greedy = greedy_policy(q);
        const VectorXd v = testing::evaluate_policy_values(mdp, greedy, r);
        // Q(s,a) = r(s,a) + gamma P_a v
        for (Eigen::Index a = 0; a < 2; ++a) {
            const VectorXd expected =
                r.segment(a * 3, 3) + mdp.gamma * mdp.transitions[static_cast<std::size_t>(a)] * v;
            CHECK((q.col(a) - expected).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("q_values is monotone in the reward") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto mdp = testing::random_mdp(rng, 5, 3, 1, 0.9);
        const VectorXd r1 = VectorXd::Random(15);
        const VectorXd r2 = r1 + VectorXd::Random(15).cwiseAbs();
        CHECK((q_values(mdp, r2) - q_values(mdp, r1)).minCoeff() >= -1e-9);
    }
}

TEST_CASE("greedy_policy breaks ties toward the lowest action") {
    const MatrixXd q = (MatrixXd(2, 3) << 1, 1, 0, 0, 2, 2).finished();
    const auto pi = greedy_policy(q);
    CHECK(pi.probs(0, 0) == 1.0);
    CHECK(pi.probs(1, 1) == 1.0);
    CHECK(pi.probs.sum() == 2.0);
}
