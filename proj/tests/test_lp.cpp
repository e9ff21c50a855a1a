#include "broil/lp.hpp"
#include "support.hpp"

#include <doctest.h>

#include <limits>

using namespace broil;
using lp::LowerBound;
using lp::LpStatus;
using lp::StandardFormLP;

namespace {

lp::SparseMatrix sparse(const MatrixXd& m) { return m.sparseView(); }

StandardFormLP make_lp(const VectorXd& c, const MatrixXd& a, const VectorXd& b, const MatrixXd& g,
                       const VectorXd& h, std::vector<LowerBound> bounds = {}) {
    StandardFormLP lp;
    lp.objective = c;
    lp.eq_matrix = sparse(a.rows() ? a : MatrixXd(0, c.size()));
    lp.eq_rhs = b;
    lp.ineq_matrix = sparse(g.rows() ? g : MatrixXd(0, c.size()));
    lp.ineq_rhs = h;
    lp.lower_bounds = bounds.empty() ? std::vector<LowerBound>(static_cast<std::size_t>(c.size()), LowerBound::Zero)
                                     : bounds;
    return lp;
}

// Feasible and bounded by construction: a known interior-ish point x0 fixes the
// right-hand sides and every variable sits inside a box of half-width 5.
StandardFormLP random_bounded_lp(std::mt19937_64& rng) {
    const auto n = testing::uniform_int(rng, 1, 3);
    const auto m_eq = testing::uniform_int(rng, 0, 2);
    const auto m_in = testing::uniform_int(rng, 0, 2);
    std::vector<LowerBound> bounds;
    std::vector<double> upper;
    VectorXd x0(n);
    bool any_upper = false;
    for (Eigen::Index j = 0; j < n; ++j) {
        const bool free = testing::uniform(rng, 0, 1) < 0.3;
        bounds.push_back(free ? LowerBound::Free : LowerBound::Zero);
        x0(j) = free ? testing::uniform(rng, -2, 2) : testing::uniform(rng, 0, 2);
        // Sometimes pin a nonnegative variable to the degenerate point 0.
        if (!free && testing::uniform(rng, 0, 1) < 0.2) x0(j) = 0.0;
        const bool boxed = !free && testing::uniform(rng, 0, 1) < 0.5;
        upper.push_back(boxed ? testing::uniform(rng, x0(j), 5.0) : std::numeric_limits<double>::infinity());
        any_upper = any_upper || boxed;
    }
    const MatrixXd a = MatrixXd::Random(m_eq, n).unaryExpr([](double v) { return std::round(4 * v) / 2; });
    MatrixXd g = MatrixXd::Random(m_in, n);

    // Box rows for variables without a finite upper bound; free variables also get -x <= 5.
    std::vector<Eigen::VectorXd> box_rows;
    VectorXd box_rhs(0);
    for (Eigen::Index j = 0; j < n; ++j) {
        auto add = [&](double sign) {
            VectorXd row = VectorXd::Zero(n);
            row(j) = sign;
            box_rows.push_back(row);
            box_rhs.conservativeResize(box_rhs.size() + 1);
            box_rhs(box_rhs.size() - 1) = 5.0;
        };
        if (!std::isfinite(upper[static_cast<std::size_t>(j)])) add(1.0);
        if (bounds[static_cast<std::size_t>(j)] == LowerBound::Free) add(-1.0);
    }
    MatrixXd g_all(m_in + static_cast<Eigen::Index>(box_rows.size()), n);
    g_all.topRows(m_in) = g;
    for (std::size_t r = 0; r < box_rows.size(); ++r) g_all.row(m_in + static_cast<Eigen::Index>(r)) = box_rows[r];
    VectorXd h(g_all.rows());
    for (Eigen::Index r = 0; r < m_in; ++r)
        h(r) = g.row(r).dot(x0) + (testing::uniform(rng, 0, 1) < 0.3 ? 0.0 : testing::uniform(rng, 0, 1));
    h.tail(box_rhs.size()) = box_rhs;

    auto lp = make_lp(VectorXd::Random(n), a, a * x0, g_all, h, bounds);
    if (any_upper) lp.upper_bounds = upper;
    return lp;
}

double max_violation(const StandardFormLP& lp, const VectorXd& x) {
    double v = 0.0;
    if (lp.eq_rhs.size()) v = std::max(v, (lp.eq_matrix * x - lp.eq_rhs).cwiseAbs().maxCoeff());
    if (lp.ineq_rhs.size()) v = std::max(v, (lp.ineq_matrix * x - lp.ineq_rhs).maxCoeff());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (lp.lower_bounds[static_cast<std::size_t>(j)] == LowerBound::Zero) v = std::max(v, -x(j));
        if (!lp.upper_bounds.empty()) v = std::max(v, x(j) - lp.upper_bounds[static_cast<std::size_t>(j)]);
    }
    return v;
}

} // namespace

TEST_CASE("lp examples") {
    SUBCASE("equality pins the value") {
        const auto lp = make_lp(VectorXd::Ones(1), MatrixXd::Ones(1, 1), VectorXd::Constant(1, 3.0), MatrixXd(0, 1),
                                VectorXd(0));
        const auto sol = lp::solve_lp(lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        CHECK(sol.x(0) == doctest::Approx(3.0));
    }
    SUBCASE("inequality bounds the maximum") {
        const auto lp = make_lp(-VectorXd::Ones(1), MatrixXd(0, 1), VectorXd(0), MatrixXd::Ones(1, 1),
                                VectorXd::Constant(1, 5.0));
        const auto sol = lp::solve_lp(lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        CHECK(sol.x(0) == doctest::Approx(5.0));
        CHECK(sol.objective == doctest::Approx(-5.0));
        // Inequality multiplier is nonpositive: d(objective)/d(h) = -1.
        CHECK(sol.ineq_duals(0) == doctest::Approx(-1.0));
    }
    SUBCASE("upper bound alone bounds the maximum") {
        auto lp = make_lp(-VectorXd::Ones(2), MatrixXd(0, 2), VectorXd(0), MatrixXd(0, 2), VectorXd(0));
        lp.upper_bounds = {2.5, 0.0};
        const auto sol = lp::solve_lp(lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        CHECK(sol.x(0) == doctest::Approx(2.5));
        CHECK(sol.x(1) == 0.0);
    }
}

TEST_CASE("infeasible and unbounded programs are reported") {
    // x = -1 with x >= 0
    const auto infeasible =
        make_lp(VectorXd::Ones(1), MatrixXd::Ones(1, 1), VectorXd::Constant(1, -1.0), MatrixXd(0, 1), VectorXd(0));
    CHECK(lp::solve_lp(infeasible).status == LpStatus::Infeasible);

    // x <= 1 and x >= 2
    const auto contradictory = make_lp(VectorXd::Zero(1), MatrixXd(0, 1), VectorXd(0),
                                       (MatrixXd(2, 1) << 1, -1).finished(), (VectorXd(2) << 1, -2).finished());
    CHECK(lp::solve_lp(contradictory).status == LpStatus::Infeasible);

    // min -x, x >= 0, no other constraint
    const auto unbounded = make_lp(-VectorXd::Ones(1), MatrixXd(0, 1), VectorXd(0), MatrixXd(0, 1), VectorXd(0));
    CHECK(lp::solve_lp(unbounded).status == LpStatus::Unbounded);

    // min x, x free
    const auto free_unbounded = make_lp(VectorXd::Ones(1), MatrixXd(0, 1), VectorXd(0), MatrixXd(0, 1), VectorXd(0),
                                        {LowerBound::Free});
    CHECK(lp::solve_lp(free_unbounded).status == LpStatus::Unbounded);
}

TEST_CASE("malformed programs are rejected") {
    auto lp = make_lp(VectorXd::Ones(2), MatrixXd::Ones(1, 2), VectorXd::Ones(1), MatrixXd(0, 2), VectorXd(0));
    CHECK_NOTHROW(lp.validate());
    auto bad = lp;
    bad.eq_rhs = VectorXd::Ones(2);
    CHECK_THROWS_AS(lp::solve_lp(bad), std::invalid_argument);
    bad = lp;
    bad.lower_bounds.pop_back();
    CHECK_THROWS_AS(lp::solve_lp(bad), std::invalid_argument);
    bad = lp;
    bad.upper_bounds = {1.0};
    CHECK_THROWS_AS(lp::solve_lp(bad), std::invalid_argument);
    bad = lp;
    bad.upper_bounds = {1.0, -1.0};
    CHECK_THROWS_AS(lp::solve_lp(bad), std::invalid_argument);
    bad = lp;
    bad.lower_bounds[0] = LowerBound::Free;
    bad.upper_bounds = {1.0, std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(lp::solve_lp(bad), std::invalid_argument);
}

TEST_CASE("variable blocks") {
    auto lp = make_lp(VectorXd::Ones(5), MatrixXd(0, 5), VectorXd(0), MatrixXd(0, 5), VectorXd(0));
    lp.variable_map = {{"u", 0, 3}, {"z", 3, 2}};
    CHECK(lp.block("z").offset == 3);
    CHECK(lp.slice((VectorXd(5) << 1, 2, 3, 4, 5).finished(), "z") == Eigen::Vector2d(4, 5));
    CHECK_THROWS_AS(lp.block("sigma"), std::out_of_range);
}

TEST_CASE("random small programs match vertex enumeration") {
    std::mt19937_64 rng(41);
    int solved = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto lp = random_bounded_lp(rng);
        const auto oracle = testing::vertex_enumeration(lp);
        REQUIRE(oracle.feasible);
        const auto sol = lp::solve_lp(lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        CHECK(std::abs(sol.objective - oracle.objective) < 1e-7);
        CHECK(std::abs(sol.objective - lp.objective.dot(sol.x)) < 1e-9);
        CHECK(max_violation(lp, sol.x) < 1e-7);
        CHECK(sol.primal_residual < 1e-7);
        CHECK(sol.dual_infeasibility < 1e-7);
        CHECK(sol.duality_gap < 1e-7);
        ++solved;
    }
    CHECK(solved == 400);
}

TEST_CASE("duals certify optimality on random programs") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const auto lp = random_bounded_lp(rng);
        if (!lp.upper_bounds.empty()) continue;
        const auto sol = lp::solve_lp(lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        // Reduced costs d = c - A^T y - G^T w: d_j >= 0 for x_j >= 0, d_j = 0 for free x_j.
        VectorXd d = lp.objective;
        if (lp.eq_rhs.size()) d -= lp.eq_matrix.transpose() * sol.eq_duals;
        if (lp.ineq_rhs.size()) {
            CHECK(sol.ineq_duals.maxCoeff() <= 1e-9);
            d -= lp.ineq_matrix.transpose() * sol.ineq_duals;
        }
        for (Eigen::Index j = 0; j < d.size(); ++j) {
            if (lp.lower_bounds[static_cast<std::size_t>(j)] == LowerBound::Free)
                CHECK(std::abs(d(j)) < 1e-8);
            else
                CHECK(d(j) > -1e-8);
        }
        double dual_obj = 0.0;
        if (lp.eq_rhs.size()) dual_obj += lp.eq_rhs.dot(sol.eq_duals);
        if (lp.ineq_rhs.size()) dual_obj += lp.ineq_rhs.dot(sol.ineq_duals);
        CHECK(std::abs(dual_obj - sol.objective) < 1e-8);
    }
}

TEST_CASE("degenerate transportation-style program") {
    // Many ties: assignment polytope with a constant objective on most entries.
    const Eigen::Index n = 6;
    MatrixXd a = MatrixXd::Zero(2 * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            a(i, i * n + j) = 1.0;
            a(n + j, i * n + j) = 1.0;
        }
    VectorXd c = VectorXd::Ones(n * n);
    for (Eigen::Index i = 0; i < n; ++i) c(i * n + (i + 1) % n) = 0.0;
    const auto lp = make_lp(c, a, VectorXd::Ones(2 * n), MatrixXd(0, n * n), VectorXd(0));
    const auto sol = lp::solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(std::abs(sol.objective) < 1e-9);
    CHECK(max_violation(lp, sol.x) < 1e-9);
}

TEST_CASE("solver is deterministic") {
    std::mt19937_64 rng(43);
    const auto lp = random_bounded_lp(rng);
    const auto a = lp::solve_lp(lp);
    const auto b = lp::solve_lp(lp);
    CHECK(a.x == b.x);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("status names") {
    CHECK(lp::to_string(LpStatus::Optimal) == "optimal");
    CHECK(lp::to_string(LpStatus::Infeasible) == "infeasible");
    CHECK(lp::to_string(LpStatus::Unbounded) == "unbounded");
    CHECK(lp::to_string(LpStatus::IterationLimit) == "iteration-limit");
}
