#include <doctest.h>

#include <cmath>

#include "cbctl/design.hpp"
#include "cbctl/linalg.hpp"
#include "reference_systems.hpp"
#include "stacked_ls_oracle.hpp"

using namespace cbctl;
using namespace cbctl::testing;

namespace {

double max_entry_diff(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    REQUIRE(a.size() == b.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
    return d;
}

struct RandomTask {
    LtiSystem sys;
    BlockScheme scheme;
    SteeringTask task;
};

// reachable by construction: x_f = Abar^b x0 + (range of the relevant map) * random
RandomTask random_task(RandomSource& rs, Regime regime) {
    const int n = rs.integer(1, 5), m = rs.integer(1, 3), h = rs.integer(2, 4), b = rs.integer(1, 6);
    LtiSystem sys(rs.scaled(n, rs.uniform(0.6, 1.2)), rs.matrix(n, m));
    BlockScheme scheme = build_scheme(h, m);
    const LiftedSystem L = lift(sys, scheme);
    const Vector x0 = rs.vector(n);
    const Matrix map = regime == Regime::repetitive ? Matrix(h_sum(L, b) * L.Bbar) : reachability_matrix(L, b).Rb;
    const Vector xf = power(L.Abar, b) * x0 + map * rs.vector(map.cols());
    return {sys, scheme, {x0, xf, b, regime}};
}

}  // namespace

TEST_CASE("zero displacement gives the zero plan") {
    const LtiSystem sys = rotation_plant();
    const LiftedSystem L = lift(sys, build_scheme(2, 1));
    const Vector x0 = vec({0.3, -0.1});
    const Vector xf = power(L.Abar, 4) * x0;
    for (Regime r : {Regime::non_repetitive, Regime::repetitive}) {
        const ControlPlan plan = design(L, {x0, xf, 4, r});
        CHECK(plan.energy == 0.0);
        for (const auto& u : plan.flat_inputs) CHECK(u.isZero(0.0));
    }
}

TEST_CASE("rotation plant steering for (h, b) = (4, 5) and (2, 10)") {
    const LtiSystem sys = rotation_plant();
    for (auto [h, b] : {std::pair{4, 5}, std::pair{2, 10}}) {
        CAPTURE(h);
        const BlockScheme s = build_scheme(h, 1);
        const SteeringTask task{vec({-0.2, 0.2}), vec({1.0, -0.6}), b, Regime::non_repetitive};
        const ControlPlan plan = design_nonrepetitive(lift(sys, s), task);
        CHECK(plan.flat_inputs.size() == 20);
        CHECK(plan.blocks.size() == static_cast<std::size_t>(b));
        const PlanReport rep = verify_plan(sys, s, task, plan);
        CHECK(rep.pass);
        CHECK(rep.terminal_error <= 1e-8);
        for (double imb : rep.imbalance) CHECK(imb <= 1e-10);
        // inputs alternate in sign within each block for h = 2
        if (h == 2) {
            for (int p = 0; p < b; ++p) CHECK(plan.flat_inputs[2 * p](0) == doctest::Approx(-plan.flat_inputs[2 * p + 1](0)));
        }
        const ControlPlan oracle = oracle_stacked_ls(sys, s, task);
        CHECK(max_entry_diff(plan.flat_inputs, oracle.flat_inputs) <= 1e-8);
    }
}

TEST_CASE("triangular plant with identical blocks") {
    const LtiSystem sys = triangular_plant();
    const BlockScheme s = build_scheme(2, 2);
    const SteeringTask task{vec({-0.2, 0.3}), vec({1.0, -0.6}), 10, Regime::repetitive};
    const ControlPlan plan = design_repetitive(lift(sys, s), task);
    REQUIRE(plan.latent.size() == 1);
    for (const auto& U : plan.blocks) CHECK(U == plan.blocks.front());
    CHECK(plan.energy == doctest::Approx(10.0 * plan.latent[0].squaredNorm()).epsilon(1e-12));
    const PlanReport rep = verify_plan(sys, s, task, plan);
    CHECK(rep.pass);
    CHECK(rep.terminal_error <= 1e-8);
    const ControlPlan oracle = oracle_stacked_ls(sys, s, task);
    CHECK(max_entry_diff(plan.flat_inputs, oracle.flat_inputs) <= 1e-8);
}

TEST_CASE("under-actuated plant with identical blocks, h = 3, b = 5") {
    const LtiSystem sys = underactuated_plant();
    const BlockScheme s = build_scheme(3, 2);
    const SteeringTask task{Vector::Zero(4), vec({1.0, -0.6, 0.5, 0.2}), 5, Regime::repetitive};
    const ControlPlan plan = design_repetitive(lift(sys, s), task);
    const PlanReport rep = verify_plan(sys, s, task, plan);
    CHECK(rep.pass);
    CHECK(rep.terminal_error <= 1e-6);
    const ControlPlan oracle = oracle_stacked_ls(sys, s, task);
    CHECK(std::abs(plan.energy - oracle.energy) <= 1e-8 * oracle.energy);
}

TEST_CASE("design matches the stacked least-squares oracle on random tasks") {
    RandomSource rs(51);
    for (Regime regime : {Regime::non_repetitive, Regime::repetitive}) {
        for (int t = 0; t < 100; ++t) {
            const RandomTask rt = random_task(rs, regime);
            const ControlPlan plan = design(lift(rt.sys, rt.scheme), rt.task);
            const ControlPlan oracle = oracle_stacked_ls(rt.sys, rt.scheme, rt.task);
            CHECK(std::abs(plan.energy - oracle.energy) <= 1e-8 * std::max(oracle.energy, 1e-300));
            CHECK(max_entry_diff(plan.flat_inputs, oracle.flat_inputs) <= 1e-7);
            CHECK(verify_plan(rt.sys, rt.scheme, rt.task, plan).pass);
        }
    }
}

TEST_CASE("the designed plan does not depend on the kernel basis") {
    RandomSource rs(52);
    for (int t = 0; t < 100; ++t) {
        const RandomTask rt = random_task(rs, Regime::non_repetitive);
        const Matrix theta = rs.orthogonal(rt.scheme.latent_size());
        const BlockScheme rotated = scheme_with_basis(rt.scheme.h, rt.scheme.m, rt.scheme.Q * theta);
        const ControlPlan a = design_nonrepetitive(lift(rt.sys, rt.scheme), rt.task);
        const ControlPlan b = design_nonrepetitive(lift(rt.sys, rotated), rt.task);
        CHECK(max_entry_diff(a.blocks, b.blocks) <= 1e-9);
    }
}

TEST_CASE("energy equals the latent norm") {
    RandomSource rs(53);
    for (int t = 0; t < 50; ++t) {
        const RandomTask rt = random_task(rs, Regime::non_repetitive);
        const ControlPlan plan = design_nonrepetitive(lift(rt.sys, rt.scheme), rt.task);
        double latent = 0.0;
        for (const auto& w : plan.latent) latent += w.squaredNorm();
        CHECK(std::abs(plan.energy - latent) <= 1e-10 * std::max(1.0, latent));
    }
}

TEST_CASE("unreachable target reports the least-squares residual") {
    // third state is not driven: Rb has rank 2
    Matrix A = Matrix::Zero(3, 3);
    A.diagonal() << 0.5, -0.3, 0.2;
    const LtiSystem sys(A, vec({1.0, 1.0, 0.0}));
    const LiftedSystem L = lift(sys, build_scheme(2, 1));
    const SteeringTask task{Vector::Zero(3), vec({0.1, 0.2, 0.7}), 4, Regime::non_repetitive};
    try {
        design_nonrepetitive(L, task);
        FAIL("expected ReachabilityError");
    } catch (const ReachabilityError& e) {
        CHECK(e.rank() == 2);
        const Matrix Rb = reachability_matrix(L, 4).Rb;
        const Vector d = task.xf - power(L.Abar, 4) * task.x0;
        const Vector z = Rb.completeOrthogonalDecomposition().solve(d);
        CHECK(std::abs(e.residual() - (Rb * z - d).norm()) <= 1e-10);
        CHECK(e.residual() == doctest::Approx(0.7).epsilon(1e-10));
    }
    CHECK_THROWS_AS(design_repetitive(L, {Vector::Zero(3), vec({0.1, 0.2, 0.7}), 4, Regime::repetitive}),
                    ReachabilityError);
}

TEST_CASE("singular Gramian, reachable target: minimum-norm solution") {
    Matrix A = Matrix::Zero(3, 3);
    A.diagonal() << 0.5, -0.3, 0.2;
    const LtiSystem sys(A, vec({1.0, 1.0, 0.0}));
    const BlockScheme s = build_scheme(3, 1);
    const LiftedSystem L = lift(sys, s);
    const SteeringTask task{vec({0.4, -0.2, 0.9}), Vector::Zero(3), 3, Regime::non_repetitive};
    // x_f = 0 is reachable: the undriven mode decays to 0.2^9 * 0.9, so aim at that
    SteeringTask reachable = task;
    reachable.xf(2) = std::pow(0.2, 9) * 0.9;
    const ControlPlan plan = design_nonrepetitive(L, reachable);
    CHECK(verify_plan(sys, s, reachable, plan).pass);

    // explicit null-space parameterization of all exact solutions
    const Matrix Rb = reachability_matrix(L, 3).Rb;
    Vector w(Rb.cols());
    for (std::size_t p = 0; p < plan.latent.size(); ++p) w.segment(p * 2, 2) = plan.latent[p];
    const Matrix N = Rb.fullPivLu().kernel();
    CHECK((N.transpose() * w).norm() <= 1e-10 * std::max(1.0, w.norm()));
    RandomSource rs(54);
    for (int t = 0; t < 20; ++t) {
        const Vector other = w + N * rs.vector(N.cols());
        CHECK(other.norm() >= w.norm());
    }
    const ControlPlan oracle = oracle_stacked_ls(sys, s, reachable);
    CHECK(std::abs(plan.energy - oracle.energy) <= 1e-8 * oracle.energy);
}

TEST_CASE("verify_plan flags the perturbed block only") {
    const LtiSystem sys = rotation_plant();
    const BlockScheme s = build_scheme(2, 1);
    const SteeringTask task{vec({-0.2, 0.2}), vec({1.0, -0.6}), 10, Regime::non_repetitive};
    ControlPlan plan = design_nonrepetitive(lift(sys, s), task);
    CHECK(verify_plan(sys, s, task, plan).pass);
    plan.flat_inputs[7](0) += 0.1;  // block 3
    const PlanReport rep = verify_plan(sys, s, task, plan);
    CHECK_FALSE(rep.pass);
    REQUIRE(rep.unbalanced_blocks.size() == 1);
    CHECK(rep.unbalanced_blocks[0] == 3);
    CHECK(rep.imbalance[3] == doctest::Approx(0.1));
}

TEST_CASE("zero plan passes verification") {
    const LtiSystem sys = triangular_plant();
    const BlockScheme s = build_scheme(2, 2);
    const Vector x0 = vec({0.1, 0.1});
    const SteeringTask task{x0, power(sys.A(), 6) * x0, 3, Regime::non_repetitive};
    ControlPlan zero;
    zero.flat_inputs.assign(6, Vector::Zero(2));
    const PlanReport rep = verify_plan(sys, s, task, zero);
    CHECK(rep.pass);
    CHECK(rep.terminal_error <= 1e-14);
}

TEST_CASE("oracle on a free-response target returns zero input") {
    const LtiSystem sys = underactuated_plant();
    const BlockScheme s = build_scheme(3, 2);
    const Vector x0 = vec({0.01, 0.0, -0.01, 0.02});
    const SteeringTask task{x0, power(sys.A(), 6) * x0, 2, Regime::non_repetitive};
    const ControlPlan oracle = oracle_stacked_ls(sys, s, task);
    CHECK(oracle.energy <= 1e-20);
}

TEST_CASE("task validation") {
    const LiftedSystem L = lift(rotation_plant(), build_scheme(2, 1));
    CHECK_THROWS_AS(design(L, {Vector::Zero(3), Vector::Zero(2), 2, Regime::non_repetitive}), std::invalid_argument);
    CHECK_THROWS_AS(design(L, {Vector::Zero(2), Vector::Zero(2), 0, Regime::repetitive}), std::invalid_argument);
}
