#include <doctest.h>

#include <cmath>

#include "cbctl/lifting.hpp"
#include "cbctl/linalg.hpp"
#include "reference_systems.hpp"

using namespace cbctl;
using namespace cbctl::testing;

namespace {

double max_abs(const Matrix& M) { return M.cwiseAbs().maxCoeff(); }

std::vector<Vector> per_step(const Vector& U, int m) { return split_block(U, m); }

}  // namespace

TEST_CASE("rotation plant with h = 2: S Q = [-3 sqrt(2)/4, sqrt(6)/4]") {
    const LiftedSystem L = lift(rotation_plant(), build_scheme(2, 1));
    REQUIRE(L.Bbar.rows() == 2);
    REQUIRE(L.Bbar.cols() == 1);
    CHECK(std::abs(L.Bbar(0, 0) + 3.0 * std::sqrt(2.0) / 4.0) <= 1e-12);
    CHECK(std::abs(L.Bbar(1, 0) - std::sqrt(6.0) / 4.0) <= 1e-12);

    const GramianBundle g = reachability_matrix(L, 2);
    Matrix expected(2, 2);
    // [Abar Bbar, Bbar]
    expected << 3.0 * std::sqrt(2.0) / 4.0, -3.0 * std::sqrt(2.0) / 4.0,
                std::sqrt(6.0) / 4.0,        std::sqrt(6.0) / 4.0;
    CHECK(max_abs(g.Rb - expected) < 1e-12);
    CHECK(numeric_rank(g.Rb, 100.0) == 2);
}

TEST_CASE("S columns are A^{h-1}B ... B") {
    RandomSource rs(31);
    const LtiSystem sys(rs.matrix(3, 3), rs.matrix(3, 2));
    const LiftedSystem L = lift(sys, build_scheme(4, 2));
    for (int i = 0; i < 4; ++i) {
        CHECK(max_abs(L.S.middleCols(2 * i, 2) - power(sys.A(), 3 - i) * sys.B()) < 1e-12);
    }
    CHECK(max_abs(L.Abar - power(sys.A(), 4)) == 0.0);
    CHECK(max_abs(L.Bbar - L.S * L.scheme.Q) == 0.0);
}

TEST_CASE("A = I annihilates the lifted input map") {
    RandomSource rs(32);
    for (int h = 2; h <= 5; ++h) {
        const LtiSystem sys(Matrix::Identity(3, 3), rs.matrix(3, 2));
        const LiftedSystem L = lift(sys, build_scheme(h, 2));
        CHECK(max_abs(L.Bbar) < 1e-14);
    }
}

TEST_CASE("rank of a fully cancelled input map is 0 against its scale") {
    const LtiSystem sys(Matrix::Identity(2, 2), vec({1.0, 0.0}));
    for (int h = 2; h <= 6; ++h) {
        const GramianBundle g = reachability_matrix(lift(sys, build_scheme(h, 1)), 3);
        CHECK(g.scale > 0.5);
        CHECK(numeric_rank(g.Rb, 100.0, g.scale) == 0);
    }
}

TEST_CASE("lift rejects a scheme with the wrong channel count") {
    CHECK_THROWS_AS(lift(rotation_plant(), build_scheme(2, 2)), std::invalid_argument);
}

TEST_CASE("one lifted step equals one simulated block") {
    RandomSource rs(33);
    for (int t = 0; t < 50; ++t) {
        const LtiSystem sys(rs.matrix(3, 3), rs.matrix(3, 2));
        const BlockScheme s = build_scheme(3, 2);
        const LiftedSystem L = lift(sys, s);
        const Vector x = rs.vector(3);
        const Vector w = rs.vector(s.latent_size());
        const auto traj = simulate(sys, x, per_step(unpack(w, s), 2));
        const Vector lifted = lifted_step(L, x, w);
        CHECK((lifted - traj.states.back()).norm() <= 1e-11 * std::max(1.0, lifted.norm()));
    }
}

TEST_CASE("block-boundary equivalence of lifted and per-step dynamics") {
    RandomSource rs(34);
    for (int t = 0; t < 120; ++t) {
        const int n = rs.integer(1, 5), m = rs.integer(1, 3), h = rs.integer(2, 4), b = rs.integer(1, 6);
        const LtiSystem sys(rs.scaled(n, rs.uniform(0.5, 1.2)), rs.matrix(n, m));
        const BlockScheme s = build_scheme(h, m);
        const LiftedSystem L = lift(sys, s);
        const Vector x0 = rs.vector(n);
        std::vector<Vector> u;
        Vector x = x0;
        std::vector<Vector> boundary{x0};
        for (int p = 0; p < b; ++p) {
            const Vector w = rs.vector(s.latent_size());
            for (auto& step : per_step(unpack(w, s), m)) u.push_back(step);
            x = lifted_step(L, x, w);
            boundary.push_back(x);
        }
        const auto traj = simulate(sys, x0, u);
        for (int p = 0; p <= b; ++p) {
            const Vector& ref = traj.states[p * h];
            CHECK((boundary[p] - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
        }
    }
}

TEST_CASE("reachability matrix and Gramian") {
    SUBCASE("b = 1") {
        const LiftedSystem L = lift(rotation_plant(), build_scheme(3, 1));
        const GramianBundle g = reachability_matrix(L, 1);
        CHECK(g.Rb == L.Bbar);
        CHECK(max_abs(g.G - L.Bbar * L.Bbar.transpose()) == 0.0);
    }
    SUBCASE("Gramian equals the term-by-term sum") {
        RandomSource rs(35);
        for (int t = 0; t < 30; ++t) {
            const LtiSystem sys(rs.scaled(4, 1.0), rs.matrix(4, 2));
            const LiftedSystem L = lift(sys, build_scheme(rs.integer(2, 4), 2));
            const GramianBundle g = reachability_matrix(L, 4);
            Matrix sum = Matrix::Zero(4, 4);
            Matrix Ap = Matrix::Identity(4, 4);
            for (int p = 0; p < 4; ++p) {
                sum += Ap * L.Bbar * L.Bbar.transpose() * Ap.transpose();
                Ap = Ap * L.Abar;
            }
            CHECK((g.G - sum).norm() <= 1e-11 * sum.norm());
        }
    }
    SUBCASE("Gramian symmetric and PSD") {
        RandomSource rs(36);
        for (int t = 0; t < 120; ++t) {
            const int n = rs.integer(1, 5), m = rs.integer(1, 3);
            const LtiSystem sys(rs.scaled(n, rs.uniform(0.3, 1.3)), rs.matrix(n, m));
            const LiftedSystem L = lift(sys, build_scheme(rs.integer(2, 4), m));
            const GramianBundle g = reachability_matrix(L, rs.integer(1, 6));
            const double ginf = g.G.cwiseAbs().rowwise().sum().maxCoeff();
            CHECK((g.G - g.G.transpose()).cwiseAbs().rowwise().sum().maxCoeff() <= 1e-12 * ginf);
            Eigen::SelfAdjointEigenSolver<Matrix> es(g.G);
            CHECK(es.eigenvalues().minCoeff() >= -1e-10 * g.G.norm());
        }
    }
    CHECK_THROWS_AS(reachability_matrix(lift(rotation_plant(), build_scheme(2, 1)), 0), std::invalid_argument);
}

TEST_CASE("h_sum") {
    SUBCASE("b = 1 is the identity") {
        const LiftedSystem L = lift(triangular_plant(), build_scheme(2, 2));
        CHECK(h_sum(L, 1) == Matrix::Identity(2, 2));
    }
    SUBCASE("Abar = I gives b I") {
        // rotation by 2pi/3 with h = 3 has Abar = I up to rounding
        const LiftedSystem L = lift(rotation_plant(), build_scheme(3, 1));
        CHECK(max_abs(h_sum(L, 5) - 5.0 * Matrix::Identity(2, 2)) < 1e-13);
    }
    SUBCASE("triangular plant, h = 2, b = 10: rank(H_b Bbar) = 2") {
        const LiftedSystem L = lift(triangular_plant(), build_scheme(2, 2));
        CHECK(numeric_rank(h_sum(L, 10) * L.Bbar, 100.0) == 2);
    }
    SUBCASE("matches the explicit power sum") {
        RandomSource rs(37);
        for (int t = 0; t < 30; ++t) {
            const LtiSystem sys(rs.scaled(3, 0.9), rs.matrix(3, 1));
            const LiftedSystem L = lift(sys, build_scheme(2, 1));
            Matrix sum = Matrix::Zero(3, 3);
            for (int i = 0; i < 7; ++i) sum += power(L.Abar, i);
            CHECK((h_sum(L, 7) - sum).norm() <= 1e-12 * sum.norm());
        }
    }
}

TEST_CASE("repetitive closed form: constant w over b blocks") {
    RandomSource rs(38);
    for (int t = 0; t < 100; ++t) {
        const int n = rs.integer(1, 4), m = rs.integer(1, 3), b = rs.integer(1, 6);
        const LtiSystem sys(rs.scaled(n, rs.uniform(0.5, 1.2)), rs.matrix(n, m));
        const LiftedSystem L = lift(sys, build_scheme(rs.integer(2, 4), m));
        const Vector x0 = rs.vector(n);
        const Vector w = rs.vector(L.scheme.latent_size());
        Vector x = x0;
        for (int p = 0; p < b; ++p) x = lifted_step(L, x, w);
        const Vector closed = power(L.Abar, b) * x0 + h_sum(L, b) * L.Bbar * w;
        CHECK((x - closed).norm() <= 1e-11 * std::max(1.0, x.norm()));
    }
}
