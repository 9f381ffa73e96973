#include "oracles.hpp"

#include "qhdiag/error.hpp"
#include "qhdiag/three_body.hpp"

#include <doctest.h>

#include <cmath>

using namespace qhd;

namespace {

ThreeBodyParameters random_parameters(std::mt19937_64& rng) {
    ThreeBodyParameters p;
    for (int i = 0; i < 3; ++i) {
        p.m[i] = oracle::uniform(rng, 0.1, 10.0);
        p.d[i] = oracle::uniform(rng, 0.1, 10.0);
        p.couplings[i] = oracle::uniform(rng, -2.0, 2.0);
    }
    return p;
}

KPForm form_of(const ThreeBodyParameters& p) {
    Matrix K = Matrix::Zero(3, 3), V = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) {
        K(i, i) = 1.0 / p.m[i];
        V(i, i) = 2.0 * p.d[i];
    }
    V(0, 1) = V(1, 0) = p.coupling(0, 1);
    V(0, 2) = V(2, 0) = p.coupling(0, 2);
    V(1, 2) = V(2, 1) = p.coupling(1, 2);
    return KPForm(K, V);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("parameters read from a hamiltonian") {
    Vector m(3);
    m << 1, 2, 3;
    Matrix phi(3, 3);
    phi << 2, 0.1, 0.2, 0.1, 4, 0.3, 0.2, 0.3, 6;
    const ThreeBodyParameters p = three_body_parameters(QuadHamiltonian::from_force_constants(m, phi));
    CHECK(p.m[2] == 3.0);
    CHECK(p.d[1] == 2.0);
    CHECK(p.coupling(0, 2) == 0.2);
    CHECK(p.coupling(2, 1) == 0.3);
    CHECK_THROWS_AS(p.coupling(1, 1), ValidationError);
    CHECK_THROWS_AS(three_body_parameters(build_bravais_chain(2, 1, 1, 1)), ValidationError);
}

TEST_CASE("first stage matches the explicit spectator-coupling formula") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const ThreeBodyParameters p = random_parameters(rng);
        const double a = oracle::uniform(rng, -3.0, 3.0);
        const double k = p.m[0] / p.m[1];
        const double expected = (p.coupling(0, 2) + k * a * p.coupling(1, 2)) / (1.0 + k * a * a);
        const KPForm g = conjugate(form_of(p), three_body_stage_step(p, 0, a));
        CHECK(rel(g.V(0, 2), expected) <= 1e-12);
        CHECK(rel(three_body_stage(p, 0, a).coupling(0, 2), expected) <= 1e-12);
    }
}

TEST_CASE("property: every stage formula matches matrix conjugation") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 150; ++trial) {
        const ThreeBodyParameters p = random_parameters(rng);
        const std::size_t stage = static_cast<std::size_t>(trial % 3);
        const double a = oracle::uniform(rng, -3.0, 3.0);
        const ThreeBodyParameters q = three_body_stage(p, stage, a);
        const KPForm g = conjugate(form_of(p), three_body_stage_step(p, stage, a));
        for (int i = 0; i < 3; ++i) {
            CHECK(rel(q.m[i], 1.0 / g.K(i, i)) <= 1e-12);
            CHECK(rel(q.d[i], g.V(i, i) / 2.0) <= 1e-12);
        }
        CHECK(rel(q.coupling(0, 1), g.V(0, 1)) <= 1e-12);
        CHECK(rel(q.coupling(0, 2), g.V(0, 2)) <= 1e-12);
        CHECK(rel(q.coupling(1, 2), g.V(1, 2)) <= 1e-12);
    }
    CHECK_THROWS_AS(three_body_stage(ThreeBodyParameters{}, 3, 0.0), ValidationError);
}

TEST_CASE("the staged chain composes the three stages") {
    std::mt19937_64 rng(33);
    const ThreeBodyParameters p = random_parameters(rng);
    const std::array<double, 3> alphas{0.3, -0.7, 1.1};
    const auto stages = three_body_stages(p, alphas);
    const ThreeBodyParameters one = three_body_stage(p, 0, alphas[0]);
    const ThreeBodyParameters two = three_body_stage(one, 1, alphas[1]);
    const ThreeBodyParameters three = three_body_stage(two, 2, alphas[2]);
    CHECK(stages[0].couplings == one.couplings);
    CHECK(stages[1].couplings == two.couplings);
    CHECK(stages[2].couplings == three.couplings);
    CHECK(three_body_offdiagonals(p, alphas) == three.couplings);
}

TEST_CASE("uncoupled three-body is the identity") {
    Vector m(3);
    m << 1, 2, 4;
    Matrix phi = Matrix::Zero(3, 3);
    phi.diagonal() << 2, 3, 4;
    const QuadHamiltonian h = QuadHamiltonian::from_force_constants(m, phi);
    const DiagonalResult r = diagonalize_three_body(h);
    CHECK(r.converged);
    CHECK(r.sequence.composed_map().isApprox(Matrix::Identity(3, 3), 1e-15));
    CHECK(r.omega_sq(0) == doctest::Approx(2.0));
    CHECK(r.omega_sq(1) == doctest::Approx(1.5));
    CHECK(r.omega_sq(2) == doctest::Approx(1.0));
}

TEST_CASE("tridiagonal three-body") {
    const std::vector<double> m{1, 1, 1}, d{1, 1, 1}, nn{1, 1};
    const QuadHamiltonian h = build_nn_chain(m, d, nn);
    for (ThreeBodySolver s : {ThreeBodySolver::staged_newton, ThreeBodySolver::sweep}) {
        const DiagonalResult r = diagonalize_three_body(h, s);
        CHECK(r.converged);
        const auto w = oracle::sorted(oracle::to_std(r.omega_sq));
        CHECK(w[0] == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-10));
        CHECK(w[1] == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(w[2] == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-10));
    }
}

TEST_CASE("property: staged Newton diagonalizes random stable instances") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 40; ++trial) {
        const QuadHamiltonian h = oracle::random_stable(rng, 3);
        const DiagonalResult r = diagonalize_three_body(h);
        REQUIRE(r.converged);
        const KPForm replay = conjugate(to_kpform(h), r.sequence);
        CHECK(residual_offdiag(replay).potential <= 1e-10 * replay.V.cwiseAbs().maxCoeff());
        CHECK(residual_offdiag(replay).kinetic <= 1e-12 * replay.K.cwiseAbs().maxCoeff());
        CHECK(oracle::max_abs_diff(oracle::sorted(oracle::to_std(r.omega_sq)), oracle::omega_sq(h)) <= 1e-8);
        CHECK(r.sequence.steps().size() == 3);
    }
}

TEST_CASE("three-body rejects other sizes") {
    CHECK_THROWS_AS(diagonalize_three_body(build_bravais_chain(2, 1, 1, 1)), ValidationError);
}
