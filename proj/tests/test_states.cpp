#include "oracles.hpp"

#include "qhdiag/diagonalizer.hpp"
#include "qhdiag/error.hpp"
#include "qhdiag/normal_modes.hpp"
#include "qhdiag/states.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace qhd;
using cd = std::complex<double>;

namespace {

DiagonalResult single(double m, double d) {
    Vector mv(1);
    mv << m;
    return diagonalize_general_sweep(QuadHamiltonian::from_force_constants(mv, Matrix::Constant(1, 1, 2.0 * d)));
}

}  // namespace

TEST_CASE("gaussian state validation and normalization") {
    CHECK_THROWS_AS(GaussianState(-Matrix::Identity(2, 2)), ValidationError);
    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 0.3;
    CHECK_THROWS_AS(GaussianState{asym}, ValidationError);
    CHECK_THROWS_AS(GaussianState(Matrix(0, 0)), ValidationError);

    const GaussianState s(Matrix::Identity(1, 1) * 2.0);
    CHECK(s.log_norm() == doctest::Approx(0.25 * std::log(2.0 / std::numbers::pi)));
    // |psi|^2 integrates to one: sqrt(pi / B) exp(2 log_norm) = 1
    CHECK(std::sqrt(std::numbers::pi / 2.0) * std::exp(2.0 * s.log_norm()) == doctest::Approx(1.0));
    Vector u(1);
    u << 0.7;
    CHECK(s.log_amplitude(u) == doctest::Approx(s.log_norm() - 0.5 * 2.0 * 0.49));
}

TEST_CASE("ground state from a single oscillator") {
    const DiagonalResult r = single(1.0, 0.5);
    const GaussianState s = ground_state_from_diagonal(r, 1.0);
    CHECK(s.B()(0, 0) == doctest::Approx(1.0));
    Vector m(1);
    m << 1.0;
    const KPForm form = to_kpform(QuadHamiltonian::from_force_constants(m, Matrix::Constant(1, 1, 1.0)));
    const GroundStateCheck c = ground_state_residual(GaussianState(Matrix::Identity(1, 1)), form, 1.0);
    CHECK(c.residual == 0.0);
    CHECK(c.energy == 0.5);
}

TEST_CASE("two-body worked example ground state") {
    const QuadHamiltonian h = build_bravais_chain(2, 1.0, 1.0, 1.0);
    const DiagonalResult r = diagonalize_two_body(h);
    const GaussianState product = ground_state_from_diagonal(r, 1.0);
    CHECK(product.B()(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(product.B()(1, 1) == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-15));
    CHECK(product.B()(0, 1) == 0.0);
    CHECK(product.is_product_state());

    const GaussianState ent = entangled_ground_state(product, r.sequence);
    CHECK_FALSE(ent.is_product_state());
    CHECK(ent.log_norm() == doctest::Approx(product.log_norm()).epsilon(1e-14));
    const GroundStateCheck c = ground_state_residual(ent, to_kpform(h), 1.0);
    CHECK(c.residual <= 1e-10);
    CHECK(c.energy == doctest::Approx((1.0 + std::sqrt(3.0)) / 2.0).epsilon(1e-14));

    Vector m = Vector::Ones(2);
    Matrix V(2, 2);
    V << 2, 1, 1, 2;
    CHECK((ent.B() - oracle::ground_state_B(m, V, 1.0)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("identity sequence leaves a state unchanged") {
    Matrix B = Matrix::Zero(3, 3);
    B.diagonal() << 1, 2, 3;
    const GaussianState s(B);
    CHECK(entangled_ground_state(s, ShearSequence(3)).B() == B);
    CHECK_THROWS_AS(entangled_ground_state(s, ShearSequence(2)), ValidationError);
}

TEST_CASE("ground state needs positive frequencies") {
    Matrix phi(2, 2);
    phi << 1, 3, 3, 1;
    const DiagonalResult r = diagonalize_general_sweep(QuadHamiltonian::from_force_constants(Vector::Ones(2), phi));
    try {
        ground_state_from_diagonal(r, 1.0);
        FAIL("expected UnstablePotential");
    } catch (const UnstablePotential& e) {
        REQUIRE(e.offending().size() == 1);
        CHECK(e.offending()[0] == doctest::Approx(-2.0));
    }
}

TEST_CASE("random diagonal case: residual zero and E0 = sum hbar w / 2") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 1 + trial % 5;
        const double hbar = oracle::uniform(rng, 0.5, 2.0);
        Vector m(n);
        Matrix phi = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            m(i) = oracle::uniform(rng, 0.2, 5.0);
            phi(i, i) = oracle::uniform(rng, 0.2, 5.0);
        }
        const QuadHamiltonian h = QuadHamiltonian::from_force_constants(m, phi, hbar);
        const DiagonalResult r = diagonalize_general_sweep(h);
        const GaussianState s = ground_state_from_diagonal(r, hbar);
        const GroundStateCheck c = ground_state_residual(s, to_kpform(h), hbar);
        double e = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) e += 0.5 * hbar * std::sqrt(phi(i, i) / m(i));
        CHECK(c.residual <= 1e-15);
        CHECK(c.energy == doctest::Approx(e).epsilon(1e-14));
    }
}

TEST_CASE("property: entangled states solve the original eigen-equation") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + trial % 6;
        const double hbar = oracle::uniform(rng, 0.5, 2.0);
        const QuadHamiltonian base = oracle::random_stable(rng, n);
        const QuadHamiltonian h(base.masses(), PotentialParameters{base.d_diag(), base.couplings()}, hbar);
        const DiagonalResult r = diagonalize_general_sweep(h);
        REQUIRE(r.converged);
        const GaussianState ent = entangled_ground_state(ground_state_from_diagonal(r, hbar), r.sequence);
        const GroundStateCheck c = ground_state_residual(ent, to_kpform(h), hbar);
        CHECK(c.residual <= 1e-9);
        const double zpe = oracle::zpe(oracle::omega_sq(h), hbar);
        CHECK(std::abs(c.energy - zpe) <= 1e-9 * zpe);

        const GaussianState direct = ground_state_from_normal_modes(h, normal_modes(h));
        CHECK((direct.B() - ent.B()).cwiseAbs().maxCoeff() <= 1e-8 * ent.B().cwiseAbs().maxCoeff());
    }
}

TEST_CASE("ladder operator coefficients") {
    const LadderPair lp = ladder_pair(0, 1, 1.0, 1.0, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(lp.a_dagger.cu[0] - cd(r, 0)) <= 1e-15);
    CHECK(std::abs(lp.a_dagger.cp[0] - cd(0, -r)) <= 1e-15);
    CHECK(lp.a.cu[0] == std::conj(lp.a_dagger.cu[0]));
    CHECK(lp.a.cp[0] == std::conj(lp.a_dagger.cp[0]));
    CHECK_THROWS_AS(ladder_pair(0, 1, 1.0, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(ladder_pair(0, 1, 1.0, -1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(ladder_pair(2, 2, 1.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("commutators") {
    const LadderPair a0 = ladder_pair(0, 2, 0.7, 1.3, 1.1);
    const LadderPair a1 = ladder_pair(1, 2, 2.0, 0.4, 1.1);
    CHECK(std::abs(commutator(a0.a, a0.a_dagger, 1.1) - cd(1, 0)) <= 1e-12);
    CHECK(std::abs(commutator(a0.a, a1.a, 1.1)) <= 1e-12);
    CHECK(std::abs(commutator(a0.a, a1.a_dagger, 1.1)) <= 1e-12);
    CHECK(std::abs(commutator(a0.a_dagger, a0.a, 1.1) - cd(-1, 0)) <= 1e-12);

    LadderOp u1{{cd(1), cd(2)}, {cd(0), cd(0)}};
    LadderOp u2{{cd(0.5), cd(-3)}, {cd(0), cd(0)}};
    CHECK(commutator(u1, u2, 1.0) == cd(0, 0));

    LadderOp short_op{{cd(1)}, {cd(0)}};
    CHECK_THROWS_AS(commutator(u1, short_op, 1.0), ValidationError);
    LadderOp zero{{cd(0)}, {cd(0)}};
    CHECK_THROWS_AS(zero.validate(), ValidationError);
}
