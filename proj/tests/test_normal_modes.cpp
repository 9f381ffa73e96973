#include "oracles.hpp"

#include "qhdiag/error.hpp"
#include "qhdiag/normal_modes.hpp"

#include <doctest.h>

#include <cmath>

using namespace qhd;

TEST_CASE("mass-scaled matrix") {
    Matrix phi(2, 2);
    phi << 2, 1, 1, 2;
    CHECK(mass_scaled_matrix(QuadHamiltonian::from_force_constants(Vector::Ones(2), phi)) == phi);

    Vector m(2);
    m << 4, 1;
    Matrix expected(2, 2);
    expected << 0.5, 0.5, 0.5, 2;
    CHECK(mass_scaled_matrix(QuadHamiltonian::from_force_constants(m, phi)).isApprox(expected, 1e-15));

    Matrix diag = Matrix::Zero(3, 3);
    diag.diagonal() << 3, 5, 7;
    Vector m3(3);
    m3 << 1, 2, 4;
    const Matrix D = mass_scaled_matrix(QuadHamiltonian::from_force_constants(m3, diag));
    CHECK(D(0, 1) == 0.0);
    CHECK(D(1, 1) == doctest::Approx(2.5));
    CHECK(D(2, 2) == doctest::Approx(1.75));
}

TEST_CASE("eigendecompose on small closed-form cases") {
    Matrix D(2, 2);
    D << 2, 1, 1, 2;
    NormalModes nm = eigendecompose(D);
    const auto ref = oracle::eig2(2, 1, 2);
    CHECK(nm.omega_sq(0) == doctest::Approx(ref[0]).epsilon(1e-14));
    CHECK(nm.omega_sq(1) == doctest::Approx(ref[1]).epsilon(1e-14));

    Matrix T(3, 3);
    T << 2, 1, 0, 1, 2, 1, 0, 1, 2;
    nm = eigendecompose(T);
    CHECK(nm.omega_sq(0) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
    CHECK(nm.omega_sq(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(nm.omega_sq(2) == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("diagonal input gives sorted diagonal and a permutation") {
    Matrix D = Matrix::Zero(3, 3);
    D.diagonal() << 5, 1, 3;
    const NormalModes nm = eigendecompose(D);
    CHECK(nm.omega_sq(0) == 1.0);
    CHECK(nm.omega_sq(1) == 3.0);
    CHECK(nm.omega_sq(2) == 5.0);
    for (Eigen::Index c = 0; c < 3; ++c) {
        int ones = 0;
        for (Eigen::Index r = 0; r < 3; ++r) {
            const double x = nm.eigvecs(r, c);
            CHECK((x == 0.0 || x == 1.0));
            ones += x == 1.0;
        }
        CHECK(ones == 1);
    }
}

TEST_CASE("eigendecompose rejects asymmetric input") {
    Matrix D(2, 2);
    D << 1, 0.5, 0.4, 1;
    CHECK_THROWS_AS(eigendecompose(D), ValidationError);
}

TEST_CASE("property: eigen-pairs are orthonormal and satisfy D e = w2 e") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + trial % 8;
        const QuadHamiltonian h = oracle::random_stable(rng, n);
        const Matrix D = mass_scaled_matrix(h);
        const NormalModes nm = eigendecompose(D);
        const Eigen::Index k = static_cast<Eigen::Index>(n);
        CHECK((nm.eigvecs.transpose() * nm.eigvecs - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((nm.eigvecs * nm.eigvecs.transpose() - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-10);
        for (Eigen::Index s = 0; s < k; ++s) {
            CHECK((D * nm.eigvecs.col(s) - nm.omega_sq(s) * nm.eigvecs.col(s)).norm() <= 1e-10 * std::max(1.0, D.norm()));
        }
        for (Eigen::Index s = 1; s < k; ++s) CHECK(nm.omega_sq(s - 1) <= nm.omega_sq(s));
        CHECK(oracle::max_rel_diff(oracle::to_std(nm.omega_sq), oracle::omega_sq(h)) <= 1e-12);
    }
}

TEST_CASE("toeplitz closed form") {
    auto w = toeplitz_frequencies(2, 2.0, 1.0, 1.0);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(3.0).epsilon(1e-15));

    w = toeplitz_frequencies(5, 3.0, 0.0, 2.0);
    for (double x : w) CHECK(x == 1.5);

    w = toeplitz_frequencies(3, 2.0, 1.0, 1.0);
    CHECK(w[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(w[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));

    for (std::size_t n : {1u, 4u, 7u, 12u}) {
        CHECK(oracle::max_abs_diff(toeplitz_frequencies(n, 2.5, -0.7, 1.3), oracle::toeplitz(n, 2.5, -0.7, 1.3)) <= 1e-13);
    }
}

TEST_CASE("toeplitz agrees with the eigensolver on nearest-neighbour chains") {
    for (std::size_t n : {2u, 3u, 6u, 9u}) {
        const std::vector<double> m(n, 1.7), d(n, 1.1), nn(n - 1, 0.4);
        const auto ref = toeplitz_frequencies(n, 2.2, 0.4, 1.7);
        CHECK(oracle::max_abs_diff(oracle::to_std(normal_modes(build_nn_chain(m, d, nn)).omega_sq), ref) <= 1e-13);
    }
}

TEST_CASE("zero-point energy") {
    const std::vector<double> w{1.0, 3.0};
    CHECK(zero_point_energy(w, 1.0) == doctest::Approx((1.0 + std::sqrt(3.0)) / 2.0).epsilon(1e-15));
    CHECK(zero_point_energy(std::vector<double>{}, 1.0) == 0.0);
    CHECK(zero_point_energy(std::vector<double>{4.0}, 2.0) == 2.0);

    const std::vector<double> bad{1.0, -2.0, -0.5};
    try {
        zero_point_energy(bad, 1.0);
        FAIL("expected UnstablePotential");
    } catch (const UnstablePotential& e) {
        CHECK(e.offending() == std::vector<double>{-2.0, -0.5});
        CHECK(std::string(e.what()).find("-2") != std::string::npos);
    }
}
