#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace qhd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Pair couplings d_ij (i < j) in packed strict-upper storage. Lookup is
/// symmetric; self pairs are rejected.
class PairCouplings {
public:
    PairCouplings() = default;
    explicit PairCouplings(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, double value);

    /// Dense symmetric matrix with zero diagonal.
    Matrix dense() const;

    bool operator==(const PairCouplings&) const = default;

private:
    std::size_t index(std::size_t i, std::size_t j) const;

    std::size_t n_ = 0;
    std::vector<double> packed_;
};

/// Symmetrized potential parameters: sum_i d_i u_i^2 + sum_{i<j} d_ij u_i u_j.
struct PotentialParameters {
    Vector d_diag;
    PairCouplings d_off;
};

/// Splits a raw force-constant matrix into d_i = phi_ii / 2 and
/// d_ij = (phi_ij + phi_ji) / 2.
PotentialParameters symmetrize(const Matrix& phi);

/// H = sum p_i^2 / 2m_i + sum d_i u_i^2 + sum_{i<j} d_ij u_i u_j.
///
/// Immutable once built. The potential is not required to be positive
/// definite; stability is a property checked by the consumers that need it.
class QuadHamiltonian {
public:
    QuadHamiltonian(Vector masses, PotentialParameters potential, double hbar = 1.0);

    /// Builds from a raw (possibly non-symmetric) force-constant matrix.
    static QuadHamiltonian from_force_constants(const Vector& masses, const Matrix& phi,
                                                double hbar = 1.0);

    std::size_t n() const noexcept { return static_cast<std::size_t>(masses_.size()); }
    double hbar() const noexcept { return hbar_; }
    const Vector& masses() const noexcept { return masses_; }
    double mass(std::size_t i) const { return masses_(static_cast<Eigen::Index>(i)); }
    const Vector& d_diag() const noexcept { return potential_.d_diag; }
    double d(std::size_t i) const { return potential_.d_diag(static_cast<Eigen::Index>(i)); }
    double coupling(std::size_t i, std::size_t j) const { return potential_.d_off(i, j); }
    const PairCouplings& couplings() const noexcept { return potential_.d_off; }

private:
    Vector masses_;
    PotentialParameters potential_;
    double hbar_;
};

/// H = 1/2 p^T K p + 1/2 u^T V u. Closed under shear conjugation.
struct KPForm {
    Matrix K;
    Matrix V;

    /// Validates symmetry (1e-12 relative) and positive-definite K, then
    /// stores both matrices exactly symmetric.
    KPForm(Matrix kinetic, Matrix potential);

    std::size_t n() const noexcept { return static_cast<std::size_t>(K.rows()); }
};

/// K = diag(1/m), V_ii = 2 d_i, V_ij = d_ij.
KPForm to_kpform(const QuadHamiltonian& h);

/// Inverse of to_kpform; K must be diagonal.
QuadHamiltonian from_kpform(const KPForm& form, double hbar = 1.0);

/// Nearest-neighbour chain: d_{i,i+1} = d_nn[i], all longer-range couplings zero.
QuadHamiltonian build_nn_chain(std::span<const double> masses, std::span<const double> d_diag,
                               std::span<const double> d_nn, double hbar = 1.0);

/// Translation-invariant nearest-neighbour chain. n must be even.
QuadHamiltonian build_bravais_chain(std::size_t n, double m, double d1, double d12,
                                    double hbar = 1.0);

/// True when h has identical masses, identical d_i, identical nearest-neighbour
/// couplings, no longer-range couplings and even n.
bool is_bravais_chain(const QuadHamiltonian& h);

}  // namespace qhd
