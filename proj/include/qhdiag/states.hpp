#pragma once

#include "qhdiag/diagonalizer.hpp"
#include "qhdiag/model.hpp"
#include "qhdiag/normal_modes.hpp"
#include "qhdiag/shear.hpp"

#include <complex>
#include <vector>

namespace qhd {

/// psi(u) = exp(log_norm) exp(-1/2 u^T B u), normalized: log_norm = 1/4 log det(B / pi).
class GaussianState {
public:
    /// Throws ValidationError unless B is symmetric positive definite.
    explicit GaussianState(Matrix B);

    const Matrix& B() const noexcept { return b_; }
    double log_norm() const noexcept { return log_norm_; }
    std::size_t n() const noexcept { return static_cast<std::size_t>(b_.rows()); }

    /// log psi(u).
    double log_amplitude(const Vector& u) const;

    /// True iff B is diagonal to tol, i.e. psi factorizes over coordinates.
    bool is_product_state(double tol = 1e-12) const;

private:
    Matrix b_;
    double log_norm_;
};

/// sum_k (cu_k u_k + cp_k p_k).
struct LadderOp {
    std::vector<std::complex<double>> cu;
    std::vector<std::complex<double>> cp;

    void validate() const;
};

/// B = diag(m_eff_i omega_i / hbar). Throws UnstablePotential when any
/// omega_sq <= 0 (no normalizable ground state).
GaussianState ground_state_from_diagonal(const DiagonalResult& result, double hbar);

/// Ground state of the original Hamiltonian from the product state of the
/// diagonal frame: psi(u) = chi(L u) with L = M_total^-1, so B' = L^T B L.
/// det L = 1 leaves the normalization constant unchanged.
GaussianState entangled_ground_state(const GaussianState& state, const ShearSequence& seq);

/// Ground state built directly from normal modes:
/// B = sqrt(M) E diag(omega_s / hbar) E^T sqrt(M).
GaussianState ground_state_from_normal_modes(const QuadHamiltonian& h, const NormalModes& modes);

struct GroundStateCheck {
    double residual;  ///< ||hbar^2 B K B - V||_F / ||V||_F
    double energy;    ///< hbar^2 / 2 tr(K B)
};

/// For psi = exp(-1/2 u^T B u), H psi = E psi holds iff hbar^2 B K B = V.
GroundStateCheck ground_state_residual(const GaussianState& state, const KPForm& form, double hbar);

/// a_i = (m w u_i + i p_i) / sqrt(2 m hbar w), a_i^dagger its conjugate, in an
/// n-particle space.
struct LadderPair {
    LadderOp a;
    LadderOp a_dagger;
};

LadderPair ladder_pair(std::size_t i, std::size_t n, double m_eff, double omega, double hbar);

/// [x, y] = i hbar sum_k (xu_k yp_k - xp_k yu_k); a c-number for linear operators.
std::complex<double> commutator(const LadderOp& x, const LadderOp& y, double hbar);

}  // namespace qhd
