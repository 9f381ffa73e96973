#pragma once

#include "qhdiag/diagonalizer.hpp"

#include <array>
#include <cstddef>

namespace qhd {

/// Scalar parameters of a three-particle Hamiltonian with diagonal kinetic
/// energy: masses, on-site constants d_i and couplings d_ij.
struct ThreeBodyParameters {
    std::array<double, 3> m{};
    std::array<double, 3> d{};
    std::array<double, 3> couplings{};  ///< d_01, d_02, d_12

    double coupling(std::size_t i, std::size_t j) const;
    void set_coupling(std::size_t i, std::size_t j, double value);
};

ThreeBodyParameters three_body_parameters(const QuadHamiltonian& h);

/// Pair acted on by each stage: (0,1), then (1,2), then (2,0).
inline constexpr std::array<IndexPair, 3> kThreeBodyStagePairs{{{0, 1}, {1, 2}, {2, 0}}};

/// Closed-form parameter update for one stage with beta slaved at the
/// current masses. With k = m_i/m_j and s = 1 + k alpha^2:
///   m_i' = m_i m_j / (m_j + m_i alpha^2),   m_j' = m_j s,
///   d_i' = (d_i + k alpha d_ij + k^2 alpha^2 d_j) / s^2,
///   d_j' = d_i alpha^2 + d_j - alpha d_ij,
///   d_ij' = [d_ij (1 - k alpha^2) - 2 alpha d_i + 2 k alpha d_j] / s,
///   d_il' = (d_il + k alpha d_jl) / s,   d_jl' = d_jl - alpha d_il.
ThreeBodyParameters three_body_stage(const ThreeBodyParameters& p, std::size_t stage, double alpha);

/// Primed, double-primed and final parameters for the given stage alphas.
std::array<ThreeBodyParameters, 3> three_body_stages(const ThreeBodyParameters& p,
                                                     const std::array<double, 3>& alphas);

/// The shear step a stage applies, beta slaved at the masses in p.
ShearStep three_body_stage_step(const ThreeBodyParameters& p, std::size_t stage, double alpha);

/// Remaining couplings (d_01, d_02, d_12) after all three stages.
std::array<double, 3> three_body_offdiagonals(const ThreeBodyParameters& p, const std::array<double, 3>& alphas);

enum class ThreeBodySolver { staged_newton, sweep };

struct ThreeBodyOptions {
    double tol = kDefaultTolerance;
    int max_iterations = 100;
    double fd_step = 1e-7;
    RootChoice root = RootChoice::smaller;
    SweepOptions sweep{};
};

/// n = 3. The staged solver finds (alpha_1, alpha_2, alpha_3) zeroing all
/// three final couplings by damped Newton with a forward-difference Jacobian,
/// starting from independent two-body roots. Throws ConvergenceError with the
/// best residual when every start fails.
DiagonalResult diagonalize_three_body(const QuadHamiltonian& h, ThreeBodySolver solver = ThreeBodySolver::staged_newton,
                                      const ThreeBodyOptions& options = {});

}  // namespace qhd
