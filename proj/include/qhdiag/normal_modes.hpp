#pragma once

#include "qhdiag/model.hpp"

#include <span>
#include <vector>

namespace qhd {

/// Eigen-pairs of the mass-scaled matrix D. omega_sq is ascending; column s of
/// eigvecs is the mode vector e_s, signed so its first nonzero entry is positive.
struct NormalModes {
    Vector omega_sq;
    Matrix eigvecs;
};

/// D_ij = V_ij / sqrt(m_i m_j).
Matrix mass_scaled_matrix(const QuadHamiltonian& h);

/// Symmetric eigensolver (cyclic Jacobi). Throws ValidationError if D is
/// not symmetric to 1e-12 relative.
NormalModes eigendecompose(const Matrix& D);

/// eigendecompose(mass_scaled_matrix(h)).
NormalModes normal_modes(const QuadHamiltonian& h);

/// Closed-form spectrum of the nearest-neighbour Bravais chain:
/// phi11/m + 2 (phi12/m) cos(s pi / (n+1)), s = 1..n, sorted ascending.
std::vector<double> toeplitz_frequencies(std::size_t n, double phi11, double phi12, double m);

/// sum_s hbar sqrt(omega_sq_s) / 2. Throws UnstablePotential if any
/// omega_sq < 0, carrying the negative values.
double zero_point_energy(std::span<const double> omega_sq, double hbar);
double zero_point_energy(const Vector& omega_sq, double hbar);

}  // namespace qhd
