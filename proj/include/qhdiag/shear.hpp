#pragma once

#include "qhdiag/model.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace qhd {

/// One pair transformation U = exp(alpha u_j d/du_i) exp(beta u_i d/du_j).
///
/// Under conjugation U^dagger (.) U the coordinates transform as
///   u_i -> (1 + alpha beta) u_i - alpha u_j,   u_j -> u_j - beta u_i,
/// and the momenta contragrediently, so the map is a unit-determinant
/// point transformation.
struct ShearStep {
    std::size_t i = 0;
    std::size_t j = 1;
    double alpha = 0.0;
    double beta = 0.0;

    void validate(std::size_t n) const;
};

/// Ordered steps together with the composed coordinate map M_total, so that
/// U^dagger u U = M_total u for U = U_1 ... U_N.
class ShearSequence {
public:
    explicit ShearSequence(std::size_t n = 0);

    void append(const ShearStep& step);

    std::size_t n() const noexcept { return n_; }
    const std::vector<ShearStep>& steps() const noexcept { return steps_; }
    const Matrix& composed_map() const noexcept { return composed_; }

private:
    std::size_t n_;
    std::vector<ShearStep> steps_;
    Matrix composed_;
};

/// Identity except for the (i, j) block [[1 + alpha beta, -alpha], [-beta, 1]].
Matrix step_coordinate_map(const ShearStep& step, std::size_t n);

/// Contragredient momentum map (M^-1)^T; (i, j) block [[1, beta], [alpha, 1 + alpha beta]].
Matrix step_momentum_map(const ShearStep& step, std::size_t n);

/// K -> N^T K N, V -> M^T V M, both re-symmetrized.
KPForm conjugate(const KPForm& form, const ShearStep& step);

/// Replays every step of seq on form.
KPForm conjugate(const KPForm& form, const ShearSequence& seq);

/// beta = -alpha / (alpha^2 + m_j / m_i): keeps a diagonal kinetic matrix
/// diagonal after the (i, j) step.
double beta_for_alpha(double alpha, double m_i, double m_j);

/// The two shear parameters that zero the (i, j) potential coupling,
///   alpha = -[(d_i k_ji - d_j) +/- sqrt((d_i k_ji - d_j)^2 + d_ij^2 k_ji)] / d_ij.
struct AlphaRoots {
    double plus;
    double minus;

    /// The root with the smaller magnitude (rotation angle below pi/4 in
    /// mass-scaled coordinates).
    double smaller() const noexcept;
};

enum class RootChoice { smaller, plus, minus };

/// Empty when d_ij == 0 (no coupling: alpha = 0 is the canonical root).
/// Evaluated without cancellation: the larger-magnitude root directly, the
/// other from alpha_plus * alpha_minus = -k_ji.
std::optional<AlphaRoots> alpha_roots(double d_i, double d_j, double d_ij, double k_ji);

double select_root(const std::optional<AlphaRoots>& roots, RootChoice choice);

/// Step on (i, j) that zeroes V_ij of the current form, with alpha from the
/// current effective parameters and beta slaved at the current masses 1/K_ii.
/// Requires K diagonal on rows i and j.
ShearStep zeroing_step(const KPForm& form, std::size_t i, std::size_t j, RootChoice choice);

}  // namespace qhd
