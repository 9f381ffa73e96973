#pragma once

#include "qhdiag/model.hpp"
#include "qhdiag/shear.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace qhd {

/// Largest absolute off-diagonal entries of K and V.
struct ResidualOffdiag {
    double kinetic = 0.0;
    double potential = 0.0;
};

ResidualOffdiag residual_offdiag(const KPForm& form);

/// A Hamiltonian brought to sum_i p_i^2 / 2 m_eff_i + d_eff_i u_i^2 in the
/// original observables, together with the shear sequence that does it.
///
/// residual is measured by replaying sequence on the original form, so it is
/// an audit of the stored parameters rather than a by-product of computing them.
struct DiagonalResult {
    Vector m_eff;
    Vector d_eff;
    Vector omega_sq;  ///< 2 d_eff_i / m_eff_i, per particle (not sorted)
    ShearSequence sequence;
    ResidualOffdiag residual;
    bool converged = false;
    std::size_t sweeps = 0;
    std::vector<double> residual_trace;  ///< relative V residual after each sweep
    double max_kinetic_offdiag = 0.0;    ///< largest K off-diagonal met at any step
};

/// Relative tolerance on off-diagonals used by every diagonalizer.
inline constexpr double kDefaultTolerance = 1e-12;

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Closed-form n = 2 solution: one step with alpha from alpha_roots and beta
/// slaved to it. d_12 = 0 yields the identity sequence.
DiagonalResult diagonalize_two_body(const QuadHamiltonian& h, RootChoice root = RootChoice::smaller,
                                    double tol = kDefaultTolerance);

/// (0,1), (2,3), ... ; n must be even.
std::vector<IndexPair> default_pairing(std::size_t n);

/// Independent two-body solutions on disjoint pairs. Every coupling outside
/// the pairs must vanish, otherwise ValidationError("not pair-decoupled ...")
/// names the offending pair.
DiagonalResult diagonalize_disjoint_pairs_chain(const QuadHamiltonian& h, std::span<const IndexPair> pairs,
                                                RootChoice root = RootChoice::smaller,
                                                double tol = kDefaultTolerance);

/// Closed form for the uniform chain with alpha = -1 on every pair:
/// m_eff = (m/2, 2m, ...), d_eff = ((2 d1 - d12)/4, 2 d1 + d12, ...).
///
/// The residual is replayed against the full nearest-neighbour chain, so the
/// result is flagged unconverged whenever inter-pair couplings survive (n > 2
/// with d12 != 0).
DiagonalResult bravais_closed_form(std::size_t n, double m, double d1, double d12,
                                   double tol = kDefaultTolerance);

enum class Pivot { largest_offdiag, cyclic };

struct SweepOptions {
    double tol = kDefaultTolerance;
    std::size_t max_sweeps = 0;  ///< 0 means 50 n
    Pivot pivot = Pivot::largest_offdiag;
    RootChoice root = RootChoice::smaller;
};

/// Repeated zeroing steps until max |V_ij| <= tol max |V|. One sweep is
/// n(n-1)/2 steps. An exhausted budget returns converged = false with the
/// residual trace attached; it does not throw.
DiagonalResult diagonalize_general_sweep(const QuadHamiltonian& h, const SweepOptions& options = {});

}  // namespace qhd
