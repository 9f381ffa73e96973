#pragma once

#include "qhdiag/diagonalizer.hpp"

namespace qhd::detail {

bool offdiag_within(const KPForm& form, const ResidualOffdiag& residual, double tol);

/// Fills omega_sq, replays the sequence on original and sets residual and
/// the converged flag.
DiagonalResult finish_result(const KPForm& original, ShearSequence sequence, Vector m_eff, Vector d_eff, double tol);

}  // namespace qhd::detail
