#pragma once

#include "qhdiag/diagonalizer.hpp"
#include "qhdiag/model.hpp"
#include "qhdiag/normal_modes.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qhd {

enum class Method { oracle, toeplitz, two_body, pairs_chain, bravais, three_body, sweep };

std::string to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

/// Methods whose preconditions h satisfies, oracle first.
std::vector<Method> applicable_methods(const QuadHamiltonian& h);

struct MethodOptions {
    double tol = kDefaultTolerance;
    std::size_t max_sweeps = 0;
    RootChoice root = RootChoice::smaller;
    Pivot pivot = Pivot::largest_offdiag;
};

/// Outcome of one method on one Hamiltonian. On failure error is set and the
/// spectrum is empty.
struct MethodRun {
    Method method = Method::oracle;
    std::optional<DiagonalResult> diagonal;   ///< shear-based methods only
    std::optional<NormalModes> modes;         ///< oracle only
    Vector omega_sq_sorted;
    bool exact = false;                       ///< oracle/toeplitz, or converged shear result
    std::optional<double> zpe;
    std::string zpe_error;  ///< set when the spectrum has negative entries
    std::string error;
};

MethodRun run_method(const QuadHamiltonian& h, Method method, const MethodOptions& options = {});

struct ZpeDifference {
    Method method;
    Method reference;
    double max_abs_omega_sq_diff;
    std::optional<double> abs_zpe_diff;
};

struct ZpeReport {
    std::vector<MethodRun> runs;
    std::vector<ZpeDifference> differences;  ///< every ordered pair (a, b), a listed before b
};

/// Runs each method and tabulates zero-point energies and pairwise gaps.
/// Reporting only: nothing is asserted and per-method failures become entries.
ZpeReport zpe_compare(const QuadHamiltonian& h, const std::vector<Method>& methods, const MethodOptions& options = {});

}  // namespace qhd
