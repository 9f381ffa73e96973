#pragma once

#include "qhdiag/compare.hpp"
#include "qhdiag/model.hpp"
#include "qhdiag/shear.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qhd::cli {

inline constexpr const char* kToolName = "qhdiag";
inline constexpr const char* kToolVersion = "0.1.0";

enum class OutputFormat { csv, json };

enum ExitCode : int { kExitOk = 0, kExitInvalidInput = 1, kExitNotConverged = 2 };

struct RunConfig {
    std::filesystem::path input;
    std::string method = "all";
    double tol = kDefaultTolerance;
    std::size_t max_sweeps = 0;
    RootChoice root = RootChoice::smaller;
    Pivot pivot = Pivot::largest_offdiag;
    std::filesystem::path out = "out";
    OutputFormat format = OutputFormat::csv;

    /// tol > 0; throws ValidationError otherwise.
    void validate() const;
};

/// Methods named by config.method that apply to h; "all" expands to
/// applicable_methods(h). Throws ValidationError for an unknown name or a
/// method whose preconditions h does not meet.
std::vector<Method> resolve_methods(const QuadHamiltonian& h, const std::string& method);

/// FNV-1a 64 over the command name, the input document and every option
/// that affects results (the output directory is excluded).
std::string config_hash(const std::string& command, const RunConfig& config, const std::string& input_text);

/// frequencies.{csv,json}, residuals.{csv,json}, sequence.json.
/// 0 when every method is exact, 2 otherwise (files still written), 1 on invalid input.
int cmd_diagonalize(const RunConfig& config, std::ostream& err);

/// compare.{csv,json}: per-method ZPE, sorted spectra and pairwise gaps.
/// 2 only when an iterative method (sweep, three_body) fails; the Bravais
/// closed form row is informational.
int cmd_compare(const RunConfig& config, std::ostream& err);

/// state.json: exponent matrices in the diagonal and original frames,
/// eigen-equation residual and E0 per method. 1 on an unstable potential.
int cmd_groundstate(const RunConfig& config, std::ostream& err);

/// Parses argv and dispatches. Several --input files run in parallel, each
/// writing to <out>/<input stem>/; the exit status is the largest one.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qhd::cli
