#pragma once

#include "qhdiag/model.hpp"

#include <filesystem>
#include <string_view>

namespace qhd {

/// Parses a Hamiltonian spec document. Two shapes are accepted:
///
///   {"n": 2, "hbar": 1.0, "masses": [1, 1], "phi": [[2, 1], [1, 2]]}
///   {"chain": {"n": 4, "m": 1, "d1": 1, "d12": 1}, "hbar": 1.0}
///
/// "n" and "hbar" are optional in the first shape; "hbar" defaults to 1.
/// Unknown fields are rejected. Errors are ValidationError with the field
/// path (or parser line/column) in the message.
QuadHamiltonian parse_hamiltonian_json(std::string_view text);

QuadHamiltonian load_hamiltonian(const std::filesystem::path& path);

}  // namespace qhd
