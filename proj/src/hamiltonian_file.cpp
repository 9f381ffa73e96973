#include "qhdiag/hamiltonian_file.hpp"

#include "qhdiag/error.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

namespace qhd {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (std::string_view a : allowed) known = known || key == a;
        if (!known) throw ValidationError(where + ": unknown field \"" + key + "\"");
    }
}

double number_at(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ValidationError(where + ": missing field \"" + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number");
    return v.get<double>();
}

std::size_t count_at(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ValidationError(where + ": missing field \"" + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ValidationError(where + "." + key + ": expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

double hbar_of(const json& doc) {
    if (!doc.contains("hbar")) return 1.0;
    return number_at(doc, "hbar", "$");
}

QuadHamiltonian parse_chain(const json& doc) {
    reject_unknown(doc, {"chain", "hbar"}, "$");
    const json& chain = doc.at("chain");
    if (!chain.is_object()) throw ValidationError("$.chain: expected an object");
    reject_unknown(chain, {"n", "m", "d1", "d12"}, "$.chain");
    const std::size_t n = count_at(chain, "n", "$.chain");
    if (n % 2 != 0) {
        throw ValidationError("$.chain.n: Bravais chain requires an even number of particles, got " + std::to_string(n));
    }
    return build_bravais_chain(n, number_at(chain, "m", "$.chain"), number_at(chain, "d1", "$.chain"),
                               number_at(chain, "d12", "$.chain"), hbar_of(doc));
}

QuadHamiltonian parse_general(const json& doc) {
    reject_unknown(doc, {"n", "hbar", "masses", "phi"}, "$");
    if (!doc.contains("masses")) throw ValidationError("$: missing field \"masses\"");
    if (!doc.contains("phi")) throw ValidationError("$: missing field \"phi\"");
    const json& masses = doc.at("masses");
    const json& phi = doc.at("phi");
    if (!masses.is_array() || masses.empty()) throw ValidationError("$.masses: expected a non-empty array");
    const std::size_t n = masses.size();
    if (doc.contains("n") && count_at(doc, "n", "$") != n) {
        throw ValidationError("$.n: declares " + std::to_string(count_at(doc, "n", "$")) + " particles but masses has " +
                              std::to_string(n));
    }

    Vector m(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!masses[i].is_number()) throw ValidationError("$.masses[" + std::to_string(i) + "]: expected a number");
        m(static_cast<Eigen::Index>(i)) = masses[i].get<double>();
    }
    if (!phi.is_array() || phi.size() != n) throw ValidationError("$.phi: expected " + std::to_string(n) + " rows");
    Matrix p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const std::string row_path = "$.phi[" + std::to_string(i) + "]";
        if (!phi[i].is_array() || phi[i].size() != n) throw ValidationError(row_path + ": expected " + std::to_string(n) + " entries");
        for (std::size_t j = 0; j < n; ++j) {
            if (!phi[i][j].is_number()) throw ValidationError(row_path + "[" + std::to_string(j) + "]: expected a number");
            p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = phi[i][j].get<double>();
        }
    }
    return QuadHamiltonian::from_force_constants(m, p, hbar_of(doc));
}

}  // namespace

QuadHamiltonian parse_hamiltonian_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("$: expected a JSON object");
    if (doc.contains("chain")) return parse_chain(doc);
    return parse_general(doc);
}

QuadHamiltonian load_hamiltonian(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open input file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_hamiltonian_json(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace qhd
