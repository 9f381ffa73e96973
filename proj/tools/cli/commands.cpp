#include "commands.hpp"

#include "qhdiag/error.hpp"
#include "qhdiag/format.hpp"
#include "qhdiag/hamiltonian_file.hpp"
#include "qhdiag/normal_modes.hpp"
#include "qhdiag/states.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>

namespace qhd::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open input file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// omega with imaginary frequencies rendered as negative numbers
double signed_omega(double omega_sq) { return omega_sq >= 0.0 ? std::sqrt(omega_sq) : -std::sqrt(-omega_sq); }

std::string root_name(RootChoice r) {
    switch (r) {
        case RootChoice::plus: return "plus";
        case RootChoice::minus: return "minus";
        case RootChoice::smaller: break;
    }
    return "smaller";
}

std::string pivot_name(Pivot p) { return p == Pivot::cyclic ? "cyclic" : "largest"; }

std::string format_name(OutputFormat f) { return f == OutputFormat::json ? "json" : "csv"; }

struct Provenance {
    std::string command;
    std::string hash;

    std::string csv_line() const {
        return std::string("# tool=") + kToolName + " version=" + kToolVersion + " command=" + command +
               " config_hash=" + hash + "\n";
    }
    ordered_json json() const {
        ordered_json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["command"] = command;
        j["config_hash"] = hash;
        return j;
    }
};

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json matrix_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

struct LoadedInput {
    std::string text;
    QuadHamiltonian h;
    std::vector<Method> methods;
    Provenance provenance;
};

LoadedInput load(const std::string& command, const RunConfig& config) {
    config.validate();
    std::string text = read_text(config.input);
    QuadHamiltonian h = [&] {
        try {
            return parse_hamiltonian_json(text);
        } catch (const ValidationError& e) {
            throw ValidationError(config.input.string() + ": " + e.what());
        }
    }();
    std::vector<Method> methods = resolve_methods(h, config.method);
    Provenance prov{command, config_hash(command, config, text)};
    return LoadedInput{std::move(text), std::move(h), std::move(methods), std::move(prov)};
}

MethodOptions method_options(const RunConfig& config) {
    MethodOptions opt;
    opt.tol = config.tol;
    opt.max_sweeps = config.max_sweeps;
    opt.root = config.root;
    opt.pivot = config.pivot;
    return opt;
}

bool is_iterative(Method m) { return m == Method::sweep || m == Method::three_body; }

// ---- diagonalize ---------------------------------------------------------

void write_frequencies(const RunConfig& config, const Provenance& prov, const std::vector<MethodRun>& runs) {
    if (config.format == OutputFormat::csv) {
        std::string csv = prov.csv_line() + "method,index,m_eff,d_eff,omega_sq,omega\n";
        for (const MethodRun& run : runs) {
            const std::string name = to_string(run.method);
            if (run.diagonal) {
                const DiagonalResult& d = *run.diagonal;
                for (Eigen::Index i = 0; i < d.omega_sq.size(); ++i) {
                    csv += name + "," + std::to_string(i) + "," + format_double(d.m_eff(i)) + "," + format_double(d.d_eff(i)) +
                           "," + format_double(d.omega_sq(i)) + "," + format_double(signed_omega(d.omega_sq(i))) + "\n";
                }
            } else {
                for (Eigen::Index s = 0; s < run.omega_sq_sorted.size(); ++s) {
                    const double w2 = run.omega_sq_sorted(s);
                    csv += name + "," + std::to_string(s) + ",,," + format_double(w2) + "," + format_double(signed_omega(w2)) + "\n";
                }
            }
        }
        write_text(config.out / "frequencies.csv", csv);
        return;
    }
    ordered_json doc;
    doc["provenance"] = prov.json();
    ordered_json methods = ordered_json::array();
    for (const MethodRun& run : runs) {
        ordered_json m;
        m["method"] = to_string(run.method);
        ordered_json rows = ordered_json::array();
        for (Eigen::Index i = 0; i < run.omega_sq_sorted.size(); ++i) {
            ordered_json row;
            row["index"] = i;
            const double w2 = run.diagonal ? run.diagonal->omega_sq(i) : run.omega_sq_sorted(i);
            if (run.diagonal) {
                row["m_eff"] = run.diagonal->m_eff(i);
                row["d_eff"] = run.diagonal->d_eff(i);
            }
            row["omega_sq"] = w2;
            row["omega"] = signed_omega(w2);
            rows.push_back(std::move(row));
        }
        m["rows"] = std::move(rows);
        methods.push_back(std::move(m));
    }
    doc["methods"] = std::move(methods);
    write_text(config.out / "frequencies.json", dump(doc));
}

std::string status_of(const MethodRun& run) {
    if (!run.error.empty()) return "error";
    return run.exact ? "converged" : "not_converged";
}

void write_residuals(const RunConfig& config, const Provenance& prov, const std::vector<MethodRun>& runs) {
    if (config.format == OutputFormat::csv) {
        std::string csv = prov.csv_line() +
                          "method,status,kinetic_offdiag,potential_offdiag,max_kinetic_offdiag,sweeps,steps,message\n";
        for (const MethodRun& run : runs) {
            csv += to_string(run.method) + "," + status_of(run) + ",";
            if (run.diagonal) {
                const DiagonalResult& d = *run.diagonal;
                csv += format_double(d.residual.kinetic) + "," + format_double(d.residual.potential) + "," +
                       format_double(d.max_kinetic_offdiag) + "," + std::to_string(d.sweeps) + "," +
                       std::to_string(d.sequence.steps().size());
            } else {
                csv += ",,,,";
            }
            csv += "," + csv_escape(run.error) + "\n";
        }
        write_text(config.out / "residuals.csv", csv);
        return;
    }
    ordered_json doc;
    doc["provenance"] = prov.json();
    ordered_json methods = ordered_json::array();
    for (const MethodRun& run : runs) {
        ordered_json m;
        m["method"] = to_string(run.method);
        m["status"] = status_of(run);
        if (run.diagonal) {
            const DiagonalResult& d = *run.diagonal;
            m["kinetic_offdiag"] = d.residual.kinetic;
            m["potential_offdiag"] = d.residual.potential;
            m["max_kinetic_offdiag"] = d.max_kinetic_offdiag;
            m["sweeps"] = d.sweeps;
            m["steps"] = d.sequence.steps().size();
            m["residual_trace"] = d.residual_trace;
        }
        if (!run.error.empty()) m["message"] = run.error;
        methods.push_back(std::move(m));
    }
    doc["methods"] = std::move(methods);
    write_text(config.out / "residuals.json", dump(doc));
}

void write_sequences(const RunConfig& config, const Provenance& prov, const std::vector<MethodRun>& runs) {
    ordered_json doc;
    doc["provenance"] = prov.json();
    ordered_json methods = ordered_json::array();
    for (const MethodRun& run : runs) {
        if (!run.diagonal) continue;
        const ShearSequence& seq = run.diagonal->sequence;
        ordered_json m;
        m["method"] = to_string(run.method);
        m["n"] = seq.n();
        ordered_json steps = ordered_json::array();
        for (const ShearStep& s : seq.steps()) {
            ordered_json step;
            step["i"] = s.i;
            step["j"] = s.j;
            step["alpha"] = s.alpha;
            step["beta"] = s.beta;
            steps.push_back(std::move(step));
        }
        m["steps"] = std::move(steps);
        m["composed_map"] = matrix_json(seq.composed_map());
        methods.push_back(std::move(m));
    }
    doc["methods"] = std::move(methods);
    write_text(config.out / "sequence.json", dump(doc));
}

// ---- compare -------------------------------------------------------------

void write_compare(const RunConfig& config, const Provenance& prov, const ZpeReport& report) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    auto run_status = [](const MethodRun& run) {
        if (!run.error.empty()) return csv_escape("error: " + run.error);
        if (!run.zpe_error.empty()) return csv_escape(run.zpe_error);
        return std::string(run.exact ? "exact" : "not_exact");
    };

    if (config.format == OutputFormat::csv) {
        std::string csv = prov.csv_line() +
                          "record,method,reference,index,omega_sq,omega,zpe,max_abs_diff_omega_sq,abs_diff_zpe,status\n";
        for (const MethodRun& run : report.runs) {
            csv += "zpe," + to_string(run.method) + ",,,,," + opt(run.zpe) + ",,," + run_status(run) + "\n";
        }
        for (const MethodRun& run : report.runs) {
            for (Eigen::Index s = 0; s < run.omega_sq_sorted.size(); ++s) {
                const double w2 = run.omega_sq_sorted(s);
                csv += "mode," + to_string(run.method) + ",," + std::to_string(s) + "," + format_double(w2) + "," +
                       format_double(signed_omega(w2)) + ",,,,\n";
            }
        }
        for (const ZpeDifference& d : report.differences) {
            csv += "diff," + to_string(d.method) + "," + to_string(d.reference) + ",,,,," +
                   format_double(d.max_abs_omega_sq_diff) + "," + opt(d.abs_zpe_diff) + ",\n";
        }
        write_text(config.out / "compare.csv", csv);
        return;
    }

    ordered_json doc;
    doc["provenance"] = prov.json();
    ordered_json runs = ordered_json::array();
    for (const MethodRun& run : report.runs) {
        ordered_json r;
        r["method"] = to_string(run.method);
        r["exact"] = run.exact;
        if (run.zpe) r["zpe"] = *run.zpe;
        std::vector<double> w2(run.omega_sq_sorted.data(), run.omega_sq_sorted.data() + run.omega_sq_sorted.size());
        r["omega_sq_sorted"] = w2;
        if (!run.zpe_error.empty()) r["zpe_error"] = run.zpe_error;
        if (!run.error.empty()) r["error"] = run.error;
        runs.push_back(std::move(r));
    }
    doc["runs"] = std::move(runs);
    ordered_json diffs = ordered_json::array();
    for (const ZpeDifference& d : report.differences) {
        ordered_json j;
        j["method"] = to_string(d.method);
        j["reference"] = to_string(d.reference);
        j["max_abs_diff_omega_sq"] = d.max_abs_omega_sq_diff;
        if (d.abs_zpe_diff) j["abs_diff_zpe"] = *d.abs_zpe_diff;
        diffs.push_back(std::move(j));
    }
    doc["differences"] = std::move(diffs);
    write_text(config.out / "compare.json", dump(doc));
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const UnstablePotential& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }
}

}  // namespace

void RunConfig::validate() const {
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ValidationError("--tol must be positive");
}

std::vector<Method> resolve_methods(const QuadHamiltonian& h, const std::string& method) {
    if (method == "all") return applicable_methods(h);
    const std::optional<Method> m = parse_method(method);
    if (!m) throw ValidationError("unknown method \"" + method + "\"");
    const std::string n = std::to_string(h.n());
    switch (*m) {
        case Method::two_body:
            if (h.n() != 2) throw ValidationError("method two_body requires n = 2, got n = " + n);
            break;
        case Method::three_body:
            if (h.n() != 3) throw ValidationError("method three_body requires n = 3, got n = " + n);
            break;
        case Method::bravais:
        case Method::toeplitz:
            if (h.n() % 2 != 0) {
                throw ValidationError("method " + method + " requires a Bravais chain with an even number of particles, got n = " + n);
            }
            if (!is_bravais_chain(h)) {
                throw ValidationError("method " + method + " requires a Bravais chain (equal masses, on-site and nearest-neighbour constants)");
            }
            break;
        case Method::pairs_chain: {
            const auto& all = applicable_methods(h);
            if (std::find(all.begin(), all.end(), Method::pairs_chain) == all.end()) {
                throw ValidationError("method pairs_chain requires even n and couplings only within pairs (0,1), (2,3), ...");
            }
            break;
        }
        case Method::oracle:
        case Method::sweep:
            break;
    }
    return {*m};
}

std::string config_hash(const std::string& command, const RunConfig& config, const std::string& input_text) {
    std::string canonical = command + "\n" + input_text + "\nmethod=" + config.method + "\ntol=" + format_double(config.tol) +
                            "\nmax_sweeps=" + std::to_string(config.max_sweeps) + "\nroot=" + root_name(config.root) +
                            "\npivot=" + pivot_name(config.pivot) + "\nformat=" + format_name(config.format) + "\n";
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

int cmd_diagonalize(const RunConfig& config, std::ostream& err) {
    return guarded(err, [&] {
        const LoadedInput in = load("diagonalize", config);
        std::vector<MethodRun> runs;
        for (Method m : in.methods) runs.push_back(run_method(in.h, m, method_options(config)));

        write_frequencies(config, in.provenance, runs);
        write_residuals(config, in.provenance, runs);
        write_sequences(config, in.provenance, runs);

        int status = kExitOk;
        for (const MethodRun& run : runs) {
            if (!run.exact) {
                err << "warning: method " << to_string(run.method) << " "
                    << (run.error.empty() ? std::string("did not reach tolerance") : run.error) << "\n";
                status = kExitNotConverged;
            }
        }
        return status;
    });
}

int cmd_compare(const RunConfig& config, std::ostream& err) {
    return guarded(err, [&] {
        const LoadedInput in = load("compare", config);
        const ZpeReport report = zpe_compare(in.h, in.methods, method_options(config));
        write_compare(config, in.provenance, report);

        int status = kExitOk;
        for (const MethodRun& run : report.runs) {
            if (is_iterative(run.method) && !run.exact) {
                err << "warning: method " << to_string(run.method) << " did not converge\n";
                status = kExitNotConverged;
            }
        }
        return status;
    });
}

int cmd_groundstate(const RunConfig& config, std::ostream& err) {
    return guarded(err, [&] {
        const LoadedInput in = load("groundstate", config);
        const KPForm original = to_kpform(in.h);
        const double hbar = in.h.hbar();

        // unstable potentials have no normalizable ground state
        const NormalModes modes = normal_modes(in.h);
        const double oracle_zpe = zero_point_energy(modes.omega_sq, hbar);
        if (modes.omega_sq.minCoeff() <= 0.0) {
            throw UnstablePotential("no normalizable ground state: smallest squared frequency " +
                                        format_double(modes.omega_sq.minCoeff()),
                                    {modes.omega_sq.minCoeff()});
        }

        ordered_json doc;
        doc["provenance"] = in.provenance.json();
        doc["hbar"] = hbar;
        doc["oracle_zpe"] = oracle_zpe;
        ordered_json states = ordered_json::array();
        int status = kExitOk;
        for (Method m : in.methods) {
            if (m == Method::toeplitz) continue;
            const MethodRun run = run_method(in.h, m, method_options(config));
            ordered_json s;
            s["method"] = to_string(m);
            if (!run.error.empty()) {
                s["error"] = run.error;
                states.push_back(std::move(s));
                status = kExitNotConverged;
                continue;
            }
            std::optional<GaussianState> entangled;
            if (run.diagonal) {
                const GaussianState product = ground_state_from_diagonal(*run.diagonal, hbar);
                entangled = entangled_ground_state(product, run.diagonal->sequence);
                s["converged"] = run.diagonal->converged;
                s["B_diagonal_frame"] = matrix_json(product.B());
                s["product_state_diagonal_frame"] = product.is_product_state();
            } else {
                entangled = ground_state_from_normal_modes(in.h, *run.modes);
            }
            const GroundStateCheck check = ground_state_residual(*entangled, original, hbar);
            s["B_entangled"] = matrix_json(entangled->B());
            s["product_state_entangled"] = entangled->is_product_state();
            s["log_norm"] = entangled->log_norm();
            s["residual"] = check.residual;
            s["energy"] = check.energy;
            states.push_back(std::move(s));
            if (!run.exact) status = kExitNotConverged;
        }
        doc["states"] = std::move(states);
        write_text(config.out / "state.json", dump(doc));
        return status;
    });
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Diagonalize quadratic Hamiltonians with shear pair transformations"};
    app.require_subcommand(1);

    std::vector<std::string> inputs;
    RunConfig base;
    std::string root = "smaller", pivot = "largest", format = "csv", out_dir = "out";

    auto add_options = [&](CLI::App* sub) {
        sub->add_option("--input", inputs, "Hamiltonian spec file(s)")->required();
        sub->add_option("--method", base.method, "oracle|toeplitz|two_body|pairs_chain|bravais|three_body|sweep|all")
            ->capture_default_str();
        sub->add_option("--tol", base.tol, "relative off-diagonal tolerance")->capture_default_str();
        sub->add_option("--max-sweeps", base.max_sweeps, "sweep budget (0 = 50 n)")->capture_default_str();
        sub->add_option("--root", root, "alpha root choice")->check(CLI::IsMember({"smaller", "plus", "minus"}))->capture_default_str();
        sub->add_option("--pivot", pivot, "sweep pivot rule")->check(CLI::IsMember({"largest", "cyclic"}))->capture_default_str();
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--format", format, "tabular output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    };
    CLI::App* diag = app.add_subcommand("diagonalize", "Diagonalize and write frequencies, sequence and residuals");
    CLI::App* comp = app.add_subcommand("compare", "Compare zero-point energies and spectra across methods");
    CLI::App* gs = app.add_subcommand("groundstate", "Write Gaussian ground states and their residuals");
    for (CLI::App* sub : {diag, comp, gs}) add_options(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidInput;
    }

    base.root = root == "plus" ? RootChoice::plus : root == "minus" ? RootChoice::minus : RootChoice::smaller;
    base.pivot = pivot == "cyclic" ? Pivot::cyclic : Pivot::largest_offdiag;
    base.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
    base.out = out_dir;

    int (*command)(const RunConfig&, std::ostream&) = diag->parsed() ? cmd_diagonalize
                                                      : comp->parsed() ? cmd_compare
                                                                       : cmd_groundstate;
    if (inputs.size() == 1) {
        base.input = inputs.front();
        return command(base, err);
    }

    std::vector<std::future<std::pair<int, std::string>>> jobs;
    for (const std::string& input : inputs) {
        RunConfig cfg = base;
        cfg.input = input;
        cfg.out = base.out / fs::path(input).stem();
        jobs.push_back(std::async(std::launch::async, [cfg, command] {
            std::ostringstream log;
            const int code = command(cfg, log);
            return std::make_pair(code, log.str());
        }));
    }
    int status = kExitOk;
    for (auto& job : jobs) {
        const auto [code, log] = job.get();
        err << log;
        status = std::max(status, code);
    }
    return status;
}

}  // namespace qhd::cli
