#include "qhdiag/compare.hpp"

#include "qhdiag/error.hpp"
#include "qhdiag/three_body.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace qhd {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 7> kMethodNames{{
    {Method::oracle, "oracle"},
    {Method::toeplitz, "toeplitz"},
    {Method::two_body, "two_body"},
    {Method::pairs_chain, "pairs_chain"},
    {Method::bravais, "bravais"},
    {Method::three_body, "three_body"},
    {Method::sweep, "sweep"},
}};

bool pair_decoupled(const QuadHamiltonian& h) {
    const std::size_t n = h.n();
    if (n % 2 != 0) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool paired = (i % 2 == 0) && j == i + 1;
            if (!paired && h.coupling(i, j) != 0.0) return false;
        }
    }
    return true;
}

Vector sorted(Vector v) {
    std::sort(v.data(), v.data() + v.size());
    return v;
}

}  // namespace

std::string to_string(Method m) {
    for (const auto& [method, name] : kMethodNames) {
        if (method == m) return std::string(name);
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (const auto& [method, label] : kMethodNames) {
        if (label == name) return method;
    }
    return std::nullopt;
}

std::vector<Method> applicable_methods(const QuadHamiltonian& h) {
    std::vector<Method> out{Method::oracle};
    const bool bravais = is_bravais_chain(h);
    if (bravais) out.push_back(Method::toeplitz);
    if (h.n() == 2) out.push_back(Method::two_body);
    if (pair_decoupled(h)) out.push_back(Method::pairs_chain);
    if (bravais) out.push_back(Method::bravais);
    if (h.n() == 3) out.push_back(Method::three_body);
    out.push_back(Method::sweep);
    return out;
}

MethodRun run_method(const QuadHamiltonian& h, Method method, const MethodOptions& options) {
    MethodRun run;
    run.method = method;
    try {
        switch (method) {
            case Method::oracle:
                run.modes = normal_modes(h);
                run.omega_sq_sorted = run.modes->omega_sq;
                run.exact = true;
                break;
            case Method::toeplitz: {
                if (!is_bravais_chain(h)) throw ValidationError("toeplitz spectrum needs a Bravais chain");
                const std::vector<double> w2 = toeplitz_frequencies(h.n(), 2.0 * h.d(0), h.coupling(0, 1), h.mass(0));
                run.omega_sq_sorted = Eigen::Map<const Vector>(w2.data(), static_cast<Eigen::Index>(w2.size()));
                run.exact = true;
                break;
            }
            case Method::two_body:
                run.diagonal = diagonalize_two_body(h, options.root, options.tol);
                break;
            case Method::pairs_chain: {
                const std::vector<IndexPair> pairs = default_pairing(h.n());
                run.diagonal = diagonalize_disjoint_pairs_chain(h, pairs, options.root, options.tol);
                break;
            }
            case Method::bravais:
                if (!is_bravais_chain(h)) throw ValidationError("Bravais closed form needs a Bravais chain with even n");
                run.diagonal = bravais_closed_form(h.n(), h.mass(0), h.d(0), h.coupling(0, 1), options.tol);
                break;
            case Method::three_body: {
                ThreeBodyOptions opt;
                opt.tol = options.tol;
                opt.root = options.root;
                run.diagonal = diagonalize_three_body(h, ThreeBodySolver::staged_newton, opt);
                break;
            }
            case Method::sweep: {
                SweepOptions opt;
                opt.tol = options.tol;
                opt.max_sweeps = options.max_sweeps;
                opt.pivot = options.pivot;
                opt.root = options.root;
                run.diagonal = diagonalize_general_sweep(h, opt);
                break;
            }
        }
    } catch (const std::exception& e) {
        run.error = e.what();
        run.diagonal.reset();
        run.modes.reset();
        run.omega_sq_sorted = Vector(0);
        return run;
    }

    if (run.diagonal) {
        run.omega_sq_sorted = sorted(run.diagonal->omega_sq);
        run.exact = run.diagonal->converged;
    }
    try {
        run.zpe = zero_point_energy(run.omega_sq_sorted, h.hbar());
    } catch (const UnstablePotential& e) {
        run.zpe_error = e.what();
    }
    return run;
}

ZpeReport zpe_compare(const QuadHamiltonian& h, const std::vector<Method>& methods, const MethodOptions& options) {
    ZpeReport report;
    for (Method m : methods) report.runs.push_back(run_method(h, m, options));

    for (std::size_t a = 0; a < report.runs.size(); ++a) {
        for (std::size_t b = a + 1; b < report.runs.size(); ++b) {
            const MethodRun& ra = report.runs[a];
            const MethodRun& rb = report.runs[b];
            if (!ra.error.empty() || !rb.error.empty() || ra.omega_sq_sorted.size() != rb.omega_sq_sorted.size()) continue;
            ZpeDifference diff{ra.method, rb.method, 0.0, std::nullopt};
            if (ra.omega_sq_sorted.size() > 0) {
                diff.max_abs_omega_sq_diff = (ra.omega_sq_sorted - rb.omega_sq_sorted).cwiseAbs().maxCoeff();
            }
            if (ra.zpe && rb.zpe) diff.abs_zpe_diff = std::abs(*ra.zpe - *rb.zpe);
            report.differences.push_back(diff);
        }
    }
    return report;
}

}  // namespace qhd
