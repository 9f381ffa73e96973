#include "qhdiag/diagonalizer.hpp"

#include "qhdiag/error.hpp"
#include "qhdiag/format.hpp"
#include "result_builder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qhd {

namespace detail {

bool offdiag_within(const KPForm& form, const ResidualOffdiag& residual, double tol) {
    const double k_scale = form.K.cwiseAbs().maxCoeff();
    const double v_scale = form.V.size() > 0 ? form.V.cwiseAbs().maxCoeff() : 0.0;
    return residual.kinetic <= tol * k_scale && residual.potential <= tol * v_scale;
}

DiagonalResult finish_result(const KPForm& original, ShearSequence sequence, Vector m_eff, Vector d_eff, double tol) {
    DiagonalResult out;
    out.omega_sq = Vector(m_eff.size());
    for (Eigen::Index i = 0; i < m_eff.size(); ++i) out.omega_sq(i) = 2.0 * d_eff(i) / m_eff(i);
    out.m_eff = std::move(m_eff);
    out.d_eff = std::move(d_eff);

    KPForm replay = original;
    for (const ShearStep& step : sequence.steps()) {
        replay = conjugate(replay, step);
        out.max_kinetic_offdiag = std::max(out.max_kinetic_offdiag, residual_offdiag(replay).kinetic);
    }
    out.residual = residual_offdiag(replay);
    out.converged = offdiag_within(replay, out.residual, tol);
    out.sequence = std::move(sequence);
    return out;
}

}  // namespace detail

namespace {

struct TwoBodySolution {
    ShearStep step;
    double m_i, m_j, d_i, d_j;
};

// Effective parameters of an isolated (i, j) pair.
TwoBodySolution solve_pair(const QuadHamiltonian& h, std::size_t i, std::size_t j, RootChoice root) {
    const double m1 = h.mass(i), m2 = h.mass(j);
    const double d1 = h.d(i), d2 = h.d(j), d12 = h.coupling(i, j);
    const double alpha = select_root(alpha_roots(d1, d2, d12, m2 / m1), root);
    const double beta = beta_for_alpha(alpha, m1, m2);
    const double k12 = m1 / m2;
    const double s = 1.0 + k12 * alpha * alpha;

    TwoBodySolution out{ShearStep{i, j, alpha, beta}, 0, 0, 0, 0};
    out.m_i = m1 * m2 / (m2 + m1 * alpha * alpha);
    out.m_j = m2 + m1 * alpha * alpha;
    out.d_i = (d1 + d12 * k12 * alpha + d2 * k12 * k12 * alpha * alpha) / (s * s);
    out.d_j = d1 * alpha * alpha + d2 - d12 * alpha;
    return out;
}

}  // namespace

ResidualOffdiag residual_offdiag(const KPForm& form) {
    ResidualOffdiag r;
    const Eigen::Index n = form.K.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            r.kinetic = std::max(r.kinetic, std::abs(form.K(i, j)));
            r.potential = std::max(r.potential, std::abs(form.V(i, j)));
        }
    }
    return r;
}

DiagonalResult diagonalize_two_body(const QuadHamiltonian& h, RootChoice root, double tol) {
    if (h.n() != 2) throw ValidationError("two-body diagonalization needs n = 2, got " + std::to_string(h.n()));
    const TwoBodySolution pair = solve_pair(h, 0, 1, root);
    ShearSequence seq(2);
    seq.append(pair.step);
    Vector m_eff(2), d_eff(2);
    m_eff << pair.m_i, pair.m_j;
    d_eff << pair.d_i, pair.d_j;
    return detail::finish_result(to_kpform(h), std::move(seq), std::move(m_eff), std::move(d_eff), tol);
}

std::vector<IndexPair> default_pairing(std::size_t n) {
    if (n == 0 || n % 2 != 0) throw ValidationError("default pairing needs an even particle count, got " + std::to_string(n));
    std::vector<IndexPair> pairs;
    for (std::size_t i = 0; i < n; i += 2) pairs.emplace_back(i, i + 1);
    return pairs;
}

DiagonalResult diagonalize_disjoint_pairs_chain(const QuadHamiltonian& h, std::span<const IndexPair> pairs,
                                                RootChoice root, double tol) {
    const std::size_t n = h.n();
    std::vector<int> partner(n, -1);
    for (const auto& [i, j] : pairs) {
        if (i >= n || j >= n || i == j) {
            throw ValidationError("invalid pair (" + std::to_string(i) + ", " + std::to_string(j) + ") for n = " + std::to_string(n));
        }
        if (partner[i] != -1 || partner[j] != -1) {
            throw ValidationError("pairs are not disjoint at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        }
        partner[i] = static_cast<int>(j);
        partner[j] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (partner[i] == static_cast<int>(j)) continue;
            const double c = h.coupling(i, j);
            if (c != 0.0) {
                throw ValidationError("not pair-decoupled: coupling d(" + std::to_string(i) + "," + std::to_string(j) +
                                      ") = " + format_double(c) + " lies outside the pairing");
            }
        }
    }

    ShearSequence seq(n);
    Vector m_eff = h.masses();
    Vector d_eff = h.d_diag();
    for (const auto& [i, j] : pairs) {
        const TwoBodySolution pair = solve_pair(h, i, j, root);
        seq.append(pair.step);
        m_eff(static_cast<Eigen::Index>(i)) = pair.m_i;
        m_eff(static_cast<Eigen::Index>(j)) = pair.m_j;
        d_eff(static_cast<Eigen::Index>(i)) = pair.d_i;
        d_eff(static_cast<Eigen::Index>(j)) = pair.d_j;
    }
    return detail::finish_result(to_kpform(h), std::move(seq), std::move(m_eff), std::move(d_eff), tol);
}

DiagonalResult bravais_closed_form(std::size_t n, double m, double d1, double d12, double tol) {
    const QuadHamiltonian chain = build_bravais_chain(n, m, d1, d12);
    const double alpha = -1.0;
    const double beta = beta_for_alpha(alpha, m, m);

    ShearSequence seq(n);
    const auto dim = static_cast<Eigen::Index>(n);
    Vector m_eff(dim), d_eff(dim);
    for (std::size_t i = 0; i < n; i += 2) {
        seq.append(ShearStep{i, i + 1, alpha, beta});
        const auto a = static_cast<Eigen::Index>(i);
        m_eff(a) = m / 2.0;
        m_eff(a + 1) = 2.0 * m;
        d_eff(a) = (2.0 * d1 - d12) / 4.0;
        d_eff(a + 1) = 2.0 * d1 + d12;
    }
    return detail::finish_result(to_kpform(chain), std::move(seq), std::move(m_eff), std::move(d_eff), tol);
}

DiagonalResult diagonalize_general_sweep(const QuadHamiltonian& h, const SweepOptions& options) {
    const std::size_t n = h.n();
    if (n < 1) throw ValidationError("sweep diagonalization needs at least one particle");
    if (!(options.tol > 0.0)) throw ValidationError("sweep tolerance must be positive");
    const std::size_t max_sweeps = options.max_sweeps > 0 ? options.max_sweeps : 50 * n;
    const std::size_t steps_per_sweep = n * (n - 1) / 2;

    const KPForm original = to_kpform(h);
    KPForm form = original;
    ShearSequence seq(n);
    std::vector<double> trace;
    double max_k_off = 0.0;
    bool converged = false;

    auto relative_v_residual = [&form]() {
        const double scale = form.V.cwiseAbs().maxCoeff();
        const double off = residual_offdiag(form).potential;
        return scale > 0.0 ? off / scale : 0.0;
    };
    auto apply = [&](std::size_t i, std::size_t j) {
        const ShearStep step = zeroing_step(form, i, j, options.root);
        form = conjugate(form, step);
        seq.append(step);
        const double k_off = residual_offdiag(form).kinetic;
        max_k_off = std::max(max_k_off, k_off);
        if (k_off > 1e-10 * form.K.cwiseAbs().maxCoeff()) {
            throw std::logic_error("kinetic matrix lost diagonality during sweep: " + format_double(k_off));
        }
    };

    std::size_t sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (relative_v_residual() <= options.tol) {
            converged = true;
            break;
        }
        if (options.pivot == Pivot::cyclic) {
            for (std::size_t i = 0; i + 1 < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double threshold = options.tol * form.V.cwiseAbs().maxCoeff();
                    if (std::abs(form.V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) > threshold) apply(i, j);
                }
            }
        } else {
            for (std::size_t step = 0; step < steps_per_sweep; ++step) {
                std::size_t bi = 0, bj = 1;
                double best = -1.0;
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    for (std::size_t j = i + 1; j < n; ++j) {
                        const double v = std::abs(form.V(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
                        if (v > best) {
                            best = v;
                            bi = i;
                            bj = j;
                        }
                    }
                }
                if (best <= options.tol * form.V.cwiseAbs().maxCoeff()) break;
                apply(bi, bj);
            }
        }
        trace.push_back(relative_v_residual());
    }
    if (!converged && relative_v_residual() <= options.tol) converged = true;

    Vector m_eff = form.K.diagonal().cwiseInverse();
    Vector d_eff = 0.5 * form.V.diagonal();
    DiagonalResult out = detail::finish_result(original, std::move(seq), std::move(m_eff), std::move(d_eff), options.tol);
    // an exhausted budget stays unconverged even if the replay happens to pass
    out.converged = converged && out.converged;
    out.sweeps = sweep;
    out.residual_trace = std::move(trace);
    out.max_kinetic_offdiag = max_k_off;
    return out;
}

}  // namespace qhd
