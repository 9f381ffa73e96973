#include "qhdiag/three_body.hpp"

#include "qhdiag/error.hpp"
#include "qhdiag/format.hpp"
#include "result_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace qhd {

namespace {

std::size_t coupling_slot(std::size_t i, std::size_t j) {
    if (i == j || i > 2 || j > 2) throw ValidationError("invalid three-body coupling index");
    if (i > j) std::swap(i, j);
    return i == 0 ? j - 1 : 2;
}

using Alphas = std::array<double, 3>;

double max_abs(const std::array<double, 3>& v) {
    return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

struct NewtonOutcome {
    Alphas alphas{};
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
};

// Damped Newton on the three final couplings, scaled by `scale`.
NewtonOutcome newton_solve(const ThreeBodyParameters& p, Alphas alphas, double scale, const ThreeBodyOptions& opt) {
    auto residual_vec = [&](const Alphas& a) {
        std::array<double, 3> f = three_body_offdiagonals(p, a);
        for (double& x : f) x /= scale;
        return f;
    };

    NewtonOutcome out;
    std::array<double, 3> f = residual_vec(alphas);
    double norm = max_abs(f);
    out.alphas = alphas;
    out.residual = norm;

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        if (!std::isfinite(norm)) break;
        if (norm <= 1e-2 * opt.tol) break;

        Eigen::Matrix3d jac;
        for (int c = 0; c < 3; ++c) {
            Alphas shifted = alphas;
            const double h = opt.fd_step * std::max(1.0, std::abs(alphas[static_cast<std::size_t>(c)]));
            shifted[static_cast<std::size_t>(c)] += h;
            const std::array<double, 3> fs = residual_vec(shifted);
            for (int r = 0; r < 3; ++r) jac(r, c) = (fs[static_cast<std::size_t>(r)] - f[static_cast<std::size_t>(r)]) / h;
        }
        const Eigen::Vector3d rhs(-f[0], -f[1], -f[2]);
        const Eigen::Vector3d delta = jac.fullPivLu().solve(rhs);
        if (!delta.allFinite()) break;

        double damping = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 40; ++halving) {
            Alphas trial = alphas;
            for (std::size_t k = 0; k < 3; ++k) trial[k] += damping * delta(static_cast<Eigen::Index>(k));
            const std::array<double, 3> ft = residual_vec(trial);
            const double nt = max_abs(ft);
            if (std::isfinite(nt) && nt < norm) {
                alphas = trial;
                f = ft;
                norm = nt;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if (!improved) break;
        if (std::max({std::abs(alphas[0]), std::abs(alphas[1]), std::abs(alphas[2])}) > 1e8) break;
    }

    out.alphas = alphas;
    out.residual = norm;
    out.converged = std::isfinite(norm) && norm <= opt.tol;
    return out;
}

// Independent two-body roots of each stage pair on the original parameters,
// in every root combination, smallest-magnitude combination first.
std::vector<Alphas> initial_guesses(const ThreeBodyParameters& p, RootChoice preferred) {
    std::array<std::array<double, 2>, 3> candidates{};
    for (std::size_t stage = 0; stage < 3; ++stage) {
        const auto [i, j] = kThreeBodyStagePairs[stage];
        const auto roots = alpha_roots(p.d[i], p.d[j], p.coupling(i, j), p.m[j] / p.m[i]);
        const double first = select_root(roots, preferred);
        double second = 0.0;
        if (roots) second = (first == roots->plus) ? roots->minus : roots->plus;
        candidates[stage] = {first, second};
    }
    std::vector<Alphas> guesses;
    for (int mask = 0; mask < 8; ++mask) {
        guesses.push_back({candidates[0][mask & 1], candidates[1][(mask >> 1) & 1], candidates[2][(mask >> 2) & 1]});
    }
    guesses.push_back({0.0, 0.0, 0.0});
    // a coarse deterministic grid for instances where every two-body start stalls
    for (double a : {-1.0, 1.0}) {
        for (double b : {-1.0, 1.0}) {
            for (double c : {-1.0, 1.0}) guesses.push_back({0.5 * a, 0.5 * b, 0.5 * c});
        }
    }
    return guesses;
}

}  // namespace

double ThreeBodyParameters::coupling(std::size_t i, std::size_t j) const { return couplings[coupling_slot(i, j)]; }

void ThreeBodyParameters::set_coupling(std::size_t i, std::size_t j, double value) { couplings[coupling_slot(i, j)] = value; }

ThreeBodyParameters three_body_parameters(const QuadHamiltonian& h) {
    if (h.n() != 3) throw ValidationError("three-body parameters need n = 3, got " + std::to_string(h.n()));
    ThreeBodyParameters p;
    for (std::size_t i = 0; i < 3; ++i) {
        p.m[i] = h.mass(i);
        p.d[i] = h.d(i);
    }
    p.set_coupling(0, 1, h.coupling(0, 1));
    p.set_coupling(0, 2, h.coupling(0, 2));
    p.set_coupling(1, 2, h.coupling(1, 2));
    return p;
}

ThreeBodyParameters three_body_stage(const ThreeBodyParameters& p, std::size_t stage, double alpha) {
    if (stage > 2) throw ValidationError("three-body stage must be 0, 1 or 2");
    const auto [i, j] = kThreeBodyStagePairs[stage];
    const std::size_t l = 3 - i - j;

    const double k = p.m[i] / p.m[j];
    const double a2 = alpha * alpha;
    const double s = 1.0 + k * a2;
    const double d_i = p.d[i], d_j = p.d[j];
    const double d_ij = p.coupling(i, j), d_il = p.coupling(i, l), d_jl = p.coupling(j, l);

    ThreeBodyParameters out = p;
    out.m[i] = p.m[i] * p.m[j] / (p.m[j] + p.m[i] * a2);
    out.m[j] = p.m[j] * s;
    out.d[i] = (d_i + k * alpha * d_ij + k * k * a2 * d_j) / (s * s);
    out.d[j] = d_i * a2 + d_j - alpha * d_ij;
    out.set_coupling(i, j, (d_ij * (1.0 - k * a2) - 2.0 * alpha * d_i + 2.0 * k * alpha * d_j) / s);
    out.set_coupling(i, l, (d_il + k * alpha * d_jl) / s);
    out.set_coupling(j, l, d_jl - alpha * d_il);
    return out;
}

std::array<ThreeBodyParameters, 3> three_body_stages(const ThreeBodyParameters& p, const std::array<double, 3>& alphas) {
    std::array<ThreeBodyParameters, 3> out;
    out[0] = three_body_stage(p, 0, alphas[0]);
    out[1] = three_body_stage(out[0], 1, alphas[1]);
    out[2] = three_body_stage(out[1], 2, alphas[2]);
    return out;
}

ShearStep three_body_stage_step(const ThreeBodyParameters& p, std::size_t stage, double alpha) {
    if (stage > 2) throw ValidationError("three-body stage must be 0, 1 or 2");
    const auto [i, j] = kThreeBodyStagePairs[stage];
    return ShearStep{i, j, alpha, beta_for_alpha(alpha, p.m[i], p.m[j])};
}

std::array<double, 3> three_body_offdiagonals(const ThreeBodyParameters& p, const std::array<double, 3>& alphas) {
    return three_body_stages(p, alphas)[2].couplings;
}

DiagonalResult diagonalize_three_body(const QuadHamiltonian& h, ThreeBodySolver solver, const ThreeBodyOptions& options) {
    if (h.n() != 3) throw ValidationError("three-body diagonalization needs n = 3, got " + std::to_string(h.n()));
    if (solver == ThreeBodySolver::sweep) {
        SweepOptions sweep = options.sweep;
        sweep.tol = options.tol;
        return diagonalize_general_sweep(h, sweep);
    }

    const ThreeBodyParameters p = three_body_parameters(h);
    const KPForm original = to_kpform(h);
    const double scale = original.V.cwiseAbs().maxCoeff();

    NewtonOutcome best;
    if (scale == 0.0) {
        best.alphas = {0.0, 0.0, 0.0};
        best.residual = 0.0;
        best.converged = true;
    } else {
        for (const Alphas& guess : initial_guesses(p, options.root)) {
            const NewtonOutcome attempt = newton_solve(p, guess, scale, options);
            if (attempt.residual < best.residual) best = attempt;
            if (best.converged) break;
        }
    }
    if (!best.converged) {
        throw ConvergenceError("three-body Newton solve did not converge; best scaled residual " + format_double(best.residual),
                               best.residual);
    }

    ShearSequence seq(3);
    ThreeBodyParameters current = p;
    for (std::size_t stage = 0; stage < 3; ++stage) {
        seq.append(three_body_stage_step(current, stage, best.alphas[stage]));
        current = three_body_stage(current, stage, best.alphas[stage]);
    }
    Vector m_eff(3), d_eff(3);
    m_eff << current.m[0], current.m[1], current.m[2];
    d_eff << current.d[0], current.d[1], current.d[2];
    return detail::finish_result(original, std::move(seq), std::move(m_eff), std::move(d_eff), options.tol);
}

}  // namespace qhd
