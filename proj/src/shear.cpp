#include "qhdiag/shear.hpp"

#include "qhdiag/error.hpp"

#include <cmath>
#include <string>

namespace qhd {

void ShearStep::validate(std::size_t n) const {
    if (i == j) throw ValidationError("shear step needs distinct indices, got (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    if (i >= n || j >= n) {
        throw ValidationError("shear step index out of range: (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") with n = " + std::to_string(n));
    }
    if (!std::isfinite(alpha) || !std::isfinite(beta)) throw ValidationError("shear parameters must be finite");
}

ShearSequence::ShearSequence(std::size_t n)
    : n_(n), composed_(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))) {}

void ShearSequence::append(const ShearStep& step) {
    step.validate(n_);
    composed_ = composed_ * step_coordinate_map(step, n_);
    steps_.push_back(step);
}

Matrix step_coordinate_map(const ShearStep& step, std::size_t n) {
    step.validate(n);
    const auto dim = static_cast<Eigen::Index>(n);
    const auto i = static_cast<Eigen::Index>(step.i);
    const auto j = static_cast<Eigen::Index>(step.j);
    Matrix m = Matrix::Identity(dim, dim);
    m(i, i) = 1.0 + step.alpha * step.beta;
    m(i, j) = -step.alpha;
    m(j, i) = -step.beta;
    m(j, j) = 1.0;
    return m;
}

Matrix step_momentum_map(const ShearStep& step, std::size_t n) {
    step.validate(n);
    const auto dim = static_cast<Eigen::Index>(n);
    const auto i = static_cast<Eigen::Index>(step.i);
    const auto j = static_cast<Eigen::Index>(step.j);
    Matrix m = Matrix::Identity(dim, dim);
    m(i, i) = 1.0;
    m(i, j) = step.beta;
    m(j, i) = step.alpha;
    m(j, j) = 1.0 + step.alpha * step.beta;
    return m;
}

KPForm conjugate(const KPForm& form, const ShearStep& step) {
    const Matrix m = step_coordinate_map(step, form.n());
    const Matrix p = step_momentum_map(step, form.n());
    Matrix k = p.transpose() * form.K * p;
    Matrix v = m.transpose() * form.V * m;
    return KPForm(0.5 * (k + k.transpose()), 0.5 * (v + v.transpose()));
}

KPForm conjugate(const KPForm& form, const ShearSequence& seq) {
    if (seq.n() != form.n()) throw ValidationError("shear sequence and form differ in size");
    KPForm out = form;
    for (const ShearStep& step : seq.steps()) out = conjugate(out, step);
    return out;
}

double beta_for_alpha(double alpha, double m_i, double m_j) {
    if (!(m_i > 0.0 && m_j > 0.0)) throw ValidationError("beta_for_alpha needs positive masses");
    if (alpha == 0.0) return 0.0;
    return -alpha / (alpha * alpha + m_j / m_i);
}

double AlphaRoots::smaller() const noexcept { return std::abs(plus) <= std::abs(minus) ? plus : minus; }

std::optional<AlphaRoots> alpha_roots(double d_i, double d_j, double d_ij, double k_ji) {
    if (!(k_ji > 0.0)) throw ValidationError("alpha_roots needs a positive mass ratio");
    if (d_ij == 0.0) return std::nullopt;

    const double b = d_i * k_ji - d_j;
    const double disc = std::hypot(b, d_ij * std::sqrt(k_ji));
    AlphaRoots roots{};
    if (b >= 0.0) {
        roots.plus = -(b + disc) / d_ij;
        roots.minus = -k_ji / roots.plus;
    } else {
        roots.minus = -(b - disc) / d_ij;
        roots.plus = -k_ji / roots.minus;
    }
    return roots;
}

double select_root(const std::optional<AlphaRoots>& roots, RootChoice choice) {
    if (!roots) return 0.0;
    switch (choice) {
        case RootChoice::plus: return roots->plus;
        case RootChoice::minus: return roots->minus;
        case RootChoice::smaller: break;
    }
    return roots->smaller();
}

ShearStep zeroing_step(const KPForm& form, std::size_t i, std::size_t j, RootChoice choice) {
    ShearStep step{i, j, 0.0, 0.0};
    step.validate(form.n());
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    const double m_i = 1.0 / form.K(ii, ii);
    const double m_j = 1.0 / form.K(jj, jj);
    const double d_i = 0.5 * form.V(ii, ii);
    const double d_j = 0.5 * form.V(jj, jj);
    step.alpha = select_root(alpha_roots(d_i, d_j, form.V(ii, jj), m_j / m_i), choice);
    step.beta = beta_for_alpha(step.alpha, m_i, m_j);
    return step;
}

}  // namespace qhd
