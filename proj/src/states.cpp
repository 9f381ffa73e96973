#include "qhdiag/states.hpp"

#include "qhdiag/error.hpp"
#include "qhdiag/format.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qhd {

GaussianState::GaussianState(Matrix B) : b_(std::move(B)), log_norm_(0.0) {
    if (b_.rows() != b_.cols() || b_.rows() == 0) throw ValidationError("Gaussian exponent must be a non-empty square matrix");
    if (!b_.allFinite()) throw ValidationError("Gaussian exponent has non-finite entries");
    const double scale = std::max(b_.cwiseAbs().maxCoeff(), 1.0);
    if ((b_ - b_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ValidationError("Gaussian exponent is not symmetric");
    }
    b_ = 0.5 * (b_ + b_.transpose()).eval();
    const Eigen::LLT<Matrix> llt(b_);
    if (llt.info() != Eigen::Success) throw ValidationError("Gaussian exponent is not positive definite");

    double log_det = 0.0;
    const Matrix& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
    log_norm_ = 0.25 * (log_det - static_cast<double>(b_.rows()) * std::log(std::numbers::pi));
}

double GaussianState::log_amplitude(const Vector& u) const {
    if (u.size() != b_.rows()) throw ValidationError("coordinate vector has the wrong dimension");
    return log_norm_ - 0.5 * u.dot(b_ * u);
}

bool GaussianState::is_product_state(double tol) const {
    for (Eigen::Index i = 0; i < b_.rows(); ++i) {
        for (Eigen::Index j = 0; j < b_.cols(); ++j) {
            if (i != j && std::abs(b_(i, j)) > tol) return false;
        }
    }
    return true;
}

void LadderOp::validate() const {
    if (cu.size() != cp.size()) throw ValidationError("ladder operator coefficient vectors differ in length");
    bool nonzero = false;
    for (std::size_t k = 0; k < cu.size(); ++k) {
        if (!std::isfinite(cu[k].real()) || !std::isfinite(cu[k].imag()) || !std::isfinite(cp[k].real()) ||
            !std::isfinite(cp[k].imag())) {
            throw ValidationError("ladder operator coefficients must be finite");
        }
        nonzero = nonzero || cu[k] != 0.0 || cp[k] != 0.0;
    }
    if (!nonzero) throw ValidationError("ladder operator has no nonzero coefficient");
}

GaussianState ground_state_from_diagonal(const DiagonalResult& result, double hbar) {
    std::vector<double> bad;
    for (Eigen::Index i = 0; i < result.omega_sq.size(); ++i) {
        if (!(result.omega_sq(i) > 0.0)) bad.push_back(result.omega_sq(i));
    }
    if (!bad.empty()) {
        std::string msg = "no normalizable ground state: non-positive squared frequencies";
        for (double w2 : bad) msg += " " + format_double(w2);
        throw UnstablePotential(msg, std::move(bad));
    }
    const Eigen::Index n = result.omega_sq.size();
    Matrix b = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) b(i, i) = result.m_eff(i) * std::sqrt(result.omega_sq(i)) / hbar;
    return GaussianState(std::move(b));
}

GaussianState entangled_ground_state(const GaussianState& state, const ShearSequence& seq) {
    if (seq.n() != state.n()) throw ValidationError("shear sequence and state differ in size");
    // unit determinant, so the inverse is exact up to rounding
    const Matrix inverse_map = seq.composed_map().inverse();
    return GaussianState(inverse_map.transpose() * state.B() * inverse_map);
}

GaussianState ground_state_from_normal_modes(const QuadHamiltonian& h, const NormalModes& modes) {
    std::vector<double> bad;
    for (Eigen::Index s = 0; s < modes.omega_sq.size(); ++s) {
        if (!(modes.omega_sq(s) > 0.0)) bad.push_back(modes.omega_sq(s));
    }
    if (!bad.empty()) throw UnstablePotential("no normalizable ground state", std::move(bad));
    const Vector omega_over_hbar = modes.omega_sq.cwiseSqrt() / h.hbar();
    const Vector sqrt_m = h.masses().cwiseSqrt();
    const Matrix core = modes.eigvecs * omega_over_hbar.asDiagonal() * modes.eigvecs.transpose();
    return GaussianState(sqrt_m.asDiagonal() * core * sqrt_m.asDiagonal());
}

GroundStateCheck ground_state_residual(const GaussianState& state, const KPForm& form, double hbar) {
    if (state.n() != form.n()) throw ValidationError("state and form differ in size");
    const Matrix& b = state.B();
    const Matrix lhs = hbar * hbar * (b * form.K * b);
    const double v_norm = form.V.norm();
    const double diff = (lhs - form.V).norm();
    return {v_norm > 0.0 ? diff / v_norm : diff, 0.5 * hbar * hbar * (form.K * b).trace()};
}

LadderPair ladder_pair(std::size_t i, std::size_t n, double m_eff, double omega, double hbar) {
    if (i >= n) throw ValidationError("ladder operator index out of range");
    if (!(omega > 0.0)) throw ValidationError("ladder operators need a positive frequency");
    if (!(m_eff > 0.0) || !(hbar > 0.0)) throw ValidationError("ladder operators need positive mass and hbar");
    const double norm = 1.0 / std::sqrt(2.0 * m_eff * hbar * omega);
    LadderPair out;
    out.a.cu.assign(n, 0.0);
    out.a.cp.assign(n, 0.0);
    out.a_dagger = out.a;
    out.a.cu[i] = m_eff * omega * norm;
    out.a.cp[i] = std::complex<double>(0.0, norm);
    out.a_dagger.cu[i] = std::conj(out.a.cu[i]);
    out.a_dagger.cp[i] = std::conj(out.a.cp[i]);
    return out;
}

std::complex<double> commutator(const LadderOp& x, const LadderOp& y, double hbar) {
    if (x.cu.size() != y.cu.size() || x.cp.size() != y.cp.size() || x.cu.size() != x.cp.size()) {
        throw ValidationError("commutator of operators of different dimension");
    }
    std::complex<double> sum = 0.0;
    for (std::size_t k = 0; k < x.cu.size(); ++k) sum += x.cu[k] * y.cp[k] - x.cp[k] * y.cu[k];
    return std::complex<double>(0.0, hbar) * sum;
}

}  // namespace qhd
