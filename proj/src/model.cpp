#include "qhdiag/model.hpp"

#include "qhdiag/error.hpp"

#include <cmath>
#include <string>

namespace qhd {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

double relative_asymmetry(const Matrix& m) {
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
    return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

PairCouplings::PairCouplings(std::size_t n) : n_(n), packed_(n * (n > 0 ? n - 1 : 0) / 2, 0.0) {}

std::size_t PairCouplings::index(std::size_t i, std::size_t j) const {
    if (i == j) throw ValidationError("pair coupling requested for self pair (" + std::to_string(i) + ")");
    if (i >= n_ || j >= n_) {
        throw ValidationError("pair coupling index out of range: (" + std::to_string(i) + ", " +
                              std::to_string(j) + ") with n = " + std::to_string(n_));
    }
    if (i > j) std::swap(i, j);
    // row-major strict upper triangle
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

double PairCouplings::operator()(std::size_t i, std::size_t j) const { return packed_[index(i, j)]; }

void PairCouplings::set(std::size_t i, std::size_t j, double value) {
    if (!std::isfinite(value)) throw ValidationError("pair coupling must be finite");
    packed_[index(i, j)] = value;
}

Matrix PairCouplings::dense() const {
    const auto n = static_cast<Eigen::Index>(n_);
    Matrix out = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double v = (*this)(i, j);
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return out;
}

PotentialParameters symmetrize(const Matrix& phi) {
    if (phi.rows() != phi.cols()) {
        throw ValidationError("force-constant matrix must be square, got " + std::to_string(phi.rows()) +
                              "x" + std::to_string(phi.cols()));
    }
    if (!all_finite(phi)) throw ValidationError("force-constant matrix has non-finite entries");

    const auto n = static_cast<std::size_t>(phi.rows());
    PotentialParameters out{Vector(phi.rows()), PairCouplings(n)};
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
        out.d_diag(i) = 0.5 * phi(i, i);
        for (Eigen::Index j = i + 1; j < phi.cols(); ++j) {
            out.d_off.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), 0.5 * (phi(i, j) + phi(j, i)));
        }
    }
    return out;
}

QuadHamiltonian::QuadHamiltonian(Vector masses, PotentialParameters potential, double hbar)
    : masses_(std::move(masses)), potential_(std::move(potential)), hbar_(hbar) {
    if (masses_.size() == 0) throw ValidationError("Hamiltonian needs at least one particle");
    if (!(std::isfinite(hbar_) && hbar_ > 0.0)) throw ValidationError("hbar must be positive and finite");
    for (Eigen::Index i = 0; i < masses_.size(); ++i) {
        if (!(std::isfinite(masses_(i)) && masses_(i) > 0.0)) {
            throw ValidationError("mass " + std::to_string(i) + " must be positive and finite");
        }
    }
    if (potential_.d_diag.size() != masses_.size() || potential_.d_off.size() != n()) {
        throw ValidationError("potential parameters do not match particle count " + std::to_string(n()));
    }
    if (!potential_.d_diag.allFinite()) throw ValidationError("on-site constants d_i must be finite");
}

QuadHamiltonian QuadHamiltonian::from_force_constants(const Vector& masses, const Matrix& phi, double hbar) {
    if (phi.rows() != masses.size()) {
        throw ValidationError("force-constant matrix size " + std::to_string(phi.rows()) +
                              " does not match " + std::to_string(masses.size()) + " masses");
    }
    return QuadHamiltonian(masses, symmetrize(phi), hbar);
}

KPForm::KPForm(Matrix kinetic, Matrix potential) : K(std::move(kinetic)), V(std::move(potential)) {
    if (K.rows() != K.cols() || V.rows() != V.cols() || K.rows() != V.rows()) {
        throw ValidationError("kinetic and potential matrices must be square and of equal size");
    }
    if (!all_finite(K) || !all_finite(V)) throw ValidationError("quadratic form has non-finite entries");
    if (relative_asymmetry(K) > 1e-12) throw ValidationError("kinetic matrix is not symmetric");
    if (relative_asymmetry(V) > 1e-12) throw ValidationError("potential matrix is not symmetric");
    K = 0.5 * (K + K.transpose()).eval();
    V = 0.5 * (V + V.transpose()).eval();
    if (K.rows() > 0 && K.llt().info() != Eigen::Success) {
        throw ValidationError("kinetic matrix is not positive definite");
    }
}

KPForm to_kpform(const QuadHamiltonian& h) {
    const auto n = static_cast<Eigen::Index>(h.n());
    Matrix K = h.masses().cwiseInverse().asDiagonal();
    Matrix V = h.couplings().dense();
    for (Eigen::Index i = 0; i < n; ++i) V(i, i) = 2.0 * h.d_diag()(i);
    return KPForm(std::move(K), std::move(V));
}

QuadHamiltonian from_kpform(const KPForm& form, double hbar) {
    const auto n = static_cast<Eigen::Index>(form.n());
    Vector masses(n);
    PotentialParameters p{Vector(n), PairCouplings(form.n())};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && form.K(i, j) != 0.0) throw ValidationError("kinetic matrix is not diagonal");
        }
        masses(i) = 1.0 / form.K(i, i);
        p.d_diag(i) = 0.5 * form.V(i, i);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            p.d_off.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), form.V(i, j));
        }
    }
    return QuadHamiltonian(std::move(masses), std::move(p), hbar);
}

QuadHamiltonian build_nn_chain(std::span<const double> masses, std::span<const double> d_diag,
                               std::span<const double> d_nn, double hbar) {
    const std::size_t n = masses.size();
    if (n == 0) throw ValidationError("chain needs at least one particle");
    if (d_diag.size() != n || d_nn.size() != n - 1) {
        throw ValidationError("chain of " + std::to_string(n) + " particles needs " + std::to_string(n) +
                              " on-site constants and " + std::to_string(n - 1) + " nearest-neighbour couplings");
    }
    Vector m(static_cast<Eigen::Index>(n));
    PotentialParameters p{Vector(static_cast<Eigen::Index>(n)), PairCouplings(n)};
    for (std::size_t i = 0; i < n; ++i) {
        m(static_cast<Eigen::Index>(i)) = masses[i];
        p.d_diag(static_cast<Eigen::Index>(i)) = d_diag[i];
        if (i + 1 < n) p.d_off.set(i, i + 1, d_nn[i]);
    }
    return QuadHamiltonian(std::move(m), std::move(p), hbar);
}

QuadHamiltonian build_bravais_chain(std::size_t n, double m, double d1, double d12, double hbar) {
    if (n == 0 || n % 2 != 0) {
        throw ValidationError("Bravais chain requires an even number of particles, got " + std::to_string(n));
    }
    const std::vector<double> masses(n, m), on_site(n, d1), nn(n - 1, d12);
    return build_nn_chain(masses, on_site, nn, hbar);
}

bool is_bravais_chain(const QuadHamiltonian& h) {
    const std::size_t n = h.n();
    if (n % 2 != 0) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if (h.mass(i) != h.mass(0) || h.d(i) != h.d(0)) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double expected = (j == i + 1) ? h.coupling(0, 1) : 0.0;
            if (h.coupling(i, j) != expected) return false;
        }
    }
    return true;
}

}  // namespace qhd
