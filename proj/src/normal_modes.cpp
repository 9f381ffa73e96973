#include "qhdiag/normal_modes.hpp"

#include "qhdiag/error.hpp"
#include "qhdiag/format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace qhd {

namespace {

constexpr int kMaxJacobiSweeps = 100;

double off_diagonal_norm_sq(const Matrix& a) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (i != j) sum += a(i, j) * a(i, j);
        }
    }
    return sum;
}

// A <- J^T A J and V <- V J for the rotation zeroing A(p, q).
void rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
    const double apq = a(p, q);
    if (apq == 0.0) return;
    const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    for (Eigen::Index k = 0; k < a.rows(); ++k) {
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(k, q) = s * akp + c * akq;
    }
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
        const double apk = a(p, k);
        const double aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = s * apk + c * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    for (Eigen::Index k = 0; k < v.rows(); ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
    }
}

}  // namespace

Matrix mass_scaled_matrix(const QuadHamiltonian& h) {
    const KPForm form = to_kpform(h);
    const Vector inv_sqrt_m = h.masses().cwiseSqrt().cwiseInverse();
    return inv_sqrt_m.asDiagonal() * form.V * inv_sqrt_m.asDiagonal();
}

NormalModes eigendecompose(const Matrix& D) {
    if (D.rows() != D.cols()) throw ValidationError("eigendecompose needs a square matrix");
    if (!D.allFinite()) throw ValidationError("eigendecompose got non-finite entries");
    const Eigen::Index n = D.rows();
    if (n == 0) return {Vector(0), Matrix(0, 0)};

    const double scale = std::max(D.cwiseAbs().maxCoeff(), 1.0);
    if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ValidationError("eigendecompose needs a symmetric matrix");
    }

    Matrix a = 0.5 * (D + D.transpose());
    Matrix v = Matrix::Identity(n, n);
    const double frob_sq = a.squaredNorm();
    const double eps = std::numeric_limits<double>::epsilon();

    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        if (off_diagonal_norm_sq(a) <= eps * eps * frob_sq) break;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });

    NormalModes out{Vector(n), Matrix(n, n)};
    for (Eigen::Index s = 0; s < n; ++s) {
        const Eigen::Index src = order[static_cast<std::size_t>(s)];
        out.omega_sq(s) = a(src, src);
        Vector col = v.col(src);
        for (Eigen::Index k = 0; k < n; ++k) {
            // first entry that is not rounding noise fixes the sign
            if (std::abs(col(k)) > 1e-12) {
                if (col(k) < 0.0) col = -col;
                break;
            }
        }
        out.eigvecs.col(s) = col;
    }
    return out;
}

NormalModes normal_modes(const QuadHamiltonian& h) { return eigendecompose(mass_scaled_matrix(h)); }

std::vector<double> toeplitz_frequencies(std::size_t n, double phi11, double phi12, double m) {
    if (n == 0) throw ValidationError("toeplitz_frequencies needs n >= 1");
    if (!(m > 0.0)) throw ValidationError("toeplitz_frequencies needs a positive mass");
    std::vector<double> out(n);
    for (std::size_t s = 1; s <= n; ++s) {
        const double angle = static_cast<double>(s) * std::numbers::pi / static_cast<double>(n + 1);
        out[s - 1] = phi11 / m + 2.0 * (phi12 / m) * std::cos(angle);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double zero_point_energy(std::span<const double> omega_sq, double hbar) {
    std::vector<double> negative;
    for (double w2 : omega_sq) {
        if (!(w2 >= 0.0)) negative.push_back(w2);
    }
    if (!negative.empty()) {
        std::string msg = "unstable potential: negative squared frequencies";
        for (double w2 : negative) msg += " " + format_double(w2);
        throw UnstablePotential(msg, std::move(negative));
    }
    double sum = 0.0;
    for (double w2 : omega_sq) sum += std::sqrt(w2);
    return 0.5 * hbar * sum;
}

double zero_point_energy(const Vector& omega_sq, double hbar) {
    return zero_point_energy(std::span<const double>(omega_sq.data(), static_cast<std::size_t>(omega_sq.size())), hbar);
}

}  // namespace qhd
