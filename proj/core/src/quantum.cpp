#include "oamem/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace oamem {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const cplx kI{0.0, 1.0};

Matrix2c hermitian_part(const Matrix2c& m) { return 0.5 * (m + m.adjoint()); }

Matrix2c psd_sqrt(const Matrix2c& m) {
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(hermitian_part(m));
    Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

QubitKet QubitKet::from_amplitudes(cplx amp_g, cplx amp_r) {
    const double n = std::sqrt(std::norm(amp_g) + std::norm(amp_r));
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("QubitKet: amplitudes must be finite and not both zero");
    }
    return QubitKet(amp_g / n, amp_r / n);
}

QubitKet QubitKet::canonical() const {
    // Rotate the global phase so the reference amplitude is real and >= 0.
    if (std::abs(g_) > 0.0) {
        const cplx phase = std::conj(g_) / std::abs(g_);
        return QubitKet(std::abs(g_), r_ * phase);
    }
    return QubitKet(0.0, std::abs(r_));
}

Matrix2c QubitKet::projector() const {
    Eigen::Vector2cd v(g_, r_);
    return v * v.adjoint();
}

cplx inner(const QubitKet& a, const QubitKet& b) {
    return std::conj(a.amp_g()) * b.amp_g() + std::conj(a.amp_r()) * b.amp_r();
}

bool same_state(const QubitKet& a, const QubitKet& b, double tol) {
    const QubitKet ca = a.canonical();
    const QubitKet cb = b.canonical();
    return std::abs(ca.amp_g() - cb.amp_g()) <= tol && std::abs(ca.amp_r() - cb.amp_r()) <= tol;
}

QubitKet ket_from_coeffs(double alpha, double beta, double phi) {
    if (!(alpha >= 0.0) || !(beta >= 0.0)) {
        throw std::invalid_argument("ket_from_coeffs: alpha and beta must be >= 0");
    }
    if (alpha * alpha + beta * beta <= 0.0) {
        throw std::invalid_argument("ket_from_coeffs: alpha^2 + beta^2 must be > 0");
    }
    return QubitKet::from_amplitudes(alpha, beta * std::polar(1.0, phi));
}

QubitKet basis_state(Basis b) {
    switch (b) {
        case Basis::G: return QubitKet::from_amplitudes(1.0, 0.0);
        case Basis::R: return QubitKet::from_amplitudes(0.0, 1.0);
        case Basis::H: return QubitKet::from_amplitudes(kInvSqrt2, kInvSqrt2);
        case Basis::V: return QubitKet::from_amplitudes(kInvSqrt2, -kInvSqrt2);
        case Basis::D: return QubitKet::from_amplitudes(kInvSqrt2, kI * kInvSqrt2);
        case Basis::A: return QubitKet::from_amplitudes(kInvSqrt2, -kI * kInvSqrt2);
    }
    throw std::invalid_argument("basis_state: unknown basis");
}

std::string_view basis_label(Basis b) {
    switch (b) {
        case Basis::G: return "G";
        case Basis::R: return "R";
        case Basis::H: return "H";
        case Basis::V: return "V";
        case Basis::D: return "D";
        case Basis::A: return "A";
    }
    return "?";
}

Basis parse_basis(std::string_view label) {
    for (Basis b : kAllBases) {
        if (basis_label(b) == label) return b;
    }
    throw std::invalid_argument("unknown basis label '" + std::string(label) + "'");
}

double StokesVector::norm() const { return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3); }

const Matrix2c& pauli(int axis) {
    static const Matrix2c s1 = (Matrix2c() << 0.0, 1.0, 1.0, 0.0).finished();
    static const Matrix2c s2 = (Matrix2c() << 0.0, -kI, kI, 0.0).finished();
    static const Matrix2c s3 = (Matrix2c() << 1.0, 0.0, 0.0, -1.0).finished();
    switch (axis) {
        case 1: return s1;
        case 2: return s2;
        case 3: return s3;
        default: throw std::invalid_argument("pauli: axis must be 1, 2 or 3");
    }
}

DensityMatrix2 DensityMatrix2::from_matrix(const Matrix2c& m) {
    if (!m.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kTolerance) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    if (std::abs(m.trace() - 1.0) > kTolerance) {
        throw std::invalid_argument("density matrix trace is " + std::to_string(m.trace().real()) +
                                    ", expected 1");
    }
    const Matrix2c h = hermitian_part(m);
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -kTolerance) {
        throw std::invalid_argument("density matrix is not positive semidefinite (eigenvalue " +
                                    std::to_string(es.eigenvalues()(0)) + ")");
    }
    return DensityMatrix2(h);
}

DensityMatrix2 DensityMatrix2::from_ket(const QubitKet& k) { return DensityMatrix2(k.projector()); }

DensityMatrix2 DensityMatrix2::maximally_mixed() {
    return DensityMatrix2(Matrix2c::Identity() * 0.5);
}

Eigen::Vector2d DensityMatrix2::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double DensityMatrix2::purity() const { return (m_ * m_).trace().real(); }

Matrix2c density_from_stokes(const StokesVector& s) {
    Matrix2c rho;
    rho << 1.0 + s.s3, cplx(s.s1, -s.s2),
           cplx(s.s1, s.s2), 1.0 - s.s3;
    return 0.5 * rho;
}

StokesVector stokes_from_density(const Matrix2c& rho) {
    // Tr(rho sigma_i) written out for the fixed Pauli convention.
    return {2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

DensityMatrix2 project_physical(const Matrix2c& rho) {
    if (!rho.allFinite()) throw std::invalid_argument("project_physical: non-finite entries");
    const Matrix2c h = hermitian_part(rho);
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(h);
    const Eigen::Vector2d ev = es.eigenvalues();
    if (ev(0) >= 0.0 && std::abs(h.trace().real() - 1.0) <= 1e-12) {
        return DensityMatrix2::from_matrix(h);
    }
    const Eigen::Vector2d clamped = ev.cwiseMax(0.0);
    const double total = clamped.sum();
    if (!(total > 0.0)) {
        throw std::invalid_argument("project_physical: matrix has no positive eigenvalue");
    }
    const Eigen::Vector2d w = clamped / total;
    const Matrix2c out = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    return DensityMatrix2::from_matrix(hermitian_part(out));
}

double fidelity(const DensityMatrix2& a, const DensityMatrix2& b) {
    const double overlap = (a.matrix() * b.matrix()).trace().real();
    const double da = std::max(0.0, a.matrix().determinant().real());
    const double db = std::max(0.0, b.matrix().determinant().real());
    return std::clamp(overlap + 2.0 * std::sqrt(da * db), 0.0, 1.0);
}

double fidelity(const Matrix2c& a, const Matrix2c& b) {
    return fidelity(DensityMatrix2::from_matrix(a), DensityMatrix2::from_matrix(b));
}

double fidelity_uhlmann(const DensityMatrix2& a, const DensityMatrix2& b) {
    const Matrix2c sb = psd_sqrt(b.matrix());
    const Matrix2c inner_m = sb * a.matrix() * sb;
    const double tr = psd_sqrt(inner_m).trace().real();
    return std::clamp(tr * tr, 0.0, 1.0);
}

double trace_distance(const DensityMatrix2& a, const DensityMatrix2& b) {
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(hermitian_part(a.matrix() - b.matrix()),
                                               Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace oamem
