#pragma once

// State algebra for a qubit encoded in the {|G>, |R>} OAM basis
// (|G> = Gaussian l=0 mode, |R> = l=1 vortex mode).
//
// Pauli convention: sigma_3 is diagonal in the computational basis
// (+1 on |G>, -1 on |R>), sigma_1 has |H>,|V> = (|G> +- |R>)/sqrt2 as its
// +-1 eigenvectors and sigma_2 has |D>,|A> = (|G> +- i|R>)/sqrt2. With this
// choice S3 = (P_G - P_R)/(P_G + P_R) and rho = (I + sum_i S_i sigma_i)/2.

#include <array>
#include <complex>
#include <string_view>

#include <Eigen/Core>

namespace oamem {

using cplx = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

/// Normalized pure state a_g|G> + a_r|R>.
class QubitKet {
public:
    /// Normalizes (amp_g, amp_r); throws std::invalid_argument on a zero vector.
    static QubitKet from_amplitudes(cplx amp_g, cplx amp_r);

    cplx amp_g() const noexcept { return g_; }
    cplx amp_r() const noexcept { return r_; }

    /// Same ray with the gauge fixed: amp_g real >= 0, or amp_r real >= 0 if amp_g == 0.
    QubitKet canonical() const;

    Matrix2c projector() const;

private:
    QubitKet(cplx g, cplx r) : g_(g), r_(r) {}
    cplx g_;
    cplx r_;
};

cplx inner(const QubitKet& a, const QubitKet& b);

/// True when a and b describe the same physical state (equal up to global phase).
bool same_state(const QubitKet& a, const QubitKet& b, double tol = 1e-12);

/// alpha|G> + beta e^{i phi}|R>, normalized.
QubitKet ket_from_coeffs(double alpha, double beta, double phi);

enum class Basis { G, R, H, V, D, A };

inline constexpr std::array<Basis, 6> kAllBases{Basis::H, Basis::V, Basis::D,
                                                Basis::A, Basis::G, Basis::R};

QubitKet basis_state(Basis b);
std::string_view basis_label(Basis b);
/// Parses "G","R","H","V","D","A"; throws std::invalid_argument otherwise.
Basis parse_basis(std::string_view label);

struct StokesVector {
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;

    double norm() const;
};

const Matrix2c& pauli(int axis);  // axis in {1,2,3}

/// 2x2 density matrix that satisfies Hermiticity, unit trace and PSD.
class DensityMatrix2 {
public:
    static constexpr double kTolerance = 1e-10;

    /// Validates the matrix; throws std::invalid_argument if it is not physical.
    static DensityMatrix2 from_matrix(const Matrix2c& m);
    static DensityMatrix2 from_ket(const QubitKet& k);
    static DensityMatrix2 maximally_mixed();

    const Matrix2c& matrix() const noexcept { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }

    /// Eigenvalues in ascending order.
    Eigen::Vector2d eigenvalues() const;
    double purity() const;

private:
    explicit DensityMatrix2(const Matrix2c& m) : m_(m) {}
    Matrix2c m_;
};

/// Linear reconstruction (I + sum S_i sigma_i)/2. Unphysical inputs (|s| > 1)
/// produce a Hermitian unit-trace matrix with a negative eigenvalue.
Matrix2c density_from_stokes(const StokesVector& s);

/// S_i = Tr(rho sigma_i).
StokesVector stokes_from_density(const Matrix2c& rho);
inline StokesVector stokes_from_density(const DensityMatrix2& rho) {
    return stokes_from_density(rho.matrix());
}

/// Clamps negative eigenvalues to zero and renormalizes to unit trace.
/// Inputs that are already physical are returned unchanged.
DensityMatrix2 project_physical(const Matrix2c& rho);

/// Uhlmann fidelity via the 2x2 closed form Tr(r1 r2) + 2 sqrt(det r1 det r2).
double fidelity(const DensityMatrix2& a, const DensityMatrix2& b);

/// Raw-matrix overload; throws std::invalid_argument unless both are physical.
double fidelity(const Matrix2c& a, const Matrix2c& b);

/// Uhlmann fidelity via matrix square roots: Tr[sqrt(sqrt(b) a sqrt(b))]^2.
double fidelity_uhlmann(const DensityMatrix2& a, const DensityMatrix2& b);

/// Trace distance ||a - b||_1 / 2.
double trace_distance(const DensityMatrix2& a, const DensityMatrix2& b);

}  // namespace oamem
