#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oamem/quantum.hpp"

using namespace oamem;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Matrix2c outer(cplx g, cplx r) {
    Matrix2c m;
    m << g * std::conj(g), g * std::conj(r), r * std::conj(g), r * std::conj(r);
    return m;
}

bool near(const Matrix2c& a, const Matrix2c& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

// Random Bloch vector with |s| <= radius.
StokesVector random_stokes(std::mt19937_64& rng, double radius = 1.0) {
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> u;
    const double x = n(rng), y = n(rng), z = n(rng);
    const double scale = radius * std::cbrt(u(rng)) / std::sqrt(x * x + y * y + z * z);
    return {x * scale, y * scale, z * scale};
}

QubitKet random_ket(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    return QubitKet::from_amplitudes({n(rng), n(rng)}, {n(rng), n(rng)});
}

}  // namespace

TEST_CASE("ket_from_coeffs examples") {
    CHECK(same_state(ket_from_coeffs(1, 0, 0), basis_state(Basis::G)));
    const QubitKet h = ket_from_coeffs(1, 1, 0);
    CHECK(std::abs(h.amp_g() - cplx(kInvSqrt2)) < 1e-15);
    CHECK(std::abs(h.amp_r() - cplx(kInvSqrt2)) < 1e-15);
    CHECK(same_state(h, basis_state(Basis::H)));

    const QubitKet a = ket_from_coeffs(1, 1, -kPi / 2);
    CHECK(std::abs(a.amp_r() - cplx(0, -kInvSqrt2)) < 1e-15);
    CHECK(same_state(a, basis_state(Basis::A)));

    CHECK_THROWS_AS(ket_from_coeffs(0, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(ket_from_coeffs(-1, 1, 0), std::invalid_argument);
}

TEST_CASE("kets are normalized and compared up to global phase") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const QubitKet k = random_ket(rng);
        CHECK(std::abs(std::norm(k.amp_g()) + std::norm(k.amp_r()) - 1.0) < 1e-12);
        const cplx phase = std::polar(1.0, 2.0 * kPi * std::uniform_real_distribution<double>()(rng));
        const QubitKet rotated = QubitKet::from_amplitudes(phase * k.amp_g(), phase * k.amp_r());
        CHECK(same_state(k, rotated));
        const QubitKet c = rotated.canonical();
        CHECK(c.amp_g().imag() == 0.0);
        CHECK(c.amp_g().real() >= 0.0);
    }
    const QubitKet r = QubitKet::from_amplitudes(0.0, cplx(0, -1)).canonical();
    CHECK(r.amp_r() == cplx(1.0, 0.0));
    CHECK_THROWS_AS(QubitKet::from_amplitudes(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("basis labels round trip") {
    for (Basis b : kAllBases) CHECK(parse_basis(basis_label(b)) == b);
    CHECK_THROWS_AS(parse_basis("X"), std::invalid_argument);
}

TEST_CASE("six MUB states: overlap 1/2 across bases, 0 or 1 within") {
    auto pair_of = [](Basis b) {
        switch (b) {
            case Basis::H: case Basis::V: return 1;
            case Basis::D: case Basis::A: return 2;
            default: return 3;
        }
    };
    for (Basis a : kAllBases) {
        for (Basis b : kAllBases) {
            const double p = std::norm(inner(basis_state(a), basis_state(b)));
            if (pair_of(a) != pair_of(b)) {
                CHECK(p == doctest::Approx(0.5).epsilon(1e-14));
            } else {
                CHECK(p == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("Pauli eigenvectors follow the documented convention") {
    auto expect = [](Basis b, int axis, double eig) {
        const QubitKet k = basis_state(b);
        Eigen::Vector2cd v(k.amp_g(), k.amp_r());
        CHECK(((pauli(axis) * v) - eig * v).norm() < 1e-14);
    };
    expect(Basis::G, 3, 1);
    expect(Basis::R, 3, -1);
    expect(Basis::H, 1, 1);
    expect(Basis::V, 1, -1);
    expect(Basis::D, 2, 1);
    expect(Basis::A, 2, -1);
}

TEST_CASE("density_from_stokes examples") {
    CHECK(near(density_from_stokes({0, 0, 0}), Matrix2c::Identity() / 2.0, 1e-15));
    CHECK(near(density_from_stokes({0, 0, -1}), outer(0, 1), 1e-15));
    CHECK(near(density_from_stokes({1, 0, 0}), outer(kInvSqrt2, kInvSqrt2), 1e-15));
    CHECK(near(density_from_stokes({0, 1, 0}), outer(kInvSqrt2, cplx(0, kInvSqrt2)), 1e-15));
}

TEST_CASE("stokes_from_density examples") {
    auto s = stokes_from_density(DensityMatrix2::maximally_mixed());
    CHECK(s.norm() < 1e-15);
    s = stokes_from_density(DensityMatrix2::from_ket(basis_state(Basis::G)));
    CHECK(s.s3 == doctest::Approx(1.0));
    CHECK(std::abs(s.s1) + std::abs(s.s2) < 1e-15);
    s = stokes_from_density(DensityMatrix2::from_ket(basis_state(Basis::D)));
    CHECK(s.s2 == doctest::Approx(1.0));
    CHECK(std::abs(s.s1) + std::abs(s.s3) < 1e-15);
}

TEST_CASE("property: Stokes round trip for |s| <= 1") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const StokesVector s = random_stokes(rng);
        const StokesVector t = stokes_from_density(density_from_stokes(s));
        CHECK(std::abs(t.s1 - s.s1) < 1e-12);
        CHECK(std::abs(t.s2 - s.s2) < 1e-12);
        CHECK(std::abs(t.s3 - s.s3) < 1e-12);
    }
}

TEST_CASE("DensityMatrix2 validation") {
    CHECK_NOTHROW(DensityMatrix2::from_matrix(density_from_stokes({0.3, -0.2, 0.5})));
    CHECK_THROWS_AS(DensityMatrix2::from_matrix(density_from_stokes({1.2, 0, 0})), std::invalid_argument);
    Matrix2c non_hermitian = Matrix2c::Identity() / 2.0;
    non_hermitian(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix2::from_matrix(non_hermitian), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix2::from_matrix(Matrix2c::Identity()), std::invalid_argument);
    CHECK(DensityMatrix2::maximally_mixed().purity() == doctest::Approx(0.5));
    CHECK(DensityMatrix2::from_ket(basis_state(Basis::D)).purity() == doctest::Approx(1.0));
}

TEST_CASE("fidelity examples") {
    const auto g = DensityMatrix2::from_ket(basis_state(Basis::G));
    const auto r = DensityMatrix2::from_ket(basis_state(Basis::R));
    const auto h = DensityMatrix2::from_ket(basis_state(Basis::H));
    const auto d = DensityMatrix2::from_ket(basis_state(Basis::D));
    CHECK(fidelity(g, r) == doctest::Approx(0.0));
    CHECK(fidelity(h, d) == doctest::Approx(0.5).epsilon(1e-12));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto rho = DensityMatrix2::from_matrix(density_from_stokes(random_stokes(rng)));
        CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(fidelity(density_from_stokes({1.2, 0, 0}), h.matrix()), std::invalid_argument);
}

TEST_CASE("property: pure-state fidelity equals |<a|b>|^2") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const QubitKet a = random_ket(rng);
        const QubitKet b = random_ket(rng);
        const cplx ov = std::conj(a.amp_g()) * b.amp_g() + std::conj(a.amp_r()) * b.amp_r();
        const double f = fidelity(DensityMatrix2::from_ket(a), DensityMatrix2::from_ket(b));
        CHECK(std::abs(f - std::norm(ov)) < 1e-10);
    }
}

TEST_CASE("property: closed-form fidelity agrees with the square-root definition and is symmetric") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 500; ++i) {
        const auto a = DensityMatrix2::from_matrix(density_from_stokes(random_stokes(rng, 0.999)));
        const auto b = DensityMatrix2::from_matrix(density_from_stokes(random_stokes(rng, 0.999)));
        const double f = fidelity(a, b);
        CHECK(std::abs(f - fidelity_uhlmann(a, b)) < 1e-10);
        CHECK(std::abs(f - fidelity(b, a)) < 1e-14);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
}

TEST_CASE("trace distance") {
    const auto g = DensityMatrix2::from_ket(basis_state(Basis::G));
    const auto r = DensityMatrix2::from_ket(basis_state(Basis::R));
    const auto h = DensityMatrix2::from_ket(basis_state(Basis::H));
    CHECK(trace_distance(g, r) == doctest::Approx(1.0));
    CHECK(trace_distance(g, g) == doctest::Approx(0.0));
    CHECK(trace_distance(g, h) == doctest::Approx(kInvSqrt2));
}

TEST_CASE("project_physical examples") {
    const Matrix2c half = Matrix2c::Identity() / 2.0;
    CHECK(near(project_physical(half).matrix(), half, 1e-15));

    Matrix2c m = Matrix2c::Zero();
    m(0, 0) = 1.1;
    m(1, 1) = -0.1;
    Matrix2c expected = Matrix2c::Zero();
    expected(0, 0) = 1.0;
    CHECK(near(project_physical(m).matrix(), expected, 1e-12));

    // 1/2 (I + 1.2 sigma_1) has eigenvalues 1.1 (|H>) and -0.1 (|V>).
    const Matrix2c over = 0.5 * (Matrix2c::Identity() + 1.2 * pauli(1));
    CHECK(near(project_physical(over).matrix(), outer(kInvSqrt2, kInvSqrt2), 1e-12));

    CHECK_THROWS_AS(project_physical(Matrix2c::Zero()), std::invalid_argument);
}

TEST_CASE("property: project_physical clamps the spectrum and keeps eigenvectors") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 500; ++i) {
        const StokesVector s = random_stokes(rng, 1.5);
        const Matrix2c in = density_from_stokes(s);
        const auto out = project_physical(in);

        // Oracle: unit trace, so eigenvalues are (1 +- |s|)/2 along +-s.
        const double len = s.norm();
        const double lo = std::max(0.0, 0.5 * (1.0 - len));
        const double hi = 0.5 * (1.0 + len);
        const double expected_len = (hi - lo) / (hi + lo);
        const StokesVector t = stokes_from_density(out);
        CHECK(std::abs(t.norm() - expected_len) < 1e-12);
        if (len > 1e-9) {
            const double cosang = (t.s1 * s.s1 + t.s2 * s.s2 + t.s3 * s.s3) / (t.norm() * len);
            CHECK(cosang == doctest::Approx(1.0).epsilon(1e-12));
        }
        if (len <= 1.0) CHECK(near(out.matrix(), in, 1e-12));
        CHECK(near(project_physical(out.matrix()).matrix(), out.matrix(), 1e-12));
        const Eigen::Vector2d ev = out.eigenvalues();
        CHECK(ev(0) >= -1e-12);
        CHECK(out.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    }
}
