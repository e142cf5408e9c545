#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "oamem/eit.hpp"
#include "oamem/errors.hpp"
#include "oamem/tomography.hpp"

using namespace oamem;

namespace {

TomographyRecord record(std::int64_t h, std::int64_t v, std::int64_t d, std::int64_t a, std::int64_t g,
                        std::int64_t r, double time = 1200) {
    return TomographyRecord::from_records({{Basis::H, h, time}, {Basis::V, v, time}, {Basis::D, d, time},
                                           {Basis::A, a, time}, {Basis::G, g, time}, {Basis::R, r, time}});
}

DensityMatrix2 pure(Basis b) { return DensityMatrix2::from_ket(basis_state(b)); }

CoherentSource source(double nbar = 0.5) { return {nbar, 2.5e5}; }

DetectorModel detector(double background = 0) { return {0.3, background, 10}; }

}  // namespace

TEST_CASE("projection_probability") {
    CHECK(projection_probability(pure(Basis::H), basis_state(Basis::H)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(projection_probability(pure(Basis::H), basis_state(Basis::V))) < 1e-12);
    for (Basis b : kAllBases) {
        CHECK(projection_probability(DensityMatrix2::maximally_mixed(), basis_state(b)) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("TomographyRecord validation") {
    CHECK_THROWS_AS(TomographyRecord::from_records({{Basis::H, 1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(TomographyRecord::from_records({{Basis::H, 1, 1}, {Basis::H, 1, 1}, {Basis::D, 1, 1},
                                                    {Basis::A, 1, 1}, {Basis::G, 1, 1}, {Basis::R, 1, 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TomographyRecord::from_records({{Basis::H, 1, 1}, {Basis::V, 1, 1}, {Basis::D, 1, 1},
                                                    {Basis::A, 1, 1}, {Basis::G, 1, 1}, {Basis::R, 1, 2}}),
                    std::invalid_argument);
    const auto rec = record(1, 2, 3, 4, 5, 6);
    CHECK(rec.counts(Basis::A) == 4);
    CHECK(rec.records()[4].basis == Basis::G);
}

TEST_CASE("reconstruct examples") {
    auto r = reconstruct(record(500, 500, 500, 500, 500, 500));
    CHECK(r.stokes.norm() == 0.0);
    CHECK((r.rho.matrix() - DensityMatrix2::maximally_mixed().matrix()).norm() < 1e-15);

    r = reconstruct(record(1000, 0, 500, 500, 500, 500));
    CHECK(r.stokes.s1 == 1.0);
    CHECK(fidelity(r.rho, pure(Basis::H)) == doctest::Approx(1.0).epsilon(1e-12));

    r = reconstruct(record(900, 100, 480, 520, 510, 490));
    CHECK(r.stokes.s1 == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(r.stokes.s2 == doctest::Approx(-0.04).epsilon(1e-14));
    CHECK(r.stokes.s3 == doctest::Approx(0.02).epsilon(1e-14));
    CHECK((r.rho.matrix() - density_from_stokes({0.8, -0.04, 0.02})).norm() < 1e-15);

    // Over-unit Stokes vector is clamped onto the pure state along S.
    r = reconstruct(record(1000, 0, 1000, 0, 500, 500));
    CHECK(r.rho.purity() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reconstruct: degenerate pairs are named") {
    auto message = [](const TomographyRecord& rec) {
        try {
            (void)reconstruct(rec);
        } catch (const degenerate_data_error& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(record(0, 0, 1, 1, 1, 1)).find("H/V") != std::string::npos);
    CHECK(message(record(1, 1, 0, 0, 1, 1)).find("D/A") != std::string::npos);
    CHECK(message(record(1, 1, 1, 1, 0, 0)).find("G/R") != std::string::npos);
    // Background correction can empty a pair too.
    CHECK(message(record(10, 10, 1000000, 1000000, 1000000, 1000000, 1)).empty());
    CHECK_THROWS_AS(reconstruct(record(10, 10, 1000000, 1000000, 1000000, 1000000, 1), {true, 300}), degenerate_data_error);
}

TEST_CASE("property: reconstruction is exactly invariant under uniform scaling") {
    const auto base = record(913, 87, 455, 545, 612, 388);
    const auto r0 = reconstruct(base);
    for (std::int64_t k : {2, 3, 7, 100, 1024}) {
        const auto scaled = base.transformed([k](Basis, std::int64_t c) { return c * k; });
        const auto r = reconstruct(scaled);
        CHECK(r.stokes.s1 == r0.stokes.s1);
        CHECK(r.stokes.s2 == r0.stokes.s2);
        CHECK(r.stokes.s3 == r0.stokes.s3);
        CHECK(r.rho.matrix() == r0.rho.matrix());
    }
}

TEST_CASE("simulate_tomography examples") {
    const auto g = simulate_tomography(pure(Basis::G), source(), detector(), 1200, 7);
    CHECK(g.counts(Basis::R) == 0);
    CHECK(g.counts(Basis::G) > 0);

    // Maximally mixed: all six counts agree within 4 sigma of the common mean.
    const auto m = simulate_tomography(DensityMatrix2::maximally_mixed(), source(), detector(300), 1200, 8);
    const double mean = expected_counts(0.5, source(), detector(300), 1200);
    for (Basis b : kAllBases) CHECK(std::abs(static_cast<double>(m.counts(b)) - mean) < 4 * std::sqrt(mean));

    // Throughput scales the signal only.
    const auto t = simulate_tomography(pure(Basis::H), source(), detector(0), 1200, 9, 0.5);
    const double full = expected_counts(1.0, source(), detector(0), 1200);
    CHECK(std::abs(static_cast<double>(t.counts(Basis::H)) - 0.5 * full) < 4 * std::sqrt(0.5 * full));
}

TEST_CASE("property: round trip converges in trace distance at >= 1e5 counts per basis") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    const double time = 1e5 / expected_counts(0.5, source(), detector(0), 1.0);
    for (int i = 0; i < 50; ++i) {
        // Random mixed state.
        StokesVector s{n(rng), n(rng), n(rng)};
        const double len = std::uniform_real_distribution<double>(0, 1)(rng) / s.norm();
        s = {s.s1 * len, s.s2 * len, s.s3 * len};
        const auto rho = DensityMatrix2::from_matrix(density_from_stokes(s));
        const auto rec = simulate_tomography(rho, source(), detector(0), time, 100 + i);
        CHECK(trace_distance(reconstruct(rec).rho, rho) < 0.01);
    }
}

TEST_CASE("fidelity_with_error") {
    const auto rho = pure(Basis::D);
    SUBCASE("noiseless counts, huge statistics") {
        const auto rec = record(500000, 500000, 1000000, 0, 500000, 500000);
        const auto f = fidelity_with_error(rec, rho, 200, 1);
        CHECK(f.fidelity >= 0.999);
        CHECK(f.sigma < 0.001);
    }
    SUBCASE("sigma scales as 1/sqrt(N)") {
        const auto rec = record(5000, 5000, 9000, 1000, 5000, 5000);
        const auto big = rec.transformed([](Basis, std::int64_t c) { return c * 100; });
        const double s1 = fidelity_with_error(rec, rho, 2000, 2).sigma;
        const double s100 = fidelity_with_error(big, rho, 2000, 3).sigma;
        CHECK(s1 / s100 == doctest::Approx(10.0).epsilon(0.1));
    }
    SUBCASE("sigma decreases with collection time") {
        double prev = 1.0;
        for (double time : {1.0, 10.0, 100.0}) {
            const auto rec = simulate_tomography(pure(Basis::H), source(), detector(300), time, 5);
            const double s = fidelity_with_error(rec, pure(Basis::H), 1000, 6).sigma;
            CHECK(s < prev);
            prev = s;
        }
    }
    SUBCASE("stored |H> with equal efficiencies, no background") {
        const auto st = store_qubit(basis_state(Basis::H), {0.6, 0.6, 0});
        const auto rec = simulate_tomography(DensityMatrix2::from_ket(st.output), source(), detector(0), 1200, 10,
                                             st.overall_efficiency);
        const auto f = fidelity_with_error(rec, pure(Basis::H), 1000, 11);
        CHECK(f.fidelity >= 1.0 - 3 * f.sigma - 1e-6);
    }
    SUBCASE("deterministic and thread-count independent") {
        const auto rec = simulate_tomography(pure(Basis::A), source(0.1), detector(300), 10, 12);
        const auto a = fidelity_with_error(rec, pure(Basis::A), 500, 13, {}, 1);
        const auto b = fidelity_with_error(rec, pure(Basis::A), 500, 13, {}, 4);
        CHECK(a.fidelity == b.fidelity);
        CHECK(a.sigma == b.sigma);
    }
    SUBCASE("resample count and degenerate records") {
        CHECK_THROWS_AS(fidelity_with_error(record(1, 1, 1, 1, 1, 1), rho, 99, 1), std::invalid_argument);
        const auto sparse = record(1, 0, 1, 0, 1, 0);
        const auto f = fidelity_with_error(sparse, pure(Basis::G), 200, 1);
        CHECK(f.failed_resamples > 0);
    }
}

TEST_CASE("property: fidelity falls as nbar falls with fixed background") {
    double prev = 1.0;
    for (double nbar : {2.0, 1.0, 0.5, 0.1, 0.02}) {
        const auto rec = simulate_tomography(pure(Basis::H), source(nbar), detector(300), 1200, 20, 0.65);
        const double f = fidelity(reconstruct(rec).rho, pure(Basis::H));
        CHECK(f < prev);
        prev = f;
    }
}

TEST_CASE("background correction recovers the pure state") {
    const auto rec = simulate_tomography(pure(Basis::H), source(0.1), detector(300), 1200, 30, 0.65);
    const double raw = fidelity(reconstruct(rec).rho, pure(Basis::H));
    const double corrected = fidelity(reconstruct(rec, {true, 300}).rho, pure(Basis::H));
    CHECK(corrected > raw);
    CHECK(corrected > 0.999);
}

TEST_CASE("reconstruction JSON") {
    auto r = reconstruct(record(900, 100, 480, 520, 510, 490));
    r.fidelity_vs_input = 0.9;
    r.fidelity_sigma = 0.01;
    const auto j = nlohmann::json::parse(reconstruction_to_json(r));
    CHECK(j.at("stokes").size() == 3);
    CHECK(j.at("stokes")[0].get<double>() == r.stokes.s1);
    CHECK(j.at("rho_re")[0][1].get<double>() == r.rho(0, 1).real());
    CHECK(j.at("rho_im")[1][0].get<double>() == r.rho(1, 0).imag());
    CHECK(j.at("fidelity").get<double>() == 0.9);
    CHECK(j.at("fidelity_sigma").get<double>() == 0.01);
}
