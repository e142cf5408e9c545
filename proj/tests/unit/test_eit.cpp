#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oamem/eit.hpp"
#include "oamem/errors.hpp"
#include "oamem/scenario.hpp"

using namespace oamem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLightNsPerMm = 1.0 / 299.792458;

EnsembleConfig ensemble(double gamma_12_rel) {
    EnsembleConfig e = EnsembleConfig::rb87_d1();
    e.gamma_12 = gamma_12_rel * e.gamma_e;
    return e;
}

// Analytic phase slope of the transfer exponent at zero detuning:
// with D0 = g/2 + w^2/4 (units of Gamma), delay = (od/4)(w^2/4 - g^2)/D0^2.
double delay_oracle_ns(double od, double g, double w, double gamma_e) {
    const double d0 = g / 2 + w * w / 4;
    return (od / 4) * (w * w / 4 - g * g) / (d0 * d0) / gamma_e * 1e9;
}

double rel_l2(const Waveform& a, const Waveform& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto other = b.value_at(a.time(i));
        num += std::norm(a.samples[i] - other);
        den += std::norm(other);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("control envelope ramps") {
    const double rabi = 3e8;
    const auto p = StorageProtocol::store(rabi, 100, 200, 30);
    CHECK(p.switch_on_ns == doctest::Approx(300));
    CHECK(p.storage_time_ns() == doctest::Approx(200));
    CHECK(p.switches());
    CHECK(control_envelope(p, 50) == doctest::Approx(rabi));
    CHECK(control_envelope(p, 115) == doctest::Approx(rabi / 2));
    CHECK(control_envelope(p, 130) == doctest::Approx(0).epsilon(1e-12));
    CHECK(control_envelope(p, 200) == 0.0);
    CHECK(control_envelope(p, 315) == doctest::Approx(rabi / 2));
    CHECK(control_envelope(p, 400) == doctest::Approx(rabi));
    const auto c = StorageProtocol::constant(rabi);
    CHECK_FALSE(c.switches());
    CHECK(control_envelope(c, 1e6) == rabi);
    CHECK_THROWS_AS(StorageProtocol::store(rabi, 100, 10, 30).validate(), std::invalid_argument);
}

TEST_CASE("transfer oracle limits") {
    const EnsembleConfig e0 = ensemble(0.0);
    const double gamma = e0.gamma_e;
    // Perfect transparency on resonance.
    CHECK(std::abs(transmission_transfer(0.0, 220, e0, 6 * gamma)) == doctest::Approx(1.0).epsilon(1e-14));
    // Two-level Beer-Lambert absorption.
    for (double od : {0.5, 2.0, 10.0}) {
        CHECK(std::abs(transmission_transfer(0.0, od, e0, 0.0)) == doctest::Approx(std::exp(-od / 2)).epsilon(1e-12));
    }
    // Passive medium: |T| <= 1 everywhere.
    const EnsembleConfig e = ensemble(1e-3);
    for (double d = -20; d <= 20; d += 0.01) {
        CHECK(std::abs(transmission_transfer(d * gamma, 50, e, 4 * gamma)) <= 1.0 + 1e-14);
    }
    // Phase-slope delay against the analytic derivative.
    for (double g : {0.0, 1e-3, 1e-2}) {
        for (double w : {2.0, 6.0, 10.0}) {
            const double od = 220;
            CHECK(transfer_group_delay_ns(od, ensemble(g), w * gamma) ==
                  doctest::Approx(delay_oracle_ns(od, g, w, gamma)).epsilon(1e-6));
        }
    }
}

TEST_CASE("od = 0: nothing stored and the pulse exits unchanged") {
    const EnsembleConfig e = ensemble(1e-3);
    const Waveform probe = truncated_gaussian(100, 0.7, 200);
    const auto proto = StorageProtocol::store(6 * e.gamma_e, 180, 200);
    const MemoryResult r = simulate_storage(probe, proto, 0.0, e, {200, 0.5, 0});
    CHECK(r.se == 0.0);
    CHECK(r.retrieved_energy == 0.0);
    CHECK(r.output_waveform.t0_ns == doctest::Approx(probe.t0_ns + 2.0 * kLightNsPerMm).epsilon(1e-12));
    for (std::size_t i = 0; i < probe.size(); ++i) CHECK(r.output_waveform.samples[i] == probe.samples[i]);
    CHECK(r.transmitted_energy == doctest::Approx(r.input_energy).epsilon(1e-12));
}

TEST_CASE("lossless EIT: constant control, od = 1000, gamma_12 = 0 transmits >= 99%") {
    const EnsembleConfig e = ensemble(0.0);
    const Waveform probe = full_gaussian(300, 0.2);
    const auto proto = StorageProtocol::constant(10 * e.gamma_e, 1000);
    const MemoryResult r = simulate_storage(probe, proto, 1000, e, {400, 0.2, 0});
    CHECK(r.transmitted_energy / r.input_energy >= 0.99);
    CHECK(r.se == 0.0);
}

TEST_CASE("time-domain solver matches the transfer oracle (od = 10)") {
    const EnsembleConfig e = ensemble(1e-3);
    const double wc = 6 * e.gamma_e;
    const Waveform probe = full_gaussian(300, 0.5);
    const MemoryResult r = simulate_storage(probe, StorageProtocol::constant(wc, 1000), 10, e, {400, 0.5, 0});
    Waveform out = r.output_waveform;
    out.t0_ns = probe.t0_ns;  // compare in the retarded frame
    const Waveform oracle = apply_transfer(probe, 10, e, wc, out.end_time() - out.t0_ns);
    CHECK(rel_l2(out, oracle) < 0.02);
    const double measured = out.peak_time() - probe.peak_time();
    CHECK(measured == doctest::Approx(transfer_group_delay_ns(10, e, wc)).epsilon(0.05));
}

TEST_CASE("energy bookkeeping") {
    StorageScenario s = StorageScenario::calibrated();
    s.grid = {800, 0.25, 0};
    const MemoryResult r = run_scenario(s);
    CHECK(std::abs(r.balance_error()) < 1e-3);
    CHECK(r.decay_loss >= 0.0);
    CHECK(r.residual_excitation >= 0.0);
    CHECK(r.transmitted_energy + r.retrieved_energy <= r.input_energy * (1 + 1e-6));
    CHECK(r.se == doctest::Approx(r.retrieved_energy / r.input_energy));
    CHECK(r.se > 0.0);
    CHECK(r.se < 1.0);
}

TEST_CASE("grid refinement changes se by < 0.5% at default settings") {
    StorageScenario s = StorageScenario::calibrated();
    const double base = run_scenario(s).se;
    s.grid.nz *= 2;
    s.grid.dt_ns /= 2;
    const double fine = run_scenario(s).se;
    CHECK(std::abs(fine - base) / fine < 5e-3);
}

TEST_CASE("calibrated l = 1 scenario stores 0.65 +- 0.05") {
    const double se = run_scenario(StorageScenario::calibrated()).se;
    CHECK(se == doctest::Approx(0.65).epsilon(0.05 / 0.65));
}

TEST_CASE("se is monotone in od and in gamma_12") {
    StorageScenario s = StorageScenario::calibrated();
    s.grid = {200, 0.5, 0};
    double prev = -1;
    for (double od : {1.0, 5.0, 20.0, 50.0, 100.0, 200.0, 400.0}) {
        s.od_override = od;
        const double se = run_scenario(s).se;
        CHECK(se >= prev);
        prev = se;
    }
    s.od_override.reset();
    prev = 2;
    for (double g : {0.0, 1e-4, 1e-3, 3e-3, 1e-2, 3e-2}) {
        s.ensemble.gamma_12 = g * s.ensemble.gamma_e;
        const double se = run_scenario(s).se;
        CHECK(se <= prev);
        prev = se;
    }
}

TEST_CASE("truncated Gaussian stores better than a full Gaussian of the same FWHM") {
    const StorageScenario s = StorageScenario::calibrated();
    StorageScenario full = s;
    full.probe.full_gaussian = true;
    // Best switch-off time for the full Gaussian, scanned over its window.
    double best_full = 0;
    for (double off = -400; off <= 100; off += 10) {
        full.switch_off_offset_ns = off;
        best_full = std::max(best_full, run_scenario(full).se);
    }
    CHECK(run_scenario(s).se > best_full);
}

TEST_CASE("snapshots and solver errors") {
    const EnsembleConfig e = ensemble(1e-3);
    const Waveform probe = truncated_gaussian(100, 0.7, 200);
    const auto proto = StorageProtocol::store(6 * e.gamma_e, 180, 200);
    const MemoryResult r = simulate_storage(probe, proto, 50, e, {200, 0.5, 100});
    REQUIRE_FALSE(r.snapshot.empty());
    CHECK(r.snapshot.size() % 201 == 0);
    CHECK(r.snapshot.front().t_ns == doctest::Approx(0.0));

    try {
        simulate_storage(probe, proto, 220, e, {200, 20.0, 0});
        FAIL("expected numeric_error");
    } catch (const numeric_error& err) {
        CHECK(std::string(err.what()).find("dt=20") != std::string::npos);
    }
    CHECK_THROWS_AS(simulate_storage(probe, proto, 50, e, {1, 0.5, 0}), std::invalid_argument);
    CHECK_THROWS_AS(simulate_storage(probe, proto, -1, e, {200, 0.5, 0}), std::invalid_argument);
    CHECK_THROWS_AS(simulate_storage(Waveform{0, 0.5, {}}, proto, 50, e, {200, 0.5, 0}), std::invalid_argument);
}

TEST_CASE("store_qubit") {
    const QubitKet h = basis_state(Basis::H);
    SUBCASE("asymmetric efficiencies: closed form 0.9916") {
        const QubitStorage st = store_qubit(h, {0.65, 0.45, 0.0});
        const double a = std::sqrt(0.65), b = std::sqrt(0.45);
        const double oracle = (a + b) * (a + b) / (2 * (0.65 + 0.45));
        CHECK(std::norm(inner(h, st.output)) == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(oracle == doctest::Approx(0.9916).epsilon(1e-4));
        CHECK(st.overall_efficiency == doctest::Approx(0.55));
    }
    SUBCASE("equal efficiencies leave the state unchanged") {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> n;
        for (int i = 0; i < 50; ++i) {
            const QubitKet k = QubitKet::from_amplitudes({n(rng), n(rng)}, {n(rng), n(rng)});
            const QubitStorage st = store_qubit(k, {0.6, 0.6, 0.0});
            CHECK(same_state(st.output, k, 1e-12));
            CHECK(st.overall_efficiency == doctest::Approx(0.6));
        }
    }
    SUBCASE("basis state |R>") {
        const QubitStorage st = store_qubit(basis_state(Basis::R), {0.7, 0.3, 0.4});
        CHECK(same_state(st.output, basis_state(Basis::R)));
        CHECK(st.overall_efficiency == doctest::Approx(0.3));
    }
    SUBCASE("relative phase") {
        const QubitStorage st = store_qubit(h, {0.5, 0.5, kPi / 2});
        CHECK(same_state(st.output, basis_state(Basis::D), 1e-12));
    }
    SUBCASE("nothing retrieved") {
        CHECK_THROWS_AS(store_qubit(h, {0.0, 0.0, 0.0}), std::invalid_argument);
        CHECK_THROWS_AS(store_qubit(basis_state(Basis::G), {0.0, 0.5, 0.0}), std::invalid_argument);
        CHECK_THROWS_AS(store_qubit(h, {1.5, 0.5, 0.0}), std::invalid_argument);
    }
}
