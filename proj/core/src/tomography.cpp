#include "oamem/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "oamem/errors.hpp"
#include "oamem/parallel.hpp"
#include "oamem/rng.hpp"

namespace oamem {

namespace {

std::size_t basis_index(Basis b) {
    for (std::size_t i = 0; i < kAllBases.size(); ++i) {
        if (kAllBases[i] == b) return i;
    }
    throw std::invalid_argument("unknown basis");
}

double stokes_ratio(double a, double b, const char* pair) {
    if (!(a + b > 0.0)) {
        throw degenerate_data_error(std::string("tomography: basis pair ") + pair + " has no counts");
    }
    return (a - b) / (a + b);
}

}  // namespace

TomographyRecord TomographyRecord::from_records(const std::vector<CountRecord>& records) {
    std::array<bool, 6> seen{};
    TomographyRecord out;
    for (const auto& r : records) {
        r.validate();
        const std::size_t i = basis_index(r.basis);
        if (seen[i]) {
            throw std::invalid_argument("tomography record: basis " + std::string(basis_label(r.basis)) +
                                        " appears more than once");
        }
        seen[i] = true;
        out.records_[i] = r;
    }
    for (std::size_t i = 0; i < 6; ++i) {
        if (!seen[i]) {
            throw std::invalid_argument("tomography record: basis " + std::string(basis_label(kAllBases[i])) +
                                        " is missing");
        }
    }
    for (const auto& r : out.records_) {
        if (r.collection_time_s != out.records_[0].collection_time_s) {
            throw std::invalid_argument("tomography record: collection times differ between bases");
        }
    }
    return out;
}

const CountRecord& TomographyRecord::at(Basis b) const { return records_[basis_index(b)]; }

std::vector<CountRecord> TomographyRecord::records() const {
    return {records_.begin(), records_.end()};
}

double projection_probability(const DensityMatrix2& rho, const QubitKet& basis_state) {
    const Eigen::Vector2cd v(basis_state.amp_g(), basis_state.amp_r());
    const double p = (v.adjoint() * rho.matrix() * v)(0, 0).real();
    return std::clamp(p, 0.0, 1.0);
}

TomographyRecord simulate_tomography(const DensityMatrix2& state, const CoherentSource& source,
                                     const DetectorModel& det, double time_s, std::uint64_t seed,
                                     double throughput) {
    if (!(throughput >= 0.0) || throughput > 1.0) {
        throw std::invalid_argument("simulate_tomography: throughput must be in [0, 1]");
    }
    std::vector<CountRecord> recs;
    for (std::size_t i = 0; i < kAllBases.size(); ++i) {
        const Basis b = kAllBases[i];
        const double p = throughput * projection_probability(state, basis_state(b));
        recs.push_back({b, simulate_counts(p, source, det, time_s, split_seed(seed, i)), time_s});
    }
    return TomographyRecord::from_records(recs);
}

ReconstructionResult reconstruct(const TomographyRecord& record, const ReconstructionOptions& opts) {
    const double floor_counts =
        opts.background_correction ? opts.background_rate * record.collection_time_s() : 0.0;
    auto p = [&](Basis b) { return std::max(0.0, static_cast<double>(record.counts(b)) - floor_counts); };

    ReconstructionResult out;
    out.stokes.s1 = stokes_ratio(p(Basis::H), p(Basis::V), "H/V");
    out.stokes.s2 = stokes_ratio(p(Basis::D), p(Basis::A), "D/A");
    out.stokes.s3 = stokes_ratio(p(Basis::G), p(Basis::R), "G/R");
    out.rho = project_physical(density_from_stokes(out.stokes));
    return out;
}

FidelityEstimate fidelity_with_error(const TomographyRecord& record, const DensityMatrix2& rho_in,
                                     int resamples, std::uint64_t seed, const ReconstructionOptions& opts,
                                     unsigned threads) {
    if (resamples < 100) throw std::invalid_argument("fidelity_with_error: at least 100 resamples required");
    const double point = fidelity(reconstruct(record, opts).rho, rho_in);

    std::vector<double> values(static_cast<std::size_t>(resamples));
    std::vector<char> ok(values.size(), 0);
    parallel_for(values.size(), threads, [&](std::size_t r) {
        const std::uint64_t rs = split_seed(seed, r);
        const TomographyRecord redrawn = record.transformed([&](Basis b, std::int64_t c) {
            return poisson_draw(static_cast<double>(c), split_seed(rs, basis_index(b)));
        });
        try {
            values[r] = fidelity(reconstruct(redrawn, opts).rho, rho_in);
            ok[r] = 1;
        } catch (const degenerate_data_error&) {
        }
    });

    // Two-pass mean/variance in index order with Neumaier summation.
    auto compensated_sum = [&](auto term) {
        double sum = 0.0, comp = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!ok[i]) continue;
            const double x = term(values[i]);
            const double t = sum + x;
            comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
            sum = t;
        }
        return sum + comp;
    };
    const auto n_ok = static_cast<double>(std::count(ok.begin(), ok.end(), 1));
    if (n_ok < 2) throw degenerate_data_error("fidelity_with_error: fewer than two usable resamples");
    const double mean = compensated_sum([](double x) { return x; }) / n_ok;
    const double var = compensated_sum([&](double x) { return (x - mean) * (x - mean); }) / (n_ok - 1.0);
    return {point, std::sqrt(var), resamples - static_cast<int>(n_ok)};
}

std::string reconstruction_to_json(const ReconstructionResult& r) {
    nlohmann::ordered_json j;
    j["stokes"] = {r.stokes.s1, r.stokes.s2, r.stokes.s3};
    const auto& m = r.rho.matrix();
    j["rho_re"] = {{m(0, 0).real(), m(0, 1).real()}, {m(1, 0).real(), m(1, 1).real()}};
    j["rho_im"] = {{m(0, 0).imag(), m(0, 1).imag()}, {m(1, 0).imag(), m(1, 1).imag()}};
    j["fidelity"] = r.fidelity_vs_input;
    j["fidelity_sigma"] = r.fidelity_sigma;
    return j.dump(2);
}

}  // namespace oamem
