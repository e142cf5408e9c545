#pragma once

// Projective measurements in the three mutually unbiased bases and the
// ratio-formula reconstruction of the qubit density matrix:
//   S1 = (P_H - P_V)/(P_H + P_V), S2 = (P_D - P_A)/(P_D + P_A),
//   S3 = (P_G - P_R)/(P_G + P_R), rho = project_physical((I + S.sigma)/2).

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "oamem/photon_stats.hpp"
#include "oamem/quantum.hpp"

namespace oamem {

/// Exactly one CountRecord per basis, all with the same collection time.
class TomographyRecord {
public:
    /// Throws std::invalid_argument on missing/duplicate bases or mixed collection times.
    static TomographyRecord from_records(const std::vector<CountRecord>& records);

    const CountRecord& at(Basis b) const;
    std::int64_t counts(Basis b) const { return at(b).counts; }
    double collection_time_s() const { return records_[0].collection_time_s; }

    /// Records in the canonical order H, V, D, A, G, R.
    std::vector<CountRecord> records() const;

    /// Same record with every count replaced by fn(basis, counts).
    template <class Fn>
    TomographyRecord transformed(Fn&& fn) const {
        TomographyRecord out = *this;
        for (auto& r : out.records_) r.counts = fn(r.basis, r.counts);
        return out;
    }

private:
    std::array<CountRecord, 6> records_{};  // indexed like kAllBases
};

/// <psi| rho |psi>.
double projection_probability(const DensityMatrix2& rho, const QubitKet& basis_state);

/// Six independent counting runs, one per MUB projector. `throughput` scales
/// the signal (e.g. the memory efficiency) before the detection chain. The
/// draw for basis kAllBases[i] uses split_seed(seed, i).
TomographyRecord simulate_tomography(const DensityMatrix2& state, const CoherentSource& source,
                                     const DetectorModel& det, double time_s, std::uint64_t seed,
                                     double throughput = 1.0);

struct ReconstructionOptions {
    /// Subtract background_rate * collection time from each count (floored at 0).
    bool background_correction = false;
    double background_rate = 0.0;
};

struct ReconstructionResult {
    StokesVector stokes;
    DensityMatrix2 rho = DensityMatrix2::maximally_mixed();
    double fidelity_vs_input = 0.0;
    double fidelity_sigma = 0.0;
};

/// Throws degenerate_data_error naming the pair when P_a + P_b == 0.
ReconstructionResult reconstruct(const TomographyRecord& record, const ReconstructionOptions& opts = {});

struct FidelityEstimate {
    double fidelity;
    double sigma;
    int failed_resamples;  ///< resamples skipped because a basis pair was empty
};

/// Point fidelity of the reconstruction against rho_in plus a parametric
/// bootstrap sigma: each resample redraws every count from a Poisson with the
/// observed count as its mean (seed split_seed(split_seed(seed, r), basis)).
FidelityEstimate fidelity_with_error(const TomographyRecord& record, const DensityMatrix2& rho_in,
                                     int resamples, std::uint64_t seed,
                                     const ReconstructionOptions& opts = {}, unsigned threads = 1);

/// JSON document with stokes[3], rho_re[2][2], rho_im[2][2], fidelity, fidelity_sigma.
std::string reconstruction_to_json(const ReconstructionResult& r);

}  // namespace oamem
