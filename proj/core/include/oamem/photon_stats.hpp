#pragma once

// Weak-coherent-state photon statistics, aggregated photon counting and the
// intercept-resend fidelity bound for Poissonian sources.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "oamem/quantum.hpp"

namespace oamem {

struct CoherentSource {
    double nbar = 0.5;       ///< mean photon number per pulse
    double rep_rate = 2.5e5; ///< pulses per second

    void validate() const;
};

/// Whole detection chain (filters, fibre coupling, SPCM) as one efficiency
/// plus a background count rate.
struct DetectorModel {
    double efficiency = 0.3;
    double background_rate = 300.0;  ///< counts/s
    double gate_width_ns = 10.0;     ///< histogram bin width

    void validate() const;
};

struct CountRecord {
    Basis basis = Basis::H;
    std::int64_t counts = 0;
    double collection_time_s = 1.0;

    void validate() const;
};

/// nbar^n e^{-nbar} / n!, evaluated in log space.
double poisson_pmf(double nbar, int n);

/// F_coh(nbar) = sum_{N>=1} (N+1)/(N+2) p(nbar,N) / (1 - p(nbar,0)).
/// The series stops once the remaining Poisson tail is below 1e-12.
double coherent_fidelity_threshold(double nbar);

/// Expected counts time * (rep_rate * nbar * efficiency * prob + background_rate).
double expected_counts(double prob, const CoherentSource& source, const DetectorModel& det, double time_s);

/// One Poisson draw around expected_counts. Throws numeric_error when the
/// mean is not representable as a 64-bit count.
std::int64_t simulate_counts(double prob, const CoherentSource& source, const DetectorModel& det,
                             double time_s, std::uint64_t seed);

/// Poisson draw with the given mean (helper shared with bootstrap resampling).
std::int64_t poisson_draw(double mean, std::uint64_t seed);

struct EfficiencyEstimate {
    double eta;
    double sigma;
};

/// eta = n_out / n_in with sigma = sqrt(eta (1 + eta) / n_in), which is
/// first-order propagation of independent Poisson errors on both counts.
EfficiencyEstimate estimate_se(std::int64_t n_in, std::int64_t n_out);

/// CSV exchange format: header `basis,counts,collection_time_s`.
void write_counts_csv(std::ostream& os, const std::vector<CountRecord>& records);
/// Throws io_error with the offending line number on malformed input.
std::vector<CountRecord> read_counts_csv(std::istream& is);

}  // namespace oamem
