#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace oamem {

/// Uniformly sampled complex envelope. Times are in ns.
struct Waveform {
    double t0_ns = 0.0;
    double dt_ns = 1.0;
    std::vector<std::complex<double>> samples;

    std::size_t size() const noexcept { return samples.size(); }
    double time(std::size_t i) const noexcept { return t0_ns + dt_ns * static_cast<double>(i); }
    double end_time() const noexcept;

    /// Linear interpolation between samples, zero outside [t0, end_time].
    std::complex<double> value_at(double t_ns) const;

    /// Trapezoidal estimate of int |x(t)|^2 dt.
    double energy() const;

    /// Time of the |x|^2 maximum refined by a parabola through the three
    /// samples around the peak.
    double peak_time() const;

    /// Throws std::invalid_argument unless dt > 0 and all samples are finite.
    void validate() const;
};

/// Gaussian amplitude exp(-2 ln2 (t - t_peak)^2 / fwhm^2) (so |x|^2 has the
/// given FWHM) sampled on [0, total_duration] and cut to zero after the
/// trailing edge falls to `truncation_fraction` of the peak amplitude. The
/// peak sits so that the cut lands at the end of the window, but never
/// before the window centre: fraction 1 gives a half Gaussian and fractions
/// near 0 give a symmetric full Gaussian.
Waveform truncated_gaussian(double fwhm_ns, double truncation_fraction, double total_duration_ns,
                            double dt_ns = 0.5);

/// Symmetric Gaussian with the same FWHM on a +-3 FWHM window starting at t = 0.
Waveform full_gaussian(double fwhm_ns, double dt_ns = 0.5);

}  // namespace oamem
