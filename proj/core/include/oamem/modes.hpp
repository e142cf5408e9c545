#pragma once

// Laguerre-Gaussian (p = 0) mode geometry and its overlap with a Gaussian
// transverse column-density profile of the atomic cloud.

namespace oamem {

/// Pure vortex mode LG_{p=0}^{l}. `w0_um` is the waist of the fundamental
/// Gaussian the mode is built from; the mode itself is wider by sqrt(l+1).
struct LGMode {
    int l = 0;
    double w0_um = 100.0;
};

struct EnsembleConfig {
    double peak_od = 220.0;      ///< resonant optical depth (intensity) on axis
    double sigma_t_um = 100.0;   ///< 1/e^2 radius parameter of the column density
    double length_mm = 2.0;
    double gamma_e = 0.0;        ///< excited-state decay rate, rad/s
    double gamma_12 = 0.0;       ///< ground-state decoherence rate, rad/s

    /// Rb D1 line defaults: Gamma = 2 pi 5.75 MHz, gamma_12 = 1e-3 Gamma.
    static EnsembleConfig rb87_d1();

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// sqrt(l + 1) * w0. Throws std::invalid_argument for l < 0 or w0 <= 0.
double mode_waist(int l, double w0_um);

/// Normalized radial intensity density (1/um^2) of the mode,
/// proportional to r^{2l} exp(-2 r^2 / w0^2) with  int I(r) 2 pi r dr = 1.
double lg_intensity(const LGMode& mode, double r_um);

/// Column-density weight exp(-r^2 / (2 sigma_t^2)) of the cloud, 1 on axis.
double column_profile(const EnsembleConfig& ens, double r_um);

/// Intensity-weighted transverse average of the cloud's OD profile,
///   peak_od * int I_mode(r) exp(-r^2/(2 sigma_t^2)) 2 pi r dr,
/// by adaptive Gauss-Kronrod quadrature (relative tolerance 1e-8) on
/// [0, 8 max(mode_waist, sigma_t)]. Throws numeric_error if the quadrature
/// error estimate stays above tolerance.
double effective_od(const LGMode& mode, const EnsembleConfig& ens);

}  // namespace oamem
