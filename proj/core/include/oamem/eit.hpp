#pragma once

// One-dimensional Maxwell-Bloch model of EIT light storage in a Lambda system
// (|1> -> |3> probe, |2> -> |3> control), weak-probe limit, retarded frame:
//
//   d s12/dt = -gamma_12 s12 + (i/2) Oc* s13
//   d s13/dt = -(Gamma/2) s13 + (i/2) Op + (i/2) Oc s12
//   d Op/dz  = i (od Gamma / 2L) s13
//
// `od` is the resonant intensity optical depth, so a two-level medium
// transmits exp(-od/2) in amplitude. Internally time is scaled by Gamma and
// z by L. Atomic ODEs use a classic RK4 step; the field is rebuilt from the
// coherence profile by trapezoidal accumulation along z at every stage.

#include <complex>
#include <limits>
#include <vector>

#include "oamem/modes.hpp"
#include "oamem/quantum.hpp"
#include "oamem/waveform.hpp"

namespace oamem {

/// Control-field timing. Switching uses raised-cosine ramps: the ramp down
/// starts at switch_off_ns and the ramp up starts at switch_on_ns.
struct StorageProtocol {
    double control_rabi = 0.0;  ///< peak Oc, rad/s
    double switch_off_ns = std::numeric_limits<double>::infinity();
    double switch_on_ns = std::numeric_limits<double>::infinity();
    double ramp_ns = 30.0;
    double retrieval_window_ns = 1000.0;  ///< simulated time after switch-on (or after the probe)

    /// Control held at `rabi` for the whole run (no storage).
    static StorageProtocol constant(double rabi, double window_ns = 1000.0);
    static StorageProtocol store(double rabi, double switch_off_ns, double storage_ns,
                                 double ramp_ns = 30.0, double window_ns = 1000.0);

    bool switches() const noexcept;
    double storage_time_ns() const noexcept { return switch_on_ns - switch_off_ns; }
    void validate() const;
};

/// Control Rabi frequency (rad/s) at time t.
double control_envelope(const StorageProtocol& proto, double t_ns);

struct SolverGrid {
    int nz = 400;
    double dt_ns = 0.5;
    int snapshot_stride = 0;  ///< record Op(z) every N steps; 0 disables
};

struct FieldSample {
    double t_ns;
    int z_index;
    std::complex<double> value;
};

/// Energies are int |Op|^2 dt in the probe's units (ns).
struct MemoryResult {
    double input_energy = 0.0;
    double transmitted_energy = 0.0;  ///< exit energy before switch-on
    double retrieved_energy = 0.0;    ///< exit energy from switch-on onwards
    double decay_loss = 0.0;          ///< spontaneous emission and ground-state dephasing
    double residual_excitation = 0.0; ///< excitation left in the medium at the end
    double se = 0.0;
    Waveform input_waveform;          ///< probe on the solver time grid
    Waveform output_waveform;         ///< exit field over the whole run (lab time)
    Waveform retrieved_waveform;      ///< exit field from switch-on onwards
    std::vector<FieldSample> snapshot;

    double dissipated_energy() const noexcept { return decay_loss + residual_excitation; }
    /// input - transmitted - retrieved - dissipated, relative to input.
    double balance_error() const noexcept;
};

/// Runs the write/store/read sequence and returns exit-face fields.
/// Throws numeric_error if the time step violates the RK4 stability bound or
/// the field becomes non-finite, std::invalid_argument on bad inputs.
MemoryResult simulate_storage(const Waveform& probe, const StorageProtocol& proto, double od,
                              const EnsembleConfig& ens, const SolverGrid& grid);

/// Frequency-domain transfer coefficient of the same linear medium with a
/// constant control field, for a probe component at detuning delta (rad/s):
///   T = exp(-(od Gamma / 4) (g - i d) / ((Gamma/2 - i d)(g - i d) + |Oc|^2 / 4)),
/// with fields varying as exp(-i delta t). Under this sign convention the
/// group delay is +d(arg T)/d(delta).
std::complex<double> transmission_transfer(double delta, double od, const EnsembleConfig& ens,
                                           double omega_c);

/// Group delay (ns) at delta = 0 from a central finite difference of arg T.
double transfer_group_delay_ns(double od, const EnsembleConfig& ens, double omega_c);

/// Applies T(delta) to the probe spectrum by FFT. The output is zero-padded
/// to cover at least `span_ns` from probe.t0.
Waveform apply_transfer(const Waveform& probe, double od, const EnsembleConfig& ens, double omega_c,
                        double span_ns);

struct ModeEfficiencies {
    double eta_g = 1.0;
    double eta_r = 1.0;
    double dphi = 0.0;  ///< extra phase picked up by the |R> component, rad
};

struct QubitStorage {
    QubitKet output;
    double overall_efficiency;
};

/// Each OAM component is stored independently: the output is proportional to
/// a sqrt(eta_g)|G> + b e^{i dphi} sqrt(eta_r)|R>, and the overall efficiency is
/// |a|^2 eta_g + |b|^2 eta_r. Throws std::invalid_argument when nothing is retrieved.
QubitStorage store_qubit(const QubitKet& input, const ModeEfficiencies& modes);

}  // namespace oamem
