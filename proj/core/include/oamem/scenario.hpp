#pragma once

// A complete single-mode storage run described by a handful of physical
// knobs, plus the named-parameter access used by scans and optimizers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oamem/eit.hpp"
#include "oamem/modes.hpp"

namespace oamem {

struct ProbeShape {
    double fwhm_ns = 100.0;
    double truncation_fraction = 0.7;
    double duration_ns = 200.0;
    bool full_gaussian = false;  ///< ignore truncation; symmetric +-3 FWHM pulse
};

struct StorageScenario {
    EnsembleConfig ensemble = EnsembleConfig::rb87_d1();
    LGMode mode{1, 100.0};
    ProbeShape probe;
    double control_rabi = 6.0 * EnsembleConfig::rb87_d1().gamma_e;  ///< rad/s
    double switch_off_offset_ns = -20.0;  ///< ramp-down start relative to the probe end
    double storage_ns = 200.0;
    double ramp_ns = 30.0;
    double retrieval_window_ns = 1000.0;
    SolverGrid grid;
    std::optional<double> od_override;  ///< bypass the mode/ensemble overlap

    double od() const;
    Waveform probe_waveform() const;
    StorageProtocol protocol() const;

    /// Same physics on a grid with half the resolution in z and t.
    StorageScenario coarse() const;

    /// Rounded output of `calibrate` against SE(l=1) = 0.65, SE(l=5) = 0.26.
    static StorageScenario calibrated();
};

MemoryResult run_scenario(const StorageScenario& s);

/// Names accepted by set_parameter / get_parameter:
///   l, od, peak_od, sigma_t, w0, gamma_12, gamma_12_rel, control_rabi,
///   control_rel, fwhm, truncation_fraction, switch_off_offset, storage, ramp
const std::vector<std::string>& scenario_parameter_names();

/// Throws std::invalid_argument for an unknown name.
void set_parameter(StorageScenario& s, std::string_view name, double value);
double get_parameter(const StorageScenario& s, std::string_view name);

}  // namespace oamem
