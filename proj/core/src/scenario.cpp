#include "oamem/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oamem {

double StorageScenario::od() const {
    if (od_override) return *od_override;
    return effective_od(mode, ensemble);
}

Waveform StorageScenario::probe_waveform() const {
    if (probe.full_gaussian) return full_gaussian(probe.fwhm_ns, grid.dt_ns);
    return truncated_gaussian(probe.fwhm_ns, probe.truncation_fraction, probe.duration_ns, grid.dt_ns);
}

StorageProtocol StorageScenario::protocol() const {
    const Waveform p = probe_waveform();
    return StorageProtocol::store(control_rabi, p.end_time() + switch_off_offset_ns, storage_ns, ramp_ns,
                                  retrieval_window_ns);
}

StorageScenario StorageScenario::coarse() const {
    StorageScenario c = *this;
    c.grid.nz = std::max(2, grid.nz / 2);
    c.grid.dt_ns = grid.dt_ns * 2.0;
    c.grid.snapshot_stride = 0;
    return c;
}

StorageScenario StorageScenario::calibrated() {
    StorageScenario s;
    s.ensemble.sigma_t_um = 99.0;
    s.ensemble.gamma_12 = 1.5e-3 * s.ensemble.gamma_e;
    s.control_rabi = 7.25 * s.ensemble.gamma_e;
    s.probe.truncation_fraction = 0.71;
    return s;
}

MemoryResult run_scenario(const StorageScenario& s) {
    return simulate_storage(s.probe_waveform(), s.protocol(), s.od(), s.ensemble, s.grid);
}

const std::vector<std::string>& scenario_parameter_names() {
    static const std::vector<std::string> names{
        "l", "od", "peak_od", "sigma_t", "w0", "gamma_12", "gamma_12_rel", "control_rabi",
        "control_rel", "fwhm", "truncation_fraction", "switch_off_offset", "storage", "ramp"};
    return names;
}

void set_parameter(StorageScenario& s, std::string_view name, double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("parameter '" + std::string(name) + "' is not finite");
    if (name == "l") {
        if (value < 0.0 || value != std::floor(value)) throw std::invalid_argument("l must be a non-negative integer");
        s.mode.l = static_cast<int>(value);
        s.od_override.reset();
    } else if (name == "od") {
        s.od_override = value;
    } else if (name == "peak_od") {
        s.ensemble.peak_od = value;
    } else if (name == "sigma_t") {
        s.ensemble.sigma_t_um = value;
    } else if (name == "w0") {
        s.mode.w0_um = value;
    } else if (name == "gamma_12") {
        s.ensemble.gamma_12 = value;
    } else if (name == "gamma_12_rel") {
        s.ensemble.gamma_12 = value * s.ensemble.gamma_e;
    } else if (name == "control_rabi") {
        s.control_rabi = value;
    } else if (name == "control_rel") {
        s.control_rabi = value * s.ensemble.gamma_e;
    } else if (name == "fwhm") {
        s.probe.fwhm_ns = value;
    } else if (name == "truncation_fraction") {
        s.probe.truncation_fraction = value;
    } else if (name == "switch_off_offset") {
        s.switch_off_offset_ns = value;
    } else if (name == "storage") {
        s.storage_ns = value;
    } else if (name == "ramp") {
        s.ramp_ns = value;
    } else {
        throw std::invalid_argument("unknown scenario parameter '" + std::string(name) + "'");
    }
}

double get_parameter(const StorageScenario& s, std::string_view name) {
    if (name == "l") return s.mode.l;
    if (name == "od") return s.od();
    if (name == "peak_od") return s.ensemble.peak_od;
    if (name == "sigma_t") return s.ensemble.sigma_t_um;
    if (name == "w0") return s.mode.w0_um;
    if (name == "gamma_12") return s.ensemble.gamma_12;
    if (name == "gamma_12_rel") return s.ensemble.gamma_12 / s.ensemble.gamma_e;
    if (name == "control_rabi") return s.control_rabi;
    if (name == "control_rel") return s.control_rabi / s.ensemble.gamma_e;
    if (name == "fwhm") return s.probe.fwhm_ns;
    if (name == "truncation_fraction") return s.probe.truncation_fraction;
    if (name == "switch_off_offset") return s.switch_off_offset_ns;
    if (name == "storage") return s.storage_ns;
    if (name == "ramp") return s.ramp_ns;
    throw std::invalid_argument("unknown scenario parameter '" + std::string(name) + "'");
}

}  // namespace oamem
