#pragma once

// Experiment configuration: one JSON document with layered defaults
// (built-in -> file -> --override key=value). Unknown keys and type
// mismatches are rejected with a JSON-pointer location.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oamem/eit.hpp"
#include "oamem/photon_stats.hpp"
#include "oamem/pulse_opt.hpp"
#include "oamem/quantum.hpp"
#include "oamem/scenario.hpp"

namespace oamem::harness {

using json = nlohmann::ordered_json;

struct MemoryModel {
    bool simulate = true;  ///< derive eta_g / eta_r from the solver (l = 0 and l = 1)
    double eta_g = 0.65;
    double eta_r = 0.65;
    double dphi = 0.0;
};

struct TomographySettings {
    double collection_time_s = 1200.0;
    int resamples = 1000;
    bool background_correction = false;
    bool stored = true;
    std::vector<double> nbar_scan;
};

struct OptimizeSettings {
    OptimizationSpec spec;
    bool coarse_search = true;
    bool compare_full_gaussian = true;
};

struct ExperimentConfig {
    StorageScenario scenario;
    CoherentSource source;
    DetectorModel detector;
    QubitKet qubit = basis_state(Basis::H);
    std::string qubit_label = "H";
    MemoryModel memory;
    TomographySettings tomography;
    double histogram_collection_time_s = 3600.0;
    int scan_l_max = 5;
    std::vector<double> threshold_nbar;
    OptimizeSettings optimize;
    CalibrationTargets calibration;
    int calibration_budget = 160;
    std::uint64_t seed = 0;

    json document;  ///< the resolved JSON this config was built from
};

/// Built-in defaults as a JSON document.
const json& default_document();

/// Applies `layer` on top of `base`, rejecting keys absent from `base`.
void merge_layer(json& base, const json& layer, const std::string& location = "");

/// Applies "a.b.c=value"; the value is parsed as JSON and otherwise taken as a string.
void apply_override(json& doc, const std::string& assignment);

/// Reads a config file. A result document written by this tool (one that has
/// a "resolved_config" member) yields its embedded configuration.
json read_config_file(const std::filesystem::path& path);

/// Builds and validates the typed config. Throws config_error.
ExperimentConfig parse_config(const json& doc);

/// defaults <- file (optional) <- overrides <- seed (optional).
ExperimentConfig load_config(const std::filesystem::path* file, const std::vector<std::string>& overrides,
                             const std::uint64_t* seed);

/// Writes `scenario`'s physical knobs back into a copy of `doc`.
json with_scenario(json doc, const StorageScenario& scenario);

}  // namespace oamem::harness
