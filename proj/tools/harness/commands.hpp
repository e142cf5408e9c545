#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "harness/config.hpp"

namespace oamem::harness {

struct RunOptions {
    std::filesystem::path out_dir = "out";
    unsigned threads = 1;
};

/// Storage run for the configured mode: result.json, waveforms.csv,
/// retrieved.csv, histogram.csv (+ snapshot.csv when grid.snapshot_stride > 0).
json cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts);

/// SE against OAM order l = 0..scan.l_max: scan_oam.csv (l,od_eff,se) and scan_oam.json.
json cmd_scan_oam(const ExperimentConfig& cfg, const RunOptions& opts);

/// MUB tomography of the configured qubit, optionally after storage:
/// tomography.json, counts.csv and, if tomography.nbar_scan is set, tomography_scan.csv.
json cmd_tomography(const ExperimentConfig& cfg, const RunOptions& opts);

/// threshold.csv with (nbar, f_coh) for threshold.nbar, plus threshold.json.
json cmd_threshold(const ExperimentConfig& cfg, const RunOptions& opts);

/// Pulse-shape optimization: trace.csv and best.json.
json cmd_optimize(const ExperimentConfig& cfg, const RunOptions& opts);

/// Fits the free model parameters to the SE anchors: calibrated.json (a
/// loadable config), calibration.json and calibration.csv.
json cmd_calibrate(const ExperimentConfig& cfg, const RunOptions& opts);

/// Per-mode efficiencies used for qubit storage (solver or fixed, per config).
ModeEfficiencies mode_efficiencies(const ExperimentConfig& cfg);

/// Fixed-column CSV writer helpers used by the commands.
std::string csv_row(const std::vector<std::string>& cells);

}  // namespace oamem::harness
