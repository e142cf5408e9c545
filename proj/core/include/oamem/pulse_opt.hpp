#pragma once

// Bounded downhill-simplex maximization and the storage-specific drivers
// built on it: parameter scans, pulse-shape optimization and calibration.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "oamem/scenario.hpp"

namespace oamem {

struct ParameterBound {
    std::string name;
    double lower;
    double upper;
};

struct OptimizationSpec {
    std::vector<ParameterBound> parameters;
    std::vector<double> initial;  ///< empty: centre of the box
    int budget = 200;             ///< maximum number of objective evaluations
    double tolerance = 1e-3;      ///< simplex diameter, in box-normalized units
    double initial_step = 0.25;   ///< initial simplex edge, in box-normalized units

    void validate() const;
};

struct TraceEntry {
    int eval_index;
    std::vector<double> params;
    double objective;      ///< -inf when the evaluation failed
    double best_so_far;
    std::string error;     ///< empty unless the objective threw
};

struct OptimizationResult {
    std::vector<double> best_params;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<TraceEntry> trace;
    int iterations = 0;
    bool converged = false;  ///< stopped on tolerance rather than budget
};

using Objective = std::function<double(std::span<const double>)>;

/// Maximizes `objective` inside the box. Trial points are clipped to the
/// bounds, evaluations are memoized on the exact parameter tuple and a
/// throwing objective scores -inf (recorded in the trace). The seed only
/// picks the initial simplex orientation, so runs replay exactly.
/// Independent initial vertices are evaluated on up to `threads` workers.
OptimizationResult optimize(const OptimizationSpec& spec, const Objective& objective, std::uint64_t seed,
                            unsigned threads = 1);

struct ScanRow {
    double value;
    double od;
    double se;          ///< NaN when the run failed
    std::string error;
};

/// One storage run per value of the named scenario parameter; rows keep the
/// input order and failures are recorded instead of aborting the scan.
std::vector<ScanRow> scan(const StorageScenario& base, const std::string& param,
                          const std::vector<double>& values, unsigned threads = 1);

struct PulseOptimization {
    OptimizationResult search;  ///< on the search grid
    StorageScenario best;       ///< base scenario with the best parameters applied
    double best_se_full = 0.0;  ///< best point re-evaluated on the full grid
};

/// Maximizes storage efficiency over the spec's scenario parameters.
/// With `coarse_search` the search runs at half resolution.
PulseOptimization optimize_pulse(const StorageScenario& base, const OptimizationSpec& spec, std::uint64_t seed,
                                 bool coarse_search = true, unsigned threads = 1);

struct GaussianBaseline {
    StorageScenario scenario;  ///< full Gaussian, same FWHM, best switch-off offset
    double se = 0.0;
};

/// Reference for pulse shaping: a symmetric Gaussian with the scenario's FWHM
/// whose control switch-off time is optimized anywhere from one FWHM before
/// its peak to 100 ns after its +-3 FWHM window, so the comparison isolates
/// the pulse shape from timing.
GaussianBaseline full_gaussian_baseline(const StorageScenario& base, std::uint64_t seed, unsigned threads = 1);

struct CalibrationTargets {
    int low_l = 1;
    double low_se = 0.65;
    int high_l = 5;
    double high_se = 0.26;
};

struct CalibrationResult {
    StorageScenario scenario;           ///< calibrated copy of the base scenario
    std::vector<double> se_by_l;        ///< full grid, l = 0..high_l
    std::vector<double> od_by_l;
    OptimizationResult search;
    double residual = 0.0;              ///< sqrt of the summed squared target misses
};

/// Fits control_rel, sigma_t, gamma_12_rel and truncation_fraction so the
/// storage efficiencies at the two target modes match while staying strictly
/// decreasing in l over 0..high_l. A coarse grid over
/// (control, sigma_t) seeds a simplex refinement on the full grid.
CalibrationResult calibrate(const StorageScenario& base, const CalibrationTargets& targets, std::uint64_t seed,
                            unsigned threads = 1, int budget = 160);

}  // namespace oamem
