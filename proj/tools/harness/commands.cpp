#include "harness/commands.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "oamem/errors.hpp"
#include "oamem/format.hpp"
#include "oamem/rng.hpp"
#include "oamem/tomography.hpp"

namespace oamem::harness {

namespace {

// Stream indices for seeds derived from the root seed.
enum SeedStream : std::uint64_t { kTomography = 1, kBootstrap = 2, kOptimize = 3, kCalibrate = 4, kBaseline = 5 };

std::string fmt(double x) { return format_double(x); }

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw io_error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

json envelope(const char* command, const ExperimentConfig& cfg) {
    json j;
    j["command"] = command;
    j["resolved_config"] = cfg.document;
    j["seeds"] = {{"root", cfg.seed},
                  {"tomography", split_seed(cfg.seed, kTomography)},
                  {"bootstrap", split_seed(cfg.seed, kBootstrap)},
                  {"optimize", split_seed(cfg.seed, kOptimize)},
                  {"calibrate", split_seed(cfg.seed, kCalibrate)},
                  {"baseline", split_seed(cfg.seed, kBaseline)}};
    return j;
}

std::string waveform_csv(const Waveform& w) {
    std::string s = "t_ns,re,im\n";
    for (std::size_t i = 0; i < w.size(); ++i) {
        s += csv_row({fmt(w.time(i)), fmt(w.samples[i].real()), fmt(w.samples[i].imag())});
    }
    return s;
}

// Expected counts per detection bin for the input and output pulses
// accumulated over the histogram collection time.
std::string histogram_csv(const ExperimentConfig& cfg, const MemoryResult& r) {
    const double bin = cfg.detector.gate_width_ns;
    const double pulses = cfg.source.rep_rate * cfg.histogram_collection_time_s;
    const double photons_per_energy =
        pulses * cfg.source.nbar * cfg.detector.efficiency / r.input_energy;
    const double background = cfg.detector.background_rate * bin * 1e-9 * pulses;

    const Waveform& in = r.input_waveform;
    const Waveform& out = r.output_waveform;
    const double t_begin = in.t0_ns;
    const double t_end = std::max(in.end_time(), out.end_time());
    const auto nbins = static_cast<std::size_t>(std::ceil((t_end - t_begin) / bin));
    std::vector<double> ein(nbins, 0.0), eout(nbins, 0.0);
    auto deposit = [&](const Waveform& w, std::vector<double>& acc) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double weight = (i == 0 || i + 1 == w.size()) ? 0.5 * w.dt_ns : w.dt_ns;
            auto k = static_cast<std::size_t>(std::floor((w.time(i) - t_begin) / bin));
            if (k >= nbins) k = nbins - 1;
            acc[k] += weight * std::norm(w.samples[i]);
        }
    };
    deposit(in, ein);
    deposit(out, eout);

    std::string s = "bin_start_ns,bin_end_ns,input_counts,output_counts\n";
    for (std::size_t k = 0; k < nbins; ++k) {
        const double t0 = t_begin + bin * static_cast<double>(k);
        s += csv_row({fmt(t0), fmt(t0 + bin), fmt(ein[k] * photons_per_energy + background),
                      fmt(eout[k] * photons_per_energy + background)});
    }
    return s;
}

json memory_json(const MemoryResult& r, double od, const StorageProtocol& proto) {
    return {{"od", od},
            {"se", r.se},
            {"input_energy", r.input_energy},
            {"transmitted_energy", r.transmitted_energy},
            {"retrieved_energy", r.retrieved_energy},
            {"decay_loss", r.decay_loss},
            {"residual_excitation", r.residual_excitation},
            {"dissipated_energy", r.dissipated_energy()},
            {"balance_error", r.balance_error()},
            {"switch_off_ns", proto.switch_off_ns},
            {"switch_on_ns", proto.switch_on_ns}};
}

json reconstruction_json(const ReconstructionResult& r) { return json::parse(reconstruction_to_json(r)); }

json ket_json(const QubitKet& k) {
    const QubitKet c = k.canonical();
    return {{"amp_g", {c.amp_g().real(), c.amp_g().imag()}}, {"amp_r", {c.amp_r().real(), c.amp_r().imag()}}};
}

}  // namespace

std::string csv_row(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
    }
    s += '\n';
    return s;
}

json cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts) {
    ensure_dir(opts.out_dir);
    const StorageScenario& s = cfg.scenario;
    const double od = s.od();
    const StorageProtocol proto = s.protocol();
    const MemoryResult r = simulate_storage(s.probe_waveform(), proto, od, s.ensemble, s.grid);

    json j = envelope("simulate", cfg);
    j["result"] = memory_json(r, od, proto);
    write_json(opts.out_dir / "result.json", j);

    std::string waves = "t_ns,input_re,input_im,output_re,output_im\n";
    for (std::size_t i = 0; i < r.output_waveform.size(); ++i) {
        waves += csv_row({fmt(r.input_waveform.time(i)), fmt(r.input_waveform.samples[i].real()),
                          fmt(r.input_waveform.samples[i].imag()), fmt(r.output_waveform.samples[i].real()),
                          fmt(r.output_waveform.samples[i].imag())});
    }
    write_file(opts.out_dir / "waveforms.csv", waves);
    write_file(opts.out_dir / "retrieved.csv", waveform_csv(r.retrieved_waveform));
    write_file(opts.out_dir / "histogram.csv", histogram_csv(cfg, r));
    if (!r.snapshot.empty()) {
        std::string snap = "t_ns,z_index,re,im\n";
        for (const auto& f : r.snapshot) {
            snap += csv_row({fmt(f.t_ns), std::to_string(f.z_index), fmt(f.value.real()), fmt(f.value.imag())});
        }
        write_file(opts.out_dir / "snapshot.csv", snap);
    }
    return j;
}

json cmd_scan_oam(const ExperimentConfig& cfg, const RunOptions& opts) {
    ensure_dir(opts.out_dir);
    std::vector<double> ls;
    for (int l = 0; l <= cfg.scan_l_max; ++l) ls.push_back(l);
    const auto rows = scan(cfg.scenario, "l", ls, opts.threads);

    std::string csv = "l,od_eff,se\n";
    json table = json::array();
    for (const auto& row : rows) {
        if (!row.error.empty()) throw numeric_error("scan-oam: l=" + fmt(row.value) + ": " + row.error);
        csv += csv_row({std::to_string(static_cast<int>(row.value)), fmt(row.od), fmt(row.se)});
        table.push_back({{"l", static_cast<int>(row.value)}, {"od_eff", row.od}, {"se", row.se}});
    }
    write_file(opts.out_dir / "scan_oam.csv", csv);
    json j = envelope("scan-oam", cfg);
    j["rows"] = table;
    write_json(opts.out_dir / "scan_oam.json", j);
    return j;
}

ModeEfficiencies mode_efficiencies(const ExperimentConfig& cfg) {
    ModeEfficiencies m{cfg.memory.eta_g, cfg.memory.eta_r, cfg.memory.dphi};
    if (cfg.memory.simulate) {
        const auto rows = scan(cfg.scenario, "l", {0.0, 1.0}, 1);
        for (const auto& row : rows) {
            if (!row.error.empty()) throw numeric_error("memory efficiency run failed: " + row.error);
        }
        m.eta_g = rows[0].se;
        m.eta_r = rows[1].se;
    }
    return m;
}

json cmd_tomography(const ExperimentConfig& cfg, const RunOptions& opts) {
    ensure_dir(opts.out_dir);
    const DensityMatrix2 rho_in = DensityMatrix2::from_ket(cfg.qubit);
    QubitKet out_ket = cfg.qubit;
    double throughput = 1.0;
    json memory = json::object();
    if (cfg.tomography.stored) {
        const ModeEfficiencies m = mode_efficiencies(cfg);
        const QubitStorage st = store_qubit(cfg.qubit, m);
        out_ket = st.output;
        throughput = st.overall_efficiency;
        memory = {{"eta_g", m.eta_g}, {"eta_r", m.eta_r}, {"dphi", m.dphi},
                  {"overall_efficiency", st.overall_efficiency}, {"output_ket", ket_json(st.output)}};
    }
    const DensityMatrix2 rho_out = DensityMatrix2::from_ket(out_ket);
    ReconstructionOptions ropts{cfg.tomography.background_correction, cfg.detector.background_rate};

    auto run = [&](const CoherentSource& src, std::uint64_t stream) {
        const TomographyRecord rec = simulate_tomography(rho_out, src, cfg.detector, cfg.tomography.collection_time_s,
                                                         split_seed(split_seed(cfg.seed, kTomography), stream), throughput);
        ReconstructionResult res = reconstruct(rec, ropts);
        const FidelityEstimate f = fidelity_with_error(rec, rho_in, cfg.tomography.resamples,
                                                       split_seed(split_seed(cfg.seed, kBootstrap), stream), ropts,
                                                       opts.threads);
        res.fidelity_vs_input = f.fidelity;
        res.fidelity_sigma = f.sigma;
        return std::pair{rec, res};
    };

    const auto [record, result] = run(cfg.source, 0);
    std::ostringstream counts;
    write_counts_csv(counts, record.records());
    write_file(opts.out_dir / "counts.csv", counts.str());

    json j = envelope("tomography", cfg);
    j["input_state"] = cfg.qubit_label;
    j["input_ket"] = ket_json(cfg.qubit);
    j["stored"] = cfg.tomography.stored;
    j["memory"] = memory;
    j["nbar"] = cfg.source.nbar;
    j["threshold"] = coherent_fidelity_threshold(cfg.source.nbar);
    j["reconstruction"] = reconstruction_json(result);

    if (!cfg.tomography.nbar_scan.empty()) {
        std::string csv = "nbar,fidelity,fidelity_sigma,threshold\n";
        json rows = json::array();
        for (std::size_t i = 0; i < cfg.tomography.nbar_scan.size(); ++i) {
            CoherentSource src = cfg.source;
            src.nbar = cfg.tomography.nbar_scan[i];
            const auto [rec_i, res_i] = run(src, i + 1);
            const double thr = coherent_fidelity_threshold(src.nbar);
            csv += csv_row({fmt(src.nbar), fmt(res_i.fidelity_vs_input), fmt(res_i.fidelity_sigma), fmt(thr)});
            rows.push_back({{"nbar", src.nbar}, {"fidelity", res_i.fidelity_vs_input},
                            {"fidelity_sigma", res_i.fidelity_sigma}, {"threshold", thr}});
        }
        write_file(opts.out_dir / "tomography_scan.csv", csv);
        j["nbar_scan"] = rows;
    }
    write_json(opts.out_dir / "tomography.json", j);
    return j;
}

json cmd_threshold(const ExperimentConfig& cfg, const RunOptions& opts) {
    ensure_dir(opts.out_dir);
    std::string csv = "nbar,f_coh\n";
    json rows = json::array();
    for (double nbar : cfg.threshold_nbar) {
        const double f = coherent_fidelity_threshold(nbar);
        csv += csv_row({fmt(nbar), fmt(f)});
        rows.push_back({{"nbar", nbar}, {"f_coh", f}});
    }
    write_file(opts.out_dir / "threshold.csv", csv);
    json j = envelope("threshold", cfg);
    j["rows"] = rows;
    write_json(opts.out_dir / "threshold.json", j);
    return j;
}

json cmd_optimize(const ExperimentConfig& cfg, const RunOptions& opts) {
    ensure_dir(opts.out_dir);
    const OptimizationSpec& spec = cfg.optimize.spec;
    const PulseOptimization res =
        optimize_pulse(cfg.scenario, spec, split_seed(cfg.seed, kOptimize), cfg.optimize.coarse_search, opts.threads);

    std::vector<std::string> header{"eval_index"};
    for (const auto& p : spec.parameters) header.push_back(p.name);
    header.push_back("se");
    std::string csv = csv_row(header);
    for (const auto& e : res.search.trace) {
        std::vector<std::string> cells{std::to_string(e.eval_index)};
        for (double x : e.params) cells.push_back(fmt(x));
        cells.push_back(fmt(e.objective));
        csv += csv_row(cells);
    }
    write_file(opts.out_dir / "trace.csv", csv);

    json j = envelope("optimize", cfg);
    json params = json::object();
    for (std::size_t i = 0; i < spec.parameters.size(); ++i) params[spec.parameters[i].name] = res.search.best_params[i];
    j["best_params"] = params;
    j["best_se_search"] = res.search.best_value;
    j["best_se_full"] = res.best_se_full;
    j["evaluations"] = res.search.trace.size();
    j["converged"] = res.search.converged;
    json failures = json::array();
    for (const auto& e : res.search.trace) {
        if (!e.error.empty()) failures.push_back({{"eval_index", e.eval_index}, {"error", e.error}});
    }
    j["failed_evaluations"] = failures;
    if (cfg.optimize.compare_full_gaussian) {
        const GaussianBaseline base = full_gaussian_baseline(res.best, split_seed(cfg.seed, kBaseline), opts.threads);
        j["full_gaussian"] = {{"fwhm_ns", base.scenario.probe.fwhm_ns},
                              {"switch_off_offset_ns", base.scenario.switch_off_offset_ns},
                              {"se", base.se},
                              {"gain", res.best_se_full - base.se}};
    }
    j["best_config"] = with_scenario(cfg.document, res.best);
    write_json(opts.out_dir / "best.json", j);
    return j;
}

json cmd_calibrate(const ExperimentConfig& cfg, const RunOptions& opts) {
    ensure_dir(opts.out_dir);
    const CalibrationResult cal =
        calibrate(cfg.scenario, cfg.calibration, split_seed(cfg.seed, kCalibrate), opts.threads, cfg.calibration_budget);

    json calibrated = with_scenario(cfg.document, cal.scenario);
    calibrated["mode"]["l"] = cfg.calibration.low_l;
    write_json(opts.out_dir / "calibrated.json", calibrated);

    std::string csv = "l,od_eff,se\n";
    json rows = json::array();
    for (std::size_t l = 0; l < cal.se_by_l.size(); ++l) {
        csv += csv_row({std::to_string(l), fmt(cal.od_by_l[l]), fmt(cal.se_by_l[l])});
        rows.push_back({{"l", l}, {"od_eff", cal.od_by_l[l]}, {"se", cal.se_by_l[l]}});
    }
    write_file(opts.out_dir / "calibration.csv", csv);

    json j = envelope("calibrate", cfg);
    j["calibrated"] = {{"control_rel", get_parameter(cal.scenario, "control_rel")},
                       {"control_rabi", cal.scenario.control_rabi},
                       {"sigma_t_um", cal.scenario.ensemble.sigma_t_um},
                       {"gamma_12_rel", get_parameter(cal.scenario, "gamma_12_rel")},
                       {"gamma_12", cal.scenario.ensemble.gamma_12},
                       {"truncation_fraction", cal.scenario.probe.truncation_fraction}};
    j["residual"] = cal.residual;
    j["evaluations"] = cal.search.trace.size();
    j["rows"] = rows;
    write_json(opts.out_dir / "calibration.json", j);
    return j;
}

}  // namespace oamem::harness
