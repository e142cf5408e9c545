#include "harness/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "oamem/errors.hpp"

namespace oamem::harness {

namespace {

const char* type_name(const json& j) {
    if (j.is_object()) return "object";
    if (j.is_array()) return "array";
    if (j.is_string()) return "string";
    if (j.is_boolean()) return "boolean";
    if (j.is_number()) return "number";
    if (j.is_null()) return "null";
    return "value";
}

bool same_kind(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) return true;
    return a.type() == b.type();
}

double number_at(const json& doc, const std::string& ptr) {
    const json& v = doc.at(json::json_pointer(ptr));
    if (!v.is_number()) throw config_error(ptr, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw config_error(ptr, "must be finite");
    return x;
}

int integer_at(const json& doc, const std::string& ptr) {
    const double x = number_at(doc, ptr);
    if (x != std::floor(x) || std::abs(x) > std::numeric_limits<int>::max()) {
        throw config_error(ptr, "expected an integer");
    }
    return static_cast<int>(x);
}

bool bool_at(const json& doc, const std::string& ptr) {
    const json& v = doc.at(json::json_pointer(ptr));
    if (!v.is_boolean()) throw config_error(ptr, "expected a boolean");
    return v.get<bool>();
}

std::string string_at(const json& doc, const std::string& ptr) {
    const json& v = doc.at(json::json_pointer(ptr));
    if (!v.is_string()) throw config_error(ptr, "expected a string");
    return v.get<std::string>();
}

std::vector<double> numbers_at(const json& doc, const std::string& ptr) {
    const json& v = doc.at(json::json_pointer(ptr));
    if (!v.is_array()) throw config_error(ptr, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_at(doc, ptr + "/" + std::to_string(i)));
    return out;
}

void require(bool ok, const std::string& ptr, const std::string& what) {
    if (!ok) throw config_error(ptr, what);
}

}  // namespace

const json& default_document() {
    static const json doc = [] {
        const double gamma_e = 2.0 * std::numbers::pi * 5.75e6;
        json d;
        d["ensemble"] = {{"peak_od", 220.0},
                         {"sigma_t_um", 99.0},
                         {"length_mm", 2.0},
                         {"gamma_e", gamma_e},
                         {"gamma_12", 1.5e-3 * gamma_e}};
        d["mode"] = {{"l", 1}, {"w0_um", 100.0}};
        d["probe"] = {{"fwhm_ns", 100.0}, {"truncation_fraction", 0.71}, {"duration_ns", 200.0}, {"full_gaussian", false}};
        d["protocol"] = {{"control_rabi", 7.25 * gamma_e},
                         {"switch_off_offset_ns", -20.0},
                         {"storage_ns", 200.0},
                         {"ramp_ns", 30.0},
                         {"retrieval_window_ns", 1000.0}};
        d["grid"] = {{"nz", 400}, {"dt_ns", 0.5}, {"snapshot_stride", 0}};
        d["source"] = {{"nbar", 0.5}, {"rep_rate", 2.5e5}};
        d["detector"] = {{"efficiency", 0.3}, {"background_rate", 300.0}, {"gate_width_ns", 10.0}};
        d["qubit"] = {{"state", "H"}, {"alpha", 1.0}, {"beta", 0.0}, {"phi", 0.0}};
        d["memory"] = {{"simulate", true}, {"eta_g", 0.65}, {"eta_r", 0.65}, {"dphi", 0.0}};
        d["tomography"] = {{"collection_time_s", 1200.0},
                           {"resamples", 1000},
                           {"background_correction", false},
                           {"stored", true},
                           {"nbar_scan", json::array()}};
        d["histogram"] = {{"collection_time_s", 3600.0}};
        d["scan"] = {{"l_max", 5}};
        d["threshold"] = {{"nbar", json::array({0.1, 0.5, 1.0, 2.0})}};
        d["optimize"] = {{"parameters", json::array({json{{"name", "truncation_fraction"}, {"lower", 0.05}, {"upper", 1.0}},
                                                     json{{"name", "switch_off_offset"}, {"lower", -100.0}, {"upper", 100.0}}})},
                         {"initial", json::array()},
                         {"budget", 80},
                         {"tolerance", 1e-3},
                         {"coarse_search", true},
                         {"compare_full_gaussian", true}};
        d["calibration"] = {{"low_l", 1}, {"low_se", 0.65}, {"high_l", 5}, {"high_se", 0.26}, {"budget", 160}};
        d["seed"] = 20210901;
        return with_scenario(d, StorageScenario::calibrated());
    }();
    return doc;
}

void merge_layer(json& base, const json& layer, const std::string& location) {
    if (!layer.is_object()) throw config_error(location.empty() ? "/" : location, "expected an object");
    for (auto it = layer.begin(); it != layer.end(); ++it) {
        const std::string here = location + "/" + it.key();
        if (!base.contains(it.key())) throw config_error(here, "unknown key");
        json& target = base[it.key()];
        if (!same_kind(target, it.value())) {
            throw config_error(here, std::string("expected ") + type_name(target) + ", got " + type_name(it.value()));
        }
        if (target.is_object()) {
            merge_layer(target, it.value(), here);
        } else {
            target = it.value();
        }
    }
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw config_error("--override " + assignment, "expected key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    // Build a one-key nested layer and merge it so the same checks apply.
    json layer = value;
    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) {
        if (part.empty()) throw config_error("--override " + assignment, "empty path component");
        parts.push_back(part);
    }
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) layer = json{{*it, layer}};
    merge_layer(doc, layer);
}

json read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw config_error(path.string(), "not valid JSON");
    if (doc.is_object() && doc.contains("resolved_config")) return doc["resolved_config"];
    return doc;
}

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig c;
    c.document = doc;
    StorageScenario& s = c.scenario;

    s.ensemble.peak_od = number_at(doc, "/ensemble/peak_od");
    s.ensemble.sigma_t_um = number_at(doc, "/ensemble/sigma_t_um");
    s.ensemble.length_mm = number_at(doc, "/ensemble/length_mm");
    s.ensemble.gamma_e = number_at(doc, "/ensemble/gamma_e");
    s.ensemble.gamma_12 = number_at(doc, "/ensemble/gamma_12");
    require(s.ensemble.peak_od >= 0.0, "/ensemble/peak_od", "must be >= 0");
    require(s.ensemble.sigma_t_um > 0.0, "/ensemble/sigma_t_um", "must be > 0");
    require(s.ensemble.length_mm > 0.0, "/ensemble/length_mm", "must be > 0");
    require(s.ensemble.gamma_e > 0.0, "/ensemble/gamma_e", "must be > 0");
    require(s.ensemble.gamma_12 >= 0.0 && s.ensemble.gamma_12 < s.ensemble.gamma_e, "/ensemble/gamma_12",
            "must satisfy 0 <= gamma_12 < gamma_e");

    s.mode.l = integer_at(doc, "/mode/l");
    s.mode.w0_um = number_at(doc, "/mode/w0_um");
    require(s.mode.l >= 0, "/mode/l", "must be >= 0");
    require(s.mode.w0_um > 0.0, "/mode/w0_um", "must be > 0");

    s.probe.fwhm_ns = number_at(doc, "/probe/fwhm_ns");
    s.probe.truncation_fraction = number_at(doc, "/probe/truncation_fraction");
    s.probe.duration_ns = number_at(doc, "/probe/duration_ns");
    s.probe.full_gaussian = bool_at(doc, "/probe/full_gaussian");
    require(s.probe.fwhm_ns > 0.0, "/probe/fwhm_ns", "must be > 0");
    require(s.probe.truncation_fraction > 0.0 && s.probe.truncation_fraction <= 1.0, "/probe/truncation_fraction",
            "must be in (0, 1]");
    require(s.probe.duration_ns > 0.0, "/probe/duration_ns", "must be > 0");

    s.control_rabi = number_at(doc, "/protocol/control_rabi");
    s.switch_off_offset_ns = number_at(doc, "/protocol/switch_off_offset_ns");
    s.storage_ns = number_at(doc, "/protocol/storage_ns");
    s.ramp_ns = number_at(doc, "/protocol/ramp_ns");
    s.retrieval_window_ns = number_at(doc, "/protocol/retrieval_window_ns");
    require(s.control_rabi >= 0.0, "/protocol/control_rabi", "must be >= 0");
    require(s.ramp_ns >= 0.0, "/protocol/ramp_ns", "must be >= 0");
    require(s.storage_ns >= s.ramp_ns, "/protocol/storage_ns", "must be at least the ramp duration");
    require(s.retrieval_window_ns > 0.0, "/protocol/retrieval_window_ns", "must be > 0");

    s.grid.nz = integer_at(doc, "/grid/nz");
    s.grid.dt_ns = number_at(doc, "/grid/dt_ns");
    s.grid.snapshot_stride = integer_at(doc, "/grid/snapshot_stride");
    require(s.grid.nz >= 2, "/grid/nz", "must be >= 2");
    require(s.grid.dt_ns > 0.0, "/grid/dt_ns", "must be > 0");
    require(s.grid.snapshot_stride >= 0, "/grid/snapshot_stride", "must be >= 0");

    c.source.nbar = number_at(doc, "/source/nbar");
    c.source.rep_rate = number_at(doc, "/source/rep_rate");
    require(c.source.nbar > 0.0, "/source/nbar", "must be > 0");
    require(c.source.rep_rate > 0.0, "/source/rep_rate", "must be > 0");

    c.detector.efficiency = number_at(doc, "/detector/efficiency");
    c.detector.background_rate = number_at(doc, "/detector/background_rate");
    c.detector.gate_width_ns = number_at(doc, "/detector/gate_width_ns");
    require(c.detector.efficiency > 0.0 && c.detector.efficiency <= 1.0, "/detector/efficiency", "must be in (0, 1]");
    require(c.detector.background_rate >= 0.0, "/detector/background_rate", "must be >= 0");
    require(c.detector.gate_width_ns > 0.0, "/detector/gate_width_ns", "must be > 0");

    c.qubit_label = string_at(doc, "/qubit/state");
    if (c.qubit_label == "custom") {
        const double alpha = number_at(doc, "/qubit/alpha");
        const double beta = number_at(doc, "/qubit/beta");
        require(alpha >= 0.0 && beta >= 0.0 && alpha * alpha + beta * beta > 0.0, "/qubit",
                "alpha, beta must be >= 0 and not both zero");
        c.qubit = ket_from_coeffs(alpha, beta, number_at(doc, "/qubit/phi"));
    } else {
        try {
            c.qubit = basis_state(parse_basis(c.qubit_label));
        } catch (const std::invalid_argument&) {
            throw config_error("/qubit/state", "expected one of G, R, H, V, D, A, custom");
        }
    }

    c.memory.simulate = bool_at(doc, "/memory/simulate");
    c.memory.eta_g = number_at(doc, "/memory/eta_g");
    c.memory.eta_r = number_at(doc, "/memory/eta_r");
    c.memory.dphi = number_at(doc, "/memory/dphi");
    require(c.memory.eta_g >= 0.0 && c.memory.eta_g <= 1.0, "/memory/eta_g", "must be in [0, 1]");
    require(c.memory.eta_r >= 0.0 && c.memory.eta_r <= 1.0, "/memory/eta_r", "must be in [0, 1]");

    c.tomography.collection_time_s = number_at(doc, "/tomography/collection_time_s");
    c.tomography.resamples = integer_at(doc, "/tomography/resamples");
    c.tomography.background_correction = bool_at(doc, "/tomography/background_correction");
    c.tomography.stored = bool_at(doc, "/tomography/stored");
    c.tomography.nbar_scan = numbers_at(doc, "/tomography/nbar_scan");
    require(c.tomography.collection_time_s > 0.0, "/tomography/collection_time_s", "must be > 0");
    require(c.tomography.resamples >= 100, "/tomography/resamples", "must be >= 100");
    for (std::size_t i = 0; i < c.tomography.nbar_scan.size(); ++i) {
        require(c.tomography.nbar_scan[i] > 0.0, "/tomography/nbar_scan/" + std::to_string(i), "must be > 0");
    }

    c.histogram_collection_time_s = number_at(doc, "/histogram/collection_time_s");
    require(c.histogram_collection_time_s > 0.0, "/histogram/collection_time_s", "must be > 0");
    c.scan_l_max = integer_at(doc, "/scan/l_max");
    require(c.scan_l_max >= 0, "/scan/l_max", "must be >= 0");

    c.threshold_nbar = numbers_at(doc, "/threshold/nbar");
    for (std::size_t i = 0; i < c.threshold_nbar.size(); ++i) {
        require(c.threshold_nbar[i] > 0.0, "/threshold/nbar/" + std::to_string(i), "must be > 0");
    }

    const json& params = doc.at("optimize").at("parameters");
    require(params.is_array() && !params.empty(), "/optimize/parameters", "expected a non-empty array");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const std::string here = "/optimize/parameters/" + std::to_string(i);
        require(params[i].is_object(), here, "expected an object");
        for (auto it = params[i].begin(); it != params[i].end(); ++it) {
            if (it.key() != "name" && it.key() != "lower" && it.key() != "upper") {
                throw config_error(here + "/" + it.key(), "unknown key");
            }
        }
        require(params[i].contains("name") && params[i].contains("lower") && params[i].contains("upper"), here,
                "needs name, lower and upper");
        ParameterBound b{string_at(doc, here + "/name"), number_at(doc, here + "/lower"), number_at(doc, here + "/upper")};
        try {
            (void)get_parameter(s, b.name);
        } catch (const std::invalid_argument& e) {
            throw config_error(here + "/name", e.what());
        }
        require(b.lower < b.upper, here, "lower must be < upper");
        c.optimize.spec.parameters.push_back(b);
    }
    c.optimize.spec.initial = numbers_at(doc, "/optimize/initial");
    c.optimize.spec.budget = integer_at(doc, "/optimize/budget");
    c.optimize.spec.tolerance = number_at(doc, "/optimize/tolerance");
    c.optimize.coarse_search = bool_at(doc, "/optimize/coarse_search");
    c.optimize.compare_full_gaussian = bool_at(doc, "/optimize/compare_full_gaussian");
    try {
        c.optimize.spec.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error("/optimize", e.what());
    }

    c.calibration.low_l = integer_at(doc, "/calibration/low_l");
    c.calibration.low_se = number_at(doc, "/calibration/low_se");
    c.calibration.high_l = integer_at(doc, "/calibration/high_l");
    c.calibration.high_se = number_at(doc, "/calibration/high_se");
    c.calibration_budget = integer_at(doc, "/calibration/budget");
    require(c.calibration.low_l >= 0 && c.calibration.high_l > c.calibration.low_l, "/calibration",
            "need 0 <= low_l < high_l");
    require(c.calibration_budget >= 20, "/calibration/budget", "must be >= 20");

    const json& seed = doc.at("seed");
    require(seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<std::int64_t>() >= 0), "/seed",
            "expected a non-negative integer");
    c.seed = seed.get<std::uint64_t>();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path* file, const std::vector<std::string>& overrides,
                             const std::uint64_t* seed) {
    json doc = default_document();
    if (file) merge_layer(doc, read_config_file(*file));
    for (const auto& o : overrides) apply_override(doc, o);
    if (seed) doc["seed"] = *seed;
    return parse_config(doc);
}

json with_scenario(json doc, const StorageScenario& s) {
    doc["ensemble"]["peak_od"] = s.ensemble.peak_od;
    doc["ensemble"]["sigma_t_um"] = s.ensemble.sigma_t_um;
    doc["ensemble"]["length_mm"] = s.ensemble.length_mm;
    doc["ensemble"]["gamma_e"] = s.ensemble.gamma_e;
    doc["ensemble"]["gamma_12"] = s.ensemble.gamma_12;
    doc["mode"]["l"] = s.mode.l;
    doc["mode"]["w0_um"] = s.mode.w0_um;
    doc["probe"]["fwhm_ns"] = s.probe.fwhm_ns;
    doc["probe"]["truncation_fraction"] = s.probe.truncation_fraction;
    doc["probe"]["duration_ns"] = s.probe.duration_ns;
    doc["probe"]["full_gaussian"] = s.probe.full_gaussian;
    doc["protocol"]["control_rabi"] = s.control_rabi;
    doc["protocol"]["switch_off_offset_ns"] = s.switch_off_offset_ns;
    doc["protocol"]["storage_ns"] = s.storage_ns;
    doc["protocol"]["ramp_ns"] = s.ramp_ns;
    doc["protocol"]["retrieval_window_ns"] = s.retrieval_window_ns;
    return doc;
}

}  // namespace oamem::harness
