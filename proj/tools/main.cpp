#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harness/commands.hpp"
#include "oamem/errors.hpp"
#include "oamem/parallel.hpp"

namespace {

using oamem::harness::json;

enum ExitCode { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

struct Failure {
    ExitCode code;
    std::string kind;
    std::string message;
    std::string location;
};

void report(const Failure& f, const std::string& command, const std::filesystem::path* out_dir) {
    json err = {{"error", {{"kind", f.kind}, {"message", f.message}, {"exit_code", static_cast<int>(f.code)}}}};
    if (!f.location.empty()) err["error"]["location"] = f.location;
    if (!command.empty()) err["error"]["command"] = command;
    std::cerr << err.dump() << '\n';
    if (!out_dir) return;
    std::error_code ec;
    std::filesystem::create_directories(*out_dir, ec);
    std::ofstream os(*out_dir / "error.json", std::ios::trunc);
    if (os) os << err.dump(2) << '\n';
}

// "0.1,0.5, 1" -> "[0.1,0.5,1]"; an empty string gives an empty list.
std::string number_list(const std::string& text) {
    std::string out = "[";
    std::stringstream ss(text);
    bool first = true;
    for (std::string item; std::getline(ss, item, ',');) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        if (!first) out += ',';
        out += item.substr(b, e - b + 1);
        first = false;
    }
    return out + "]";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OAM quantum memory simulator: EIT storage, photon statistics and tomography"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    unsigned threads = oamem::default_threads();
    std::vector<std::string> overrides;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (a result JSON replays its embedded config)");
        sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Root seed (overrides the config)");
        sub->add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--override", overrides, "key.path=value (repeatable)")->take_all();
    };

    using Command = std::function<json(const oamem::harness::ExperimentConfig&, const oamem::harness::RunOptions&)>;
    std::vector<std::pair<CLI::App*, Command>> commands;

    auto* simulate = app.add_subcommand("simulate", "Store and retrieve one probe pulse");
    common(simulate);
    commands.emplace_back(simulate, oamem::harness::cmd_simulate);

    auto* scan_oam = app.add_subcommand("scan-oam", "Storage efficiency against OAM order");
    common(scan_oam);
    std::optional<int> l_max;
    scan_oam->add_option("--l-max", l_max, "Largest OAM order (scan.l_max)")->check(CLI::NonNegativeNumber);
    commands.emplace_back(scan_oam, oamem::harness::cmd_scan_oam);

    auto* tomography = app.add_subcommand("tomography", "Six-basis tomography of a qubit state");
    common(tomography);
    std::optional<std::string> state;
    std::optional<bool> stored;
    std::optional<std::string> nbar_scan;
    tomography->add_option("--state", state, "G, R, H, V, D, A or custom (qubit.state)");
    tomography->add_flag("--stored,!--unstored", stored, "Pass the qubit through the memory first");
    tomography->add_option("--nbar-scan", nbar_scan, "Comma-separated mean photon numbers");
    commands.emplace_back(tomography, oamem::harness::cmd_tomography);

    auto* threshold = app.add_subcommand("threshold", "Intercept-resend fidelity threshold");
    common(threshold);
    std::optional<std::string> nbar;
    threshold->add_option("--nbar", nbar, "Comma-separated mean photon numbers (may be empty)");
    commands.emplace_back(threshold, oamem::harness::cmd_threshold);

    auto* optimize = app.add_subcommand("optimize", "Optimize the probe pulse shape");
    common(optimize);
    std::optional<int> budget;
    optimize->add_option("--budget", budget, "Objective evaluations (optimize.budget)");
    commands.emplace_back(optimize, oamem::harness::cmd_optimize);

    auto* calibrate = app.add_subcommand("calibrate", "Fit free model parameters to the SE anchors");
    common(calibrate);
    commands.emplace_back(calibrate, oamem::harness::cmd_calibrate);

    std::string command_name;
    std::optional<std::filesystem::path> out_path;
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report({kConfig, "usage", e.what(), ""}, "", nullptr);
        return kConfig;
    }

    try {
        for (const auto& [sub, fn] : commands) {
            if (!sub->parsed()) continue;
            command_name = sub->get_name();
            out_path = out_dir;

            // Subcommand shortcuts become overrides so they land in the resolved config.
            if (l_max) overrides.push_back("scan.l_max=" + std::to_string(*l_max));
            if (state) overrides.push_back("qubit.state=" + json(*state).dump());
            if (stored) overrides.push_back(std::string("tomography.stored=") + (*stored ? "true" : "false"));
            if (nbar_scan) overrides.push_back("tomography.nbar_scan=" + number_list(*nbar_scan));
            if (nbar) overrides.push_back("threshold.nbar=" + number_list(*nbar));
            if (budget) overrides.push_back("optimize.budget=" + std::to_string(*budget));

            const std::filesystem::path file = config_path.value_or("");
            const auto cfg = oamem::harness::load_config(config_path ? &file : nullptr, overrides,
                                                         seed ? &*seed : nullptr);
            fn(cfg, {*out_path, threads});
        }
        return kOk;
    } catch (const oamem::config_error& e) {
        report({kConfig, "config", e.what(), e.location()}, command_name, out_path ? &*out_path : nullptr);
        return kConfig;
    } catch (const std::invalid_argument& e) {
        report({kConfig, "invalid_argument", e.what(), ""}, command_name, out_path ? &*out_path : nullptr);
        return kConfig;
    } catch (const oamem::io_error& e) {
        report({kIo, "io", e.what(), ""}, command_name, nullptr);
        return kIo;
    } catch (const oamem::degenerate_data_error& e) {
        report({kNumeric, "degenerate_data", e.what(), ""}, command_name, out_path ? &*out_path : nullptr);
        return kNumeric;
    } catch (const oamem::numeric_error& e) {
        report({kNumeric, "numeric", e.what(), ""}, command_name, out_path ? &*out_path : nullptr);
        return kNumeric;
    } catch (const std::exception& e) {
        report({kNumeric, "internal", e.what(), ""}, command_name, out_path ? &*out_path : nullptr);
        return kNumeric;
    }
}
