// Command-line front end: run experiments from JSON configs, write CSV
// traces, a summary and a run manifest.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrcollapse/config.hpp"
#include "rrcollapse/trace.hpp"
#include "rrcollapse/version.hpp"

namespace fs = std::filesystem;

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

int run_command(const std::string& config_path, const std::vector<std::string>& overrides,
                std::string out_dir, bool plot) {
    rrc::ExperimentConfig config = rrc::parse_config_file(config_path);
    config = rrc::apply_overrides(config, overrides);

    if (out_dir.empty()) {
        if (const char* env = std::getenv("RR_COLLAPSE_OUT"))
            out_dir = env;
        else
            out_dir = ".";
    }
    fs::create_directories(out_dir);

    nlohmann::json manifest;
    manifest["artifact_version"] = rrc::kVersion;
    manifest["config_echo"] = rrc::config_to_json(config);
    manifest["started"] = iso_timestamp();

    const rrc::ExperimentResult result = rrc::run_experiment(config);

    std::vector<std::string> written;
    for (const auto& [name, trace] : result.traces) {
        const std::string path = (fs::path(out_dir) / (name + ".csv")).string();
        rrc::write_trace(trace, path);
        written.push_back(path);
        if (plot) {
            std::vector<std::string> observables(trace.columns().begin() + 1,
                                                 trace.columns().end());
            const std::string prefix = (fs::path(out_dir) / name).string();
            for (auto& f : rrc::emit_plot_data(trace, observables, prefix))
                written.push_back(f);
        }
    }
    const std::string summary_path = (fs::path(out_dir) / "summary.json").string();
    {
        std::ofstream out(summary_path);
        if (!out) throw rrc::IoError("cannot write " + summary_path);
        out << result.summary.dump(2) << '\n';
    }
    written.push_back(summary_path);

    manifest["finished"] = iso_timestamp();
    manifest["outputs"] = written;
    const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
    {
        std::ofstream out(manifest_path);
        if (!out) throw rrc::IoError("cannot write " + manifest_path);
        out << manifest.dump(2) << '\n';
    }

    std::cout << "wrote " << written.size() + 1 << " files to " << out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radiation-reaction collapse experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    bool plot = false;
    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("config", config_path, "path to config JSON")->required();
    run->add_option("--set", overrides, "override key=value (parameters, seed, sample_interval)");
    run->add_option("--out", out_dir, "output directory (default $RR_COLLAPSE_OUT or .)");
    run->add_flag("--plot", plot, "also emit gnuplot data files and script");

    auto* list = app.add_subcommand("list-experiments", "list available experiment names");
    auto* version = app.add_subcommand("version", "print the artifact version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_path, overrides, out_dir, plot);
        if (list->parsed()) {
            for (const auto& name : rrc::experiment_names()) std::cout << name << '\n';
            return 0;
        }
        if (version->parsed()) {
            std::cout << rrc::kVersion << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
