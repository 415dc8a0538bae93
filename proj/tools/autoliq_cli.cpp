// autoliq <experiment> [--config FILE] [--set key=value ...] [--seed N] [--out DIR]
//
// Exit codes: 0 ok, 2 configuration, 3 numerical failure, 4 I/O.

#include <autoliq/experiment.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw autoliq::experiment::IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    namespace ax = autoliq::experiment;
    namespace cfg = autoliq::config;

    CLI::App app{"Run a named liquidity/Kelly experiment and write CSV artefacts."};
    std::string experiment;
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    bool list = false;

    std::string names;
    for (const auto& n : ax::experiment_names()) names += (names.empty() ? "" : ", ") + n;

    app.add_option("experiment", experiment, "One of: " + names);
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--set", sets, "Override one key (key=value); repeatable");
    app.add_option("--seed", seed, "Base seed (overrides the seed key)");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_flag("--list-keys", list, "Print the experiment's keys and defaults, then exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }
    if (experiment.empty()) {
        std::cerr << "error: missing experiment (one of: " << names << ")\n";
        return kConfig;
    }

    try {
        if (list) {
            for (const auto& k : ax::experiment_keys(experiment))
                std::cout << k.name << '=' << k.default_value << "    # " << k.domain << '\n';
            return kOk;
        }
        cfg::ConfigMap file_values;
        if (!config_path.empty()) file_values = cfg::parse_config(read_file(config_path));
        cfg::ConfigMap overrides;
        for (const auto& s : sets) {
            auto [key, value] = cfg::parse_assignment(s);
            if (overrides.contains(key)) throw cfg::ConfigError("duplicate --set for '" + key + "'", key);
            overrides.emplace(std::move(key), std::move(value));
        }
        const auto manifest = ax::run_experiment(experiment, file_values, overrides, seed, out_dir);
        for (const auto& f : manifest.outputs) std::cout << (std::filesystem::path(out_dir) / f.name).string() << '\n';
        std::cout << (std::filesystem::path(out_dir) / "manifest.txt").string() << '\n';
        return kOk;
    } catch (const cfg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const autoliq::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const autoliq::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const ax::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}
