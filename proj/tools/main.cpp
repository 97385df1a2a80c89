#include <chrono>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sbridge/config.hpp"
#include "sbridge/errors.hpp"
#include "sbridge/experiments.hpp"

namespace {

// exit codes: 0 pass, 1 runtime failure, 2 bad config/usage, 3 experiment FAIL
constexpr int exit_pass = 0;
constexpr int exit_runtime = 1;
constexpr int exit_config = 2;
constexpr int exit_fail = 3;

std::string joined_keys(const sbridge::ExperimentInfo& info) {
    std::string keys;
    for (const auto& key : sbridge::common_config_keys()) {
        if (!keys.empty()) keys += ",";
        keys += key;
    }
    for (const auto& key : info.keys) keys += "," + key;
    return keys;
}

int do_list(bool machine, const std::string& filter) {
    bool first = true;
    for (const auto& info : sbridge::experiment_catalog()) {
        if (!filter.empty() && info.name.find(filter) == std::string::npos &&
            info.title.find(filter) == std::string::npos)
            continue;
        if (machine) {
            if (!first) std::cout << "\n";
            std::cout << "name=" << info.name << "\n";
            std::cout << "title=" << info.title << "\n";
            std::cout << "claim=" << info.claim << "\n";
            std::cout << "keys=" << joined_keys(info) << "\n";
            std::cout << "columns=" << info.csv_columns << "\n";
        } else {
            std::cout << info.name << "  -  " << info.title << "  [keys: " << joined_keys(info)
                      << "]\n";
        }
        first = false;
    }
    return exit_pass;
}

int do_describe(const std::string& name) {
    const sbridge::ExperimentInfo* info = sbridge::find_experiment(name);
    if (!info) {
        std::cerr << "error: unknown experiment: " << name << "\n";
        return exit_config;
    }
    std::cout << "name:      " << info->name << "\n";
    std::cout << "title:     " << info->title << "\n";
    std::cout << "claim:     " << info->claim << "\n";
    std::cout << "pass rule: " << info->pass_rule << "\n";
    std::cout << "columns:   " << info->csv_columns << "\n";
    std::cout << "keys:      ";
    bool first = true;
    for (const auto& key : sbridge::common_config_keys()) {
        std::cout << (first ? "" : ", ") << key;
        first = false;
    }
    for (const auto& key : info->keys) std::cout << ", " << key;
    std::cout << "\n";
    return exit_pass;
}

int do_run(const std::string& config_path, const std::vector<std::string>& overrides) {
    sbridge::Config config;
    try {
        config = sbridge::parse_config_file(config_path);
        for (const auto& fragment : overrides) sbridge::apply_override(config, fragment);
        sbridge::validate_config(config);
    } catch (const sbridge::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }

    const std::string name = config.get("experiment", "");
    const std::string output = config.get("output", name + ".csv");

    sbridge::ExperimentResult result;
    const auto start = std::chrono::steady_clock::now();
    try {
        result = sbridge::run_experiment(config);
    } catch (const sbridge::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return exit_runtime;
    }
    const auto stop = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(stop - start).count();

    std::ofstream out(output, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << output << "\n";
        return exit_runtime;
    }
    out << result.csv;
    out.close();

    std::cerr << "wall_seconds=" << seconds << "\n";
    std::cout << name << ": " << (result.passed ? "PASS" : "FAIL") << " (" << result.summary
              << ") -> " << output << "\n";
    return result.passed ? exit_pass : exit_fail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropic bridge numerics driver"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run one experiment from a config file");
    std::string config_path;
    std::vector<std::string> overrides;
    run->add_option("config", config_path, "path to key=value config file")->required();
    run->add_option("overrides", overrides, "key=value overrides, later wins");

    auto* list = app.add_subcommand("list", "list available experiments");
    bool machine = false;
    std::string filter;
    list->add_flag("--machine", machine, "names only, one per line");
    list->add_option("--filter", filter, "substring filter on name or title");

    auto* describe = app.add_subcommand("describe", "show one experiment's contract");
    std::string describe_name;
    describe->add_option("name", describe_name, "experiment name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_pass : exit_config;
    }

    try {
        if (run->parsed()) return do_run(config_path, overrides);
        if (list->parsed()) return do_list(machine, filter);
        if (describe->parsed()) return do_describe(describe_name);
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_config;
}
