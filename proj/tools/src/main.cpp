#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pdifmp/error.hpp"
#include "pdifmp/runner.hpp"

namespace {

namespace rn = pdifmp::runner;

int report_error(const std::exception& e) {
    std::cerr << rn::serialize_error(e).dump() << '\n';
    if (const auto* err = dynamic_cast<const pdifmp::Error*>(&e); err && err->kind() == pdifmp::ErrorKind::config) {
        return rn::exit_code::config_error;
    }
    return rn::exit_code::runtime_error;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulate piecewise diffusion Markov processes and run convergence experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> threads;
    bool paper_faithful = false;

    auto* run = app.add_subcommand("run", "Run an experiment config");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out_dir, "Override the output directory");
    run->add_option("--threads", threads, "Worker threads (default: PDIFMP_THREADS or all cores)");
    run->add_flag("--paper-faithful", paper_faithful, "Use the low reference bound settings, counting violations");

    auto* list = app.add_subcommand("list-models", "List the built-in models");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    validate->add_option("config", validate_path, "Experiment config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rn::exit_code::config_error;
    }

    if (list->parsed()) {
        for (const auto& m : rn::list_models()) std::cout << m.id << "\t" << m.description << '\n';
        return rn::exit_code::ok;
    }

    if (validate->parsed()) {
        try {
            const auto c = rn::load_config(validate_path);
            std::cout << "ok: " << rn::to_string(c.kind) << ", " << c.h_list.size() << " step sizes, M=" << c.paths
                      << '\n';
            return rn::exit_code::ok;
        } catch (const std::exception& e) {
            return report_error(e);
        }
    }

    rn::ExperimentConfig config;
    try {
        config = rn::load_config(config_path);
        if (seed) config.seed = *seed;
        if (out_dir) config.output_dir = *out_dir;
        if (threads) config.threads = *threads;
        if (paper_faithful) config.paper_faithful = true;
        rn::validate(config);
    } catch (const std::exception& e) {
        return report_error(e);
    }

    try {
        const auto outcome = rn::run(config);
        std::cout << outcome.summary.dump(2) << '\n';
        return outcome.exit_code;
    } catch (const std::exception& e) {
        std::filesystem::create_directories(config.output_dir);
        std::ofstream(config.output_dir / "error.json") << rn::serialize_error(e).dump(2) << '\n';
        return report_error(e);
    }
}
