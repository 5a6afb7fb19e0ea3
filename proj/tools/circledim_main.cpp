#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "circledim/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"circledim: numerical experiments on circle-diffeomorphism group actions"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    bool have_seed = false;
    std::uint64_t seed_override = 0;

    auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
    run->add_option("config", config_path, "path to the config file")->required();
    run->add_option("--output", output_dir, "override the output directory");
    run->add_option("--seed", seed_override, "override the seed")->each([&](const std::string&) {
        have_seed = true;
    });

    bool list = false;
    auto* fixtures_cmd = app.add_subcommand("fixtures", "inspect the built-in fixture registry");
    fixtures_cmd->add_flag("--list", list, "list fixture names");

    CLI11_PARSE(app, argc, argv);

    if (fixtures_cmd->parsed()) {
        for (const auto& name : circledim::fixtures::fixture_names()) std::cout << name << "\n";
        return 0;
    }

    nlohmann::json config;
    {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot open config: " << config_path << "\n";
            return 2;
        }
        try {
            in >> config;
        } catch (const std::exception& e) {
            std::cerr << "config parse error: " << e.what() << "\n";
            return 2;
        }
    }
    if (have_seed) config["seed"] = seed_override;
    std::string outdir = !output_dir.empty() ? output_dir
                         : config.contains("output_dir") ? config["output_dir"].get<std::string>()
                                                         : std::string("out");
    auto outcome = circledim::runner::run_to_dir(config, outdir);
    if (outcome.results.contains("error") && !outcome.results["error"].is_null())
        std::cerr << outcome.results["error"].dump() << "\n";
    return outcome.exit_code;
}
