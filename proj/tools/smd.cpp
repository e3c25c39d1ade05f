#include <CLI11.hpp>
#include <iostream>

#include "smd/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sliced space-filling mixture designs"};
    app.require_subcommand(1);

    std::string config_path, design_path, out_path, methods_csv;
    int replicates = 1;
    std::uint64_t seed_override = 0;
    bool have_seed = false;

    auto* gen = app.add_subcommand("generate", "construct a design from a config file");
    gen->add_option("--config", config_path, "run config JSON")->required();
    gen->add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { have_seed = true; });

    auto* eval = app.add_subcommand("evaluate", "evaluate a design CSV");
    eval->add_option("--design", design_path, "design CSV path")->required();
    eval->add_option("--config", config_path, "run config JSON")->required();
    eval->add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { have_seed = true; });

    auto* cmp = app.add_subcommand("compare", "compare methods over replicates");
    cmp->add_option("--config", config_path, "run config JSON")->required();
    cmp->add_option("--methods", methods_csv, "comma-separated method list")->required();
    cmp->add_option("--replicates", replicates, "number of replicates")->required();
    cmp->add_option("--out", out_path, "long-format output CSV")->required();
    cmp->add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { have_seed = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    try {
        smd::cli::RunConfig cfg = smd::cli::load_config(config_path);
        if (have_seed) cfg.solver.seed = seed_override;
        if (gen->parsed()) return smd::cli::cmd_generate(cfg);
        if (eval->parsed()) return smd::cli::cmd_evaluate(design_path, cfg);
        std::vector<std::string> methods;
        std::stringstream ss(methods_csv);
        std::string item;
        while (std::getline(ss, item, ',')) methods.push_back(item);
        if (methods.empty()) {
            std::cerr << "error: empty method list\n";
            return 1;
        }
        return smd::cli::cmd_compare(cfg, methods, replicates, out_path);
    } catch (const smd::cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
