// phantomics command line driver.
//
// Exit codes: 0 success, 1 bad configuration or command line,
// 2 missing or unreadable data, 3 scenario execution failures.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "phantomics/config.hpp"
#include "phantomics/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic fruit-phantom radiomics benchmark"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON run configuration (defaults used if omitted)");
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--seed", seed, "single phantom seed (overrides the config's seed list)");

    auto* gen = app.add_subcommand("gen", "generate phantom volumes and label masks");
    auto* extract = app.add_subcommand("extract", "segment generated scans and write feature CSVs");
    auto* run = app.add_subcommand("run", "run the configured scenarios over extracted features");
    auto* report = app.add_subcommand("report", "aggregate scenario reports into one CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    phantomics::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = phantomics::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed) cfg.seeds = {*seed};
    } catch (const phantomics::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (gen->parsed()) {
            phantomics::cmd_gen(cfg);
            std::cout << "wrote volumes for " << cfg.seeds.size() << " seed(s) under "
                      << cfg.out_dir << "/volumes\n";
        } else if (extract->parsed()) {
            phantomics::cmd_extract(cfg);
            std::cout << "wrote feature CSVs for " << cfg.seeds.size() << " seed(s) under "
                      << cfg.out_dir << "/features\n";
        } else if (run->parsed()) {
            int failures = phantomics::cmd_run(cfg);
            if (failures > 0) {
                std::cerr << failures << " scenario run(s) failed\n";
                return 3;
            }
            std::cout << "wrote scenario reports under " << cfg.out_dir << "/reports\n";
        } else if (report->parsed()) {
            phantomics::cmd_report(cfg);
            std::cout << "wrote " << cfg.out_dir << "/reports/aggregate.csv\n";
        }
    } catch (const phantomics::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const phantomics::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const phantomics::io_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
