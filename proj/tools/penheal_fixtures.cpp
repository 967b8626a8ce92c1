// Regenerates a replay fixture by running the pipeline against the simulator
// with a scripted scenario standing in for the model.
//
//   penheal-fixtures --scenario golden --config configs/hermetic.json [--out DIR]

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "penheal/app/pipeline.hpp"
#include "penheal/net_guard.hpp"
#include "penheal/sim/sim.hpp"
#include "scenarios.hpp"

namespace fs = std::filesystem;
using namespace penheal;

int main(int argc, char** argv) {
    CLI::App cli{"Record replay fixtures from a scripted scenario"};
    std::string scenario_name;
    std::string config_path;
    std::string out_dir;
    cli.add_option("--scenario", scenario_name, "Scenario name")
        ->required()
        ->check(CLI::IsMember(scenario::scenario_names()));
    cli.add_option("--config", config_path, "Hermetic config whose run settings the fixture must match")->required();
    cli.add_option("--out", out_dir, "Fixture directory (default: the config's fixtures)");
    CLI11_PARSE(cli, argc, argv);

    try {
        auto cfg = app::load_config(config_path);
        if (out_dir.empty()) out_dir = cfg.fixtures;
        if (out_dir.empty()) throw ConfigError("fixtures", "no fixture directory given");
        fs::create_directories(out_dir);
        const auto transcript = (fs::path(out_dir) / app::kTranscriptFile).string();
        fs::remove(transcript);

        net::deny_all(true);
        app::Services services;
        services.kb = app::load_knowledge_base(cfg);
        auto model = cfg.host_model.empty() ? sim::HostModel::builtin() : sim::HostModel::load(cfg.host_model);
        services.executor = std::make_unique<pentest::SimBackend>(sim::Simulator(std::move(model), cfg.run.target_address));
        if (!cfg.nvd.fixtures.empty()) services.cves = std::make_unique<remediation::FixtureCveSource>(cfg.nvd.fixtures);
        services.llm = std::make_shared<llm::RecordingBackend>(
            std::make_shared<scenario::ScenarioBackend>(scenario::make_scenario(scenario_name)), transcript);

        const auto result = app::run_pipeline(cfg, services);
        std::cout << scenario_name << ": " << result.transcript.size() << " exchanges, " << result.artifact.findings.size()
                  << " findings, termination " << result.artifact.termination << ", exit " << result.exit_code() << "\n";
        for (const auto& w : result.artifact.warnings) std::cout << "  warning: " << w << "\n";
        std::cout << "wrote " << transcript << "\n";
        return result.fatal ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
