#include <chrono>

#include "doctest.h"
#include "penheal/app/pipeline.hpp"
#include "penheal/core/text.hpp"
#include "penheal/net_guard.hpp"
#include "penheal/sim/sim.hpp"
#include "scenarios.hpp"
#include "support.hpp"

using namespace penheal;

namespace {

app::AppConfig config(const std::string& name) {
    return app::load_config(testing::source_path("configs/" + name + ".json"));
}

app::PipelineResult run(const app::AppConfig& cfg) {
    auto services = app::make_services(cfg);
    return app::run_pipeline(cfg, services);
}

std::string findings_json(const std::vector<Vulnerability>& v) {
    RunArtifact a;
    a.findings = v;
    return serialize_run(a);
}

const TaskNode* node_named(const AttackPlan& plan, std::string_view needle) {
    for (const auto* n : plan.depth_first()) {
        if (n->description.find(needle) != std::string::npos) return n;
    }
    return nullptr;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("golden hermetic run is reproducible") {
    const auto cfg = config("hermetic");
    net::reset_attempts();
    const auto start = std::chrono::steady_clock::now();
    const auto first = run(cfg);
    REQUIRE_FALSE(first.fatal);
    REQUIRE(first.artifact.score_report);
    CHECK(first.artifact.score_report->s_d == 6.0);
    CHECK(first.artifact.findings.size() == 6);
    CHECK(first.exit_code() != 1);
    for (int i = 0; i < 4; ++i) {
        const auto again = run(cfg);
        CHECK(findings_json(again.artifact.findings) == findings_json(first.artifact.findings));
        CHECK(serialize_run(again.artifact) == serialize_run(first.artifact));
        CHECK(again.report == first.report);
    }
    CHECK(net::attempts() == 0);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
}

TEST_CASE("outputs land on disk") {
    auto cfg = config("hermetic");
    testing::TempDir dir;
    const auto res = run(cfg);
    app::write_outputs(res, dir.str());
    const auto back = load_run(dir.file("run.json"));
    CHECK(back == res.artifact);
    CHECK(testing::read_file(dir.file("report.txt")) == res.report);
    CHECK(llm::Transcript::load(dir.file("transcript.jsonl")).size() == res.transcript.size());
    CHECK(app::derive_run_id(back) == back.score_report->run_id);
}

TEST_CASE("no exploit succeeds") {
    const auto res = run(config("zero_exploit"));
    REQUIRE_FALSE(res.fatal);
    CHECK(res.artifact.findings.empty());
    CHECK(res.artifact.score_report->s_d == 0.0);
    CHECK(res.artifact.recommendations.empty());
    int failed_exploits = 0;
    for (const auto* n : res.artifact.plan.depth_first()) {
        if (n->children.empty() && n->description.find("xploit") != std::string::npos) {
            CHECK(n->status == TaskStatus::Failed);
            ++failed_exploits;
        }
    }
    CHECK(failed_exploits > 0);
    CHECK(node_named(res.artifact.plan, "Exploitation") != nullptr);
}

TEST_CASE("repeated evidence yields one finding") {
    const auto res = run(config("duplicate"));
    REQUIRE_FALSE(res.fatal);
    REQUIRE(res.artifact.findings.size() == 1);
    CHECK(res.artifact.findings[0].id == "CVE-2011-2523");
    CHECK(res.artifact.score_report->found_count == 1);
}

TEST_CASE("missing fixture is fatal") {
    auto cfg = config("hermetic");
    testing::TempDir dir;
    const auto golden = testing::read_file(testing::source_path("fixtures/golden/transcript.jsonl"));
    const auto lines = text::split_lines(golden);
    std::string head;
    for (std::size_t i = 0; i < 10; ++i) head += std::string(lines[i]) + "\n";
    testing::write_file(dir.file("transcript.jsonl"), head);
    cfg.fixtures = dir.str();
    const auto res = run(cfg);
    REQUIRE(res.fatal);
    CHECK(res.exit_code() == 1);
    CHECK(res.fatal->find("no recorded response") != std::string::npos);
}

TEST_CASE("fixtures regenerate byte for byte") {
    for (const char* name : {"golden", "zero_exploit", "duplicate"}) {
        INFO(name);
        const std::string config_name = std::string(name) == "golden" ? "hermetic" : name;
        const auto cfg = config(config_name);
        testing::TempDir dir;
        const auto path = dir.file("transcript.jsonl");
        net::deny_all(true);
        app::Services services;
        services.kb = app::load_knowledge_base(cfg);
        services.executor = std::make_unique<pentest::SimBackend>(sim::Simulator(sim::HostModel::builtin(), cfg.run.target_address));
        services.cves = std::make_unique<remediation::FixtureCveSource>(cfg.nvd.fixtures);
        services.llm = std::make_shared<llm::RecordingBackend>(
            std::make_shared<scenario::ScenarioBackend>(scenario::make_scenario(name)), path);
        const auto res = app::run_pipeline(cfg, services);
        CHECK_FALSE(res.fatal);

        const auto fresh = llm::Transcript::load(path).exchanges();
        const auto committed = llm::Transcript::load(testing::source_path(std::string("fixtures/") + name + "/transcript.jsonl")).exchanges();
        REQUIRE(fresh.size() == committed.size());
        for (std::size_t i = 0; i < fresh.size(); ++i) {
            auto a = fresh[i];
            auto b = committed[i];
            a.timestamp.clear();
            b.timestamp.clear();
            INFO("exchange " << i);
            CHECK(llm::Transcript::to_line(a) == llm::Transcript::to_line(b));
        }
    }
}

}  // TEST_SUITE
