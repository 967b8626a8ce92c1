#include <random>

#include "doctest.h"
#include "penheal/core/artifact.hpp"
#include "penheal/core/errors.hpp"
#include "penheal/core/model.hpp"
#include "penheal/core/plan.hpp"
#include "penheal/pentest/plan_protocol.hpp"

using namespace penheal;

namespace {

Vulnerability vuln(std::string id, std::string service, std::optional<int> port) {
    Vulnerability v;
    v.id = std::move(id);
    v.service = std::move(service);
    v.port = port;
    return v;
}

RunArtifact sample_run() {
    RunArtifact run;
    run.plan = pentest::default_plan("10.0.2.4");
    run.plan.find("1.1")->status = TaskStatus::Completed;
    run.plan.find("1.1")->result_summary = "21/ftp, 23/telnet open";

    auto ftp = vuln("CVE-2011-2523", "ftp", 21);
    ftp.description = "vsFTPd 2.3.4 backdoor";
    ftp.exploitation_method = "msf vsftpd_234_backdoor";
    CvssMetrics m;
    m.c = m.i = m.a = Impact::High;
    m.base_score = 9.8;
    ftp.cvss = m;
    ftp.cvss_source = CvssSource::NvdLookup;
    auto http = vuln("CVE-NA", "http", std::nullopt);
    http.description = "SQL injection \"quoted\" \xc3\xa9";
    run.findings = {ftp, http};

    RecommendationGroup g;
    g.vuln = identity_of(ftp);
    g.candidates.push_back({"Upgrade vsftpd", {identity_key(ftp)}, 2.0, 9.0, RecommendationStatus::Adopted, "fixes it"});
    g.candidates.push_back({"Firewall port 21", {identity_key(ftp)}, 5.0, 4.9, RecommendationStatus::Discarded, ""});
    run.recommendations = {g};

    ScoreReport r;
    r.s_d = 6.0;
    r.s_r = 9.67;
    r.c = 3.0;
    r.s_overall = 4.22;
    r.found_count = 6;
    r.truth_count = 10;
    r.run_id = "run-0123456789ab";
    r.notes = {"a note"};
    run.score_report = r;
    run.transcript_ref = "transcript.jsonl";
    run.termination = "plan-exhausted";
    run.warnings = {"w1"};
    return run;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("artifact round-trip") {
    const auto run = sample_run();
    const auto bytes = serialize_run(run);
    CHECK(deserialize_run(bytes) == run);
    CHECK(serialize_run(deserialize_run(bytes)) == bytes);

    RunArtifact empty;
    CHECK(deserialize_run(serialize_run(empty)) == empty);
}

TEST_CASE("random artifacts round-trip") {
    std::mt19937 rng(7);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    for (int trial = 0; trial < 200; ++trial) {
        RunArtifact run;
        const int roots = 1 + pick(4);
        for (int r = 1; r <= roots; ++r) {
            TaskNode n{std::to_string(r), "phase " + std::to_string(pick(100)), TaskStatus::ToDo, std::nullopt, {}};
            for (int c = 1; c <= pick(4); ++c) {
                TaskNode k{n.id + "." + std::to_string(c), std::string(pick(40), 'a' + pick(26)),
                           static_cast<TaskStatus>(pick(3)), std::nullopt, {}};
                if (k.status != TaskStatus::ToDo) k.result_summary = std::string(pick(500), 'r');
                n.children.push_back(k);
            }
            run.plan.roots.push_back(n);
        }
        for (int f = 0; f < pick(6); ++f) {
            auto v = vuln(pick(2) ? "CVE-20" + std::to_string(10 + pick(10)) + "-" + std::to_string(1000 + pick(9000))
                                  : std::string(kCveNa),
                          "svc" + std::to_string(pick(5)), pick(3) ? std::optional<int>(pick(65536)) : std::nullopt);
            if (pick(2)) {
                CvssMetrics m;
                m.base_score = pick(101) / 10.0;
                m.scope = pick(2) ? Scope::Changed : Scope::Unchanged;
                v.cvss = m;
                v.cvss_source = pick(2) ? CvssSource::Estimated : CvssSource::NvdLookup;
            }
            run.findings.push_back(v);
        }
        if (pick(2)) {
            ScoreReport r;
            r.s_d = pick(100) / 7.0;
            r.mode = pick(2) ? AggregationMode::Sum : AggregationMode::DividedByThree;
            run.score_report = r;
        }
        run.termination = pick(2) ? "plan-exhausted" : "";
        CHECK(validate_plan(run.plan).empty());
        const auto back = deserialize_run(serialize_run(run));
        REQUIRE(back == run);
    }
}

TEST_CASE("malformed artifacts raise ParseError") {
    const auto bytes = serialize_run(sample_run());
    const auto truncated = bytes.substr(0, bytes.size() / 2);
    try {
        deserialize_run(truncated);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() <= truncated.size() + 1);
        CHECK(e.offset() > 0);
        CHECK(std::string(e.what()).find("malformed run artifact") != std::string::npos);
    }
    CHECK_THROWS_AS(deserialize_run(""), ParseError);
    CHECK_THROWS_AS(deserialize_run("[1,2]"), ParseError);
    CHECK_THROWS_AS(deserialize_run("{\"schema_version\": 2}"), ParseError);
    CHECK_THROWS_AS(deserialize_run("{\"schema_version\": 1}"), ParseError);
    auto wrong_type = bytes;
    wrong_type.replace(wrong_type.find("\"findings\": ["), 13, "\"findings\": 5, \"x\": [");
    CHECK_THROWS_AS(deserialize_run(wrong_type), ParseError);
}

TEST_CASE("vulnerability validation") {
    CHECK(validate(vuln("CVE-2011-2523", "ftp", 21)).empty());
    CHECK(validate(vuln("CVE-NA", "http", std::nullopt)).empty());
    CHECK(validate(vuln("CVE-2011-25", "ftp", 21)).size() == 1);
    CHECK(validate(vuln("vsftpd", "ftp", 21)).size() == 1);
    CHECK(validate(vuln("CVE-2011-2523", "ftp", 70000)) == std::vector<std::string>{"port 70000 out of range"});
    auto v = vuln("CVE-NA", "x", 1);
    v.cvss = CvssMetrics{};
    CHECK(validate(v).size() == 1);
    v.cvss_source = CvssSource::Estimated;
    CHECK(validate(v).empty());
}

TEST_CASE("identity and deduplication") {
    CHECK(identity_key(vuln("CVE-2011-2523", "ftp", 21)) == "CVE-2011-2523@ftp:21");
    CHECK(identity_key(vuln("CVE-NA", "HTTP ", std::nullopt)) == "CVE-NA@http:?");
    const auto out = deduplicate({vuln("CVE-2011-2523", "ftp", 21), vuln("cve-2011-2523", "FTP", 21),
                                  vuln("CVE-2011-2523", "ftp", 2121), vuln("CVE-NA", "ftp", 21),
                                  vuln("CVE-2011-2523", "ftp", 21)});
    REQUIRE(out.size() == 3);
    CHECK(out[0].service == "ftp");
    CHECK(out[1].port == 2121);
    CHECK(out[2].id == "CVE-NA");
    CHECK(deduplicate({}).empty());
}

TEST_CASE("dotted ids") {
    CHECK(parent_id("1.2.1") == "1.2");
    CHECK(parent_id("4") == "");
    CHECK(is_dotted_id("4.10.2"));
    CHECK_FALSE(is_dotted_id(""));
    CHECK_FALSE(is_dotted_id("1."));
    CHECK_FALSE(is_dotted_id("a.1"));
}

TEST_CASE("enum names round-trip") {
    for (auto s : {TaskStatus::ToDo, TaskStatus::Completed, TaskStatus::Failed}) CHECK(task_status_from(to_string(s)) == s);
    for (auto r : kAllRoles) CHECK(agent_role_from(to_string(r)) == r);
    for (auto t : {CostTier::Low, CostTier::Moderate, CostTier::High}) CHECK(cost_tier_from(to_string(t)) == t);
    for (auto m : {AggregationMode::Sum, AggregationMode::DividedByThree}) CHECK(aggregation_mode_from(to_string(m)) == m);
    for (auto m : {BudgetMode::Total, BudgetMode::PerGroup}) CHECK(budget_mode_from(to_string(m)) == m);
    CHECK_FALSE(task_status_from("pending").has_value());
}

TEST_CASE("run config defaults and validation") {
    RunConfig cfg;
    CHECK(validate(cfg).empty());
    CHECK(cfg.tier_of(AgentRole::Planner) == ModelTier::Strong);
    CHECK(cfg.tier_of(AgentRole::Summarizer) == ModelTier::Light);
    CHECK(cfg.model_for(AgentRole::Extractor) == "gpt-3.5-turbo");
    CHECK(cfg.cost_policy.score(CostTier::Moderate) == 5.0);
    cfg.budget_per_vuln = -1;
    cfg.retrieval_k = 0;
    cfg.cost_policy.tier_scores[CostTier::High] = 11;
    CHECK(validate(cfg).size() == 3);
}

TEST_CASE("recommendation validation") {
    Recommendation r{"Upgrade", {"CVE-2011-2523@ftp:21"}, 2.0, 9.0, RecommendationStatus::Proposed, ""};
    CHECK(validate(r, 9.8).empty());
    r.value = -9.8;
    CHECK(validate(r, 9.8).empty());
    r.value = 10.0;
    r.cost = 11.0;
    r.target_vuln_ids.clear();
    CHECK(validate(r, 9.8).size() == 3);
}

}  // TEST_SUITE
