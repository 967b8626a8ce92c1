#include <atomic>

#include "doctest.h"
#include "penheal/core/json.hpp"
#include "penheal/llm/gateway.hpp"
#include "penheal/llm/prompts.hpp"
#include "penheal/net_guard.hpp"
#include "stub_server.hpp"
#include "support.hpp"

using namespace penheal;
using namespace penheal::llm;

namespace {

std::vector<ChatTurn> history(std::string user) { return {system_turn("sys"), user_turn(std::move(user))}; }

struct EchoBackend : Backend {
    std::vector<ChatRequest> seen;
    std::string complete(const ChatRequest& r) override {
        seen.push_back(r);
        return "echo:" + r.messages.back().content;
    }
};

const char* kCompletion = R"({"choices":[{"message":{"role":"assistant","content":"Next task: 2.1"}}]})";

}  // namespace

TEST_SUITE("gateway") {

TEST_CASE("request hash covers role and every message") {
    const auto h = request_hash(AgentRole::Planner, history("a"));
    CHECK(h.size() == 64);
    CHECK(h == request_hash(AgentRole::Planner, history("a")));
    CHECK(h != request_hash(AgentRole::Executor, history("a")));
    CHECK(h != request_hash(AgentRole::Planner, history("b")));
    auto longer = history("a");
    longer.push_back(assistant_turn("x"));
    CHECK(h != request_hash(AgentRole::Planner, longer));
    auto retagged = history("a");
    retagged[1].role_tag = TurnRole::Assistant;
    CHECK(h != request_hash(AgentRole::Planner, retagged));
}

TEST_CASE("gateway routes tiers and records the transcript") {
    auto backend = std::make_shared<EchoBackend>();
    Gateway gw(backend, GatewayOptions::from(RunConfig{}));
    gw.set_tag("iteration=1");
    CHECK(gw.complete(AgentRole::Planner, history("plan")) == "echo:plan");
    gw.set_tag("remediation");
    CHECK(gw.complete(AgentRole::Summarizer, history("sum")) == "echo:sum");
    REQUIRE(backend->seen.size() == 2);
    CHECK(backend->seen[0].tier == ModelTier::Strong);
    CHECK(backend->seen[0].model == "gpt-4-turbo");
    CHECK(backend->seen[1].tier == ModelTier::Light);
    CHECK(backend->seen[1].model == "gpt-3.5-turbo");
    CHECK(backend->seen[1].request_hash == request_hash(AgentRole::Summarizer, history("sum")));

    const auto t = gw.transcript();
    REQUIRE(t.size() == 2);
    CHECK(t.exchanges()[0].seq == 0);
    CHECK(t.exchanges()[1].seq == 1);
    CHECK(t.exchanges()[0].tag == "iteration=1");
    CHECK(t.exchanges()[1].tag == "remediation");
    CHECK(t.exchanges()[1].timestamp.size() == 20);
    CHECK(gw.calls() == 2);

    RunConfig cfg;
    cfg.role_tiers[AgentRole::Summarizer] = ModelTier::Strong;
    cfg.tier_models[ModelTier::Strong] = "local-model";
    Gateway gw2(backend, GatewayOptions::from(cfg));
    gw2.complete(AgentRole::Summarizer, history("x"));
    CHECK(backend->seen.back().model == "local-model");
}

TEST_CASE("gateway preconditions") {
    Gateway gw(std::make_shared<EchoBackend>(), GatewayOptions{});
    CHECK_THROWS_AS(gw.complete(AgentRole::Planner, {user_turn("no system")}), PreconditionError);
    CHECK_THROWS_AS(gw.complete(AgentRole::Planner, {}), PreconditionError);
    CHECK_THROWS_AS(gw.complete(AgentRole::Planner, {system_turn("s"), user_turn("")}), PreconditionError);
}

TEST_CASE("replay serves recorded responses in order and then runs dry") {
    Transcript t;
    const auto h = request_hash(AgentRole::Planner, history("q"));
    t.append({0, AgentRole::Planner, ModelTier::Strong, "m", h, history("q"), "first", "", ""});
    t.append({1, AgentRole::Planner, ModelTier::Strong, "m", h, history("q"), "second", "", ""});
    auto replay = std::make_shared<ReplayBackend>(t);
    Gateway gw(replay, GatewayOptions{});
    CHECK(replay->remaining() == 2);
    CHECK(gw.complete(AgentRole::Planner, history("q")) == "first");
    CHECK(gw.complete(AgentRole::Planner, history("q")) == "second");
    CHECK(replay->remaining() == 0);
    try {
        gw.complete(AgentRole::Planner, history("q"));
        FAIL("expected MissingFixtureError");
    } catch (const MissingFixtureError& e) {
        CHECK(e.role() == AgentRole::Planner);
        CHECK(e.hash() == h);
        CHECK(std::string(e.what()) == "no recorded response for role planner with request hash " + h);
    }
    CHECK_THROWS_AS(gw.complete(AgentRole::Executor, history("q")), MissingFixtureError);
}

TEST_CASE("an empty transcript names the first request") {
    ReplayBackend replay{Transcript{}};
    ChatRequest req;
    req.role = AgentRole::Extractor;
    req.request_hash = "abc";
    CHECK_THROWS_WITH_AS(replay.complete(req), "no recorded response for role extractor with request hash abc",
                         MissingFixtureError);
}

TEST_CASE("recording then replaying reproduces every answer") {
    testing::TempDir dir;
    const auto path = dir.file("t.jsonl");
    auto echo = std::make_shared<EchoBackend>();
    {
        Gateway gw(std::make_shared<RecordingBackend>(echo, path), GatewayOptions{});
        gw.complete(AgentRole::Planner, history("one"));
        gw.complete(AgentRole::Advisor, history("two \"quoted\"\nline"));
    }
    const auto loaded = Transcript::load(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded.exchanges()[0].seq == 0);
    CHECK(loaded.exchanges()[1].seq == 1);
    CHECK(loaded.exchanges()[1].messages == history("two \"quoted\"\nline"));

    auto replay = ReplayBackend::from_file(path);
    Gateway gw(replay, GatewayOptions{});
    CHECK(gw.complete(AgentRole::Advisor, history("two \"quoted\"\nline")) == "echo:two \"quoted\"\nline");
    CHECK(gw.complete(AgentRole::Planner, history("one")) == "echo:one");
    CHECK(replay->remaining() == 0);
}

TEST_CASE("transcript lines round-trip and malformed lines are located") {
    Exchange e{3, AgentRole::Estimator, ModelTier::Light, "gpt-3.5-turbo", "h", history("x"), "resp", "2026-01-01T00:00:00Z",
               "remediation"};
    const auto back = Transcript::from_line(Transcript::to_line(e), 1);
    CHECK(back.seq == 3);
    CHECK(back.role == AgentRole::Estimator);
    CHECK(back.tier == ModelTier::Light);
    CHECK(back.messages == e.messages);
    CHECK(back.tag == "remediation");
    CHECK_THROWS_WITH_AS(Transcript::from_line("{\"seq\":", 7), doctest::Contains("transcript line 7"), ParseError);
    CHECK_THROWS_WITH_AS(Transcript::from_line(R"({"seq":0,"role":"wizard","request_hash":"h","messages":[],"response":""})", 2),
                         doctest::Contains("unknown role"), ParseError);
}

TEST_CASE("context fitting drops the oldest turns first") {
    std::vector<ChatTurn> h{system_turn("SYS"), user_turn(std::string(50, 'a')), assistant_turn(std::string(50, 'b')),
                            user_turn(std::string(50, 'c'))};
    CHECK(Gateway::fit_context(h, 1000) == h);
    const auto fit = Gateway::fit_context(h, 110);
    REQUIRE(fit.size() == 3);
    CHECK(fit[0].content == "SYS");
    CHECK(fit[1].content == std::string(50, 'b'));
    CHECK(fit[2].content == std::string(50, 'c'));

    const auto clipped = Gateway::fit_context(h, 40);
    REQUIRE(clipped.size() == 2);
    CHECK(clipped[0].content == "SYS");
    CHECK(clipped[1].content.size() == 37);
    CHECK(clipped[1].content.find("[...clipped]") != std::string::npos);
}

TEST_CASE("prompt rendering") {
    CHECK(render_template("a {x} b {y}", {{"x", "1"}, {"y", "{x}"}}) == "a 1 b {x}");
    CHECK(render_template("no placeholders", {}) == "no placeholders");
    CHECK_THROWS_WITH_AS(render_template("{a}{b}", {{"a", ""}}), doctest::Contains("b"), PreconditionError);
    CHECK(prompt_placeholders(PromptId::PlannerUpdate) ==
          std::vector<std::string>{"plan", "task_id", "task", "commands", "summary"});
    CHECK(prompt_placeholders(PromptId::ExecutorRetry).empty());
    const auto cf = render_prompt(PromptId::PlannerCounterfactual, {{"findings", "Port 21/ftp: x (CVE-2011-2523)"}, {"plan", "P"}});
    CHECK(cf.rfind(kCounterfactualLead, 0) == 0);
    CHECK(cf.find("Port 21/ftp: x (CVE-2011-2523)") != std::string::npos);
    const auto guide = render_prompt(PromptId::InstructorGuidance, {{"task", "T"}, {"excerpts", "E"}});
    CHECK(guide == "Here is a brief introduction to the task: T. Here is some info from the knowledge base for your reference:\nE");
}

TEST_CASE("http backend sends a chat completion request") {
    net::deny_all(false);
    testing::StubServer stub;
    std::string seen_auth;
    std::string seen_body;
    stub.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = req.body;
        res.set_content(kCompletion, "application/json");
    });
    stub.start();

    HttpBackend backend({stub.url("/v1/"), "sk-test", 5, 3, 0.0});
    ChatRequest req;
    req.model = "gpt-4-turbo";
    req.messages = history("hi");
    CHECK(backend.complete(req) == "Next task: 2.1");
    CHECK(seen_auth == "Bearer sk-test");
    const auto body = json::parse(seen_body);
    CHECK(body["model"] == "gpt-4-turbo");
    CHECK(body["temperature"] == 0);
    CHECK(body["messages"][1]["content"] == "hi");
    CHECK(body["messages"][0]["role"] == "system");
}

TEST_CASE("http backend surfaces auth failures with their status") {
    net::deny_all(false);
    testing::StubServer stub;
    std::atomic<int> hits{0};
    stub.server.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 401;
        res.set_content("{\"error\":\"bad key\"}", "application/json");
    });
    stub.start();
    HttpBackend backend({stub.url(), "wrong", 5, 3, 0.0});
    try {
        backend.complete(ChatRequest{});
        FAIL("expected AuthError");
    } catch (const AuthError& e) {
        CHECK(e.status() == 401);
        CHECK(std::string(e.what()).find("HTTP 401") != std::string::npos);
    }
    CHECK(hits == 1);
}

TEST_CASE("http backend retries throttling and server errors") {
    net::deny_all(false);
    testing::StubServer stub;
    std::atomic<int> hits{0};
    stub.server.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        const int n = ++hits;
        if (n == 1) {
            res.status = 429;
        } else if (n == 2) {
            res.status = 500;
        } else {
            res.set_content(kCompletion, "application/json");
        }
    });
    stub.start();
    HttpBackend backend({stub.url(), "", 5, 3, 0.0});
    CHECK(backend.complete(ChatRequest{}) == "Next task: 2.1");
    CHECK(hits == 3);

    testing::StubServer busy;
    busy.server.Post("/chat/completions", [](const httplib::Request&, httplib::Response& res) { res.status = 429; });
    busy.start();
    HttpBackend impatient({busy.url(), "", 5, 2, 0.0});
    try {
        impatient.complete(ChatRequest{});
        FAIL("expected HttpError");
    } catch (const AuthError&) {
        FAIL("not an auth failure");
    } catch (const HttpError& e) {
        CHECK(e.status() == 429);
    }
}

TEST_CASE("http backend honours the network guard") {
    net::deny_all(true);
    net::reset_attempts();
    HttpBackend backend({"http://127.0.0.1:9/v1", "", 1, 3, 0.0});
    CHECK_THROWS_AS(backend.complete(ChatRequest{}), net::NetworkDenied);
    CHECK(net::attempts() == 1);
    net::deny_all(false);
    net::reset_attempts();
    CHECK_THROWS_AS(HttpBackend({"", "", 1, 1, 0.0}), ConfigError);
}

}  // TEST_SUITE
