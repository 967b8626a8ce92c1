// Acceptance checks: one PASS/FAIL line per criterion, exit 1 if any fails.
// Tolerances are pinned next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cases/parser_cases.hpp"
#include "cases/sim_walkthroughs.hpp"
#include "penheal/app/pipeline.hpp"
#include "penheal/core/text.hpp"
#include "penheal/kb/kb.hpp"
#include "penheal/llm/prompts.hpp"
#include "penheal/net_guard.hpp"
#include "penheal/remediation/cvss.hpp"
#include "penheal/remediation/knapsack.hpp"
#include "penheal/scoring/scoring.hpp"
#include "penheal/sim/sim.hpp"

using namespace penheal;
using Clock = std::chrono::steady_clock;

namespace {

std::string source_path(const std::string& rel) { return std::string(PENHEAL_SOURCE_DIR) + "/" + rel; }

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

long tenths(double score) { return std::lround(score * 10.0); }

// 1. CVSS: frozen oracle table (200 random vectors plus anchors), one-decimal equality, < 1 s.
Outcome cvss_oracle() {
    Outcome o;
    std::ifstream in(source_path("tests/data/cvss_oracle.csv"));
    if (!in) {
        o.fail("tests/data/cvss_oracle.csv missing");
        return o;
    }
    const auto start = Clock::now();
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const auto vector = line.substr(0, comma);
        const double expected = std::stod(line.substr(comma + 1));
        try {
            const double got = cvss::base_score(cvss::parse_vector(vector));
            if (tenths(got) != tenths(expected)) o.fail(vector + " scored " + text::format_fixed(got, 1));
        } catch (const std::exception& e) {
            o.fail(vector + ": " + e.what());
        }
        ++rows;
    }
    const std::pair<const char*, double> anchors[] = {
        {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N", 0.0},
        {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", 9.8},
        {"CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", 9.8},
    };
    for (const auto& [vector, expected] : anchors) {
        if (tenths(cvss::base_score(cvss::parse_vector(vector))) != tenths(expected)) o.fail(std::string("anchor ") + vector);
    }
    const double secs = seconds_since(start);
    if (rows < 200) o.fail("only " + std::to_string(rows) + " oracle rows");
    if (secs >= 1.0) o.fail("took " + text::format_fixed(secs, 2) + " s");
    if (o.pass) o.detail = std::to_string(rows) + " oracle rows + 3 anchors, " + text::format_fixed(secs * 1000, 0) + " ms";
    return o;
}

// 2. Group knapsack vs exhaustive enumeration: 500 instances, exact totals, < 5 s.
Outcome knapsack_oracle() {
    Outcome o;
    std::mt19937 rng(7001);
    std::uniform_int_distribution<int> n_groups(1, 4), n_cands(1, 4), cost_pick(0, 2), budget_pick(0, 40), hundredths(0, 1800);
    const double costs[] = {2.0, 5.0, 10.0};
    const auto start = Clock::now();
    for (int t = 0; t < 500 && o.pass; ++t) {
        std::vector<RecommendationGroup> groups(static_cast<std::size_t>(n_groups(rng)));
        for (std::size_t g = 0; g < groups.size(); ++g) {
            groups[g].vuln = {"CVE-NA", "svc" + std::to_string(g), static_cast<int>(g)};
            const int nc = n_cands(rng);
            for (int c = 0; c < nc; ++c) {
                Recommendation r;
                r.text = "r" + std::to_string(c);
                r.cost = costs[cost_pick(rng)];
                r.value = hundredths(rng) / 100.0;
                groups[g].candidates.push_back(r);
            }
        }
        const double budget = budget_pick(rng);

        // Exhaustive: odometer over (candidate index or skip) per group, in integer hundredths.
        long best = 0;
        std::vector<std::size_t> pick(groups.size(), 0);
        for (;;) {
            long cost = 0, value = 0;
            for (std::size_t g = 0; g < groups.size(); ++g) {
                if (pick[g] < groups[g].candidates.size()) {
                    cost += std::lround(groups[g].candidates[pick[g]].cost * 100);
                    value += std::lround(groups[g].candidates[pick[g]].value * 100);
                }
            }
            if (cost <= std::lround(budget * 100)) best = std::max(best, value);
            std::size_t g = 0;
            while (g < groups.size() && ++pick[g] > groups[g].candidates.size()) pick[g++] = 0;
            if (g == groups.size()) break;
        }

        const auto sel = remediation::select(groups, budget);
        long value = 0;
        double cost = 0.0;
        for (const auto& g : sel.groups) {
            int adopted = 0;
            for (const auto& c : g.candidates) {
                if (c.status == RecommendationStatus::Adopted) {
                    ++adopted;
                    value += std::lround(c.value * 100);
                    cost += c.cost;
                } else if (c.status != RecommendationStatus::Discarded) {
                    o.fail("instance " + std::to_string(t) + ": candidate left Proposed");
                }
            }
            if (adopted > 1) o.fail("instance " + std::to_string(t) + ": two adoptions in one group");
        }
        if (cost > budget + 1e-9) o.fail("instance " + std::to_string(t) + ": over budget");
        if (value != best) {
            o.fail("instance " + std::to_string(t) + ": value " + std::to_string(value) + " vs brute force " + std::to_string(best));
        }
    }
    const double secs = seconds_since(start);
    if (secs >= 5.0) o.fail("took " + text::format_fixed(secs, 2) + " s");
    if (o.pass) o.detail = "500 instances exact, " + text::format_fixed(secs * 1000, 0) + " ms";
    return o;
}

// 3. The four Samba candidates under budget 3: exactly one of update/firewall.
Outcome listing_selection() {
    Outcome o;
    RecommendationGroup g;
    g.vuln = {"CVE-2007-2447", "samba", 139};
    const std::pair<const char*, std::pair<double, double>> cands[] = {
        {"Update Samba to the latest version", {2, 9}},
        {"Perform regular security audits", {2, 3}},
        {"Shut down the Samba service", {10, 9}},
        {"Configure the firewall to restrict SMB", {2, 9}},
    };
    for (const auto& [text, cv] : cands) {
        Recommendation r;
        r.text = text;
        r.cost = cv.first;
        r.value = cv.second;
        g.candidates.push_back(r);
    }
    const auto sel = remediation::select({g}, 3.0);
    const auto& c = sel.groups.at(0).candidates;
    auto adopted = [&](std::size_t i) { return c[i].status == RecommendationStatus::Adopted; };
    if (adopted(0) == adopted(3)) o.fail("update/firewall adoption is not exactly one");
    if (c[1].status != RecommendationStatus::Discarded) o.fail("audit not discarded");
    if (c[2].status != RecommendationStatus::Discarded) o.fail("shutdown not discarded");
    if (o.pass) o.detail = std::string("adopted \"") + (adopted(0) ? c[0].text : c[3].text) + "\"";
    return o;
}

std::string findings_bytes(const std::vector<Vulnerability>& f) {
    RunArtifact a;
    a.findings = f;
    return serialize_run(a);
}

// 4. Hermetic golden run: 6 of 10, S_D == 6.0, 5 byte-identical runs, no network, < 10 s.
Outcome golden_run() {
    Outcome o;
    try {
        const auto cfg = app::load_config(source_path("configs/hermetic.json"));
        net::reset_attempts();
        const auto start = Clock::now();
        std::string first;
        double s_d = -1;
        for (int i = 0; i < 5; ++i) {
            auto services = app::make_services(cfg);
            const auto res = app::run_pipeline(cfg, services);
            if (res.fatal) {
                o.fail("run " + std::to_string(i + 1) + ": " + *res.fatal);
                return o;
            }
            const auto bytes = findings_bytes(res.artifact.findings);
            if (i == 0) {
                first = bytes;
                s_d = res.artifact.score_report->s_d;
                if (res.artifact.score_report->found_count != 6) o.fail(std::to_string(res.artifact.score_report->found_count) + " of 10 found");
            } else if (bytes != first) {
                o.fail("run " + std::to_string(i + 1) + " findings differ");
            }
        }
        const double secs = seconds_since(start);
        if (s_d != 6.0) o.fail("S_D = " + text::format_fixed(s_d, 4));
        if (net::attempts() != 0) o.fail(std::to_string(net::attempts()) + " network attempts");
        if (secs >= 10.0) o.fail("took " + text::format_fixed(secs, 2) + " s");
        if (o.pass) o.detail = "6/10, S_D 6.00, 5 identical runs, 0 network calls, " + text::format_fixed(secs, 2) + " s";
    } catch (const std::exception& e) {
        o.fail(e.what());
    }
    return o;
}

// 5. Aggregation arithmetic, tolerance 1e-9.
Outcome scoring_arithmetic() {
    Outcome o;
    const double sum = scoring::overall(2.00, 5.07, 6.13, AggregationMode::Sum);
    const double div3 = scoring::overall(2.00, 5.07, 6.13, AggregationMode::DividedByThree);
    if (std::abs(sum - 0.94) > 1e-9) o.fail("Sum gave " + text::format_fixed(sum, 12));
    if (std::abs(div3 - 0.94 / 3.0) > 1e-9) o.fail("DividedByThree gave " + text::format_fixed(div3, 12));
    if (o.pass) o.detail = "Sum " + text::format_fixed(sum, 2) + ", DividedByThree " + text::format_fixed(div3, 10);
    return o;
}

// 6. Counterfactual prompt exactly at iterations with new findings; afterwards
// no ToDo task names a found CVE id.
Outcome counterfactual_trigger() {
    Outcome o;
    int prompts = 0;
    for (const char* name : {"hermetic", "zero_exploit", "duplicate"}) {
        try {
            const auto cfg = app::load_config(source_path(std::string("configs/") + name + ".json"));
            auto services = app::make_services(cfg);
            std::vector<pentest::IterationEvent> events;
            app::PipelineOptions opt;
            opt.remediate = false;
            opt.score = false;
            opt.observer = [&](const pentest::IterationEvent& ev) { events.push_back(ev); };
            const auto res = app::run_pipeline(cfg, services, opt);
            if (res.fatal) {
                o.fail(std::string(name) + ": " + *res.fatal);
                continue;
            }
            std::multiset<int> prompted;
            for (const auto& e : res.transcript.exchanges()) {
                if (e.role == AgentRole::Planner && text::istarts_with(e.messages.back().content, llm::kCounterfactualLead) &&
                    e.tag.rfind("iteration=", 0) == 0) {
                    prompted.insert(std::stoi(e.tag.substr(10)));
                } else if (e.messages.back().content.find(llm::kCounterfactualLead) != std::string::npos) {
                    o.fail(std::string(name) + ": counterfactual text outside a tagged Planner prompt");
                }
            }
            std::multiset<int> expected;
            std::set<std::string> found_ids;
            for (const auto& ev : events) {
                for (const auto& f : ev.new_findings) {
                    if (f.id != kCveNa) found_ids.insert(f.id);
                }
                if (!ev.new_findings.empty()) {
                    expected.insert(ev.iteration);
                    for (const auto* n : ev.plan.depth_first()) {
                        if (n->status != TaskStatus::ToDo) continue;
                        for (const auto& id : found_ids) {
                            if (text::to_lower(n->description).find(text::to_lower(id)) != std::string::npos) {
                                o.fail(std::string(name) + ": task " + n->id + " still ToDo after iteration " +
                                       std::to_string(ev.iteration) + " names " + id);
                            }
                        }
                    }
                }
            }
            if (prompted != expected) o.fail(std::string(name) + ": prompts do not match the iterations with new findings");
            prompts += static_cast<int>(prompted.size());
        } catch (const std::exception& e) {
            o.fail(std::string(name) + ": " + e.what());
        }
    }
    if (o.pass) o.detail = "3 fixture runs, " + std::to_string(prompts) + " prompts, all at finding iterations";
    return o;
}

// 7. Parser tables, exact.
Outcome parser_suites() {
    Outcome o;
    auto run = [&](const auto& table, std::size_t minimum, const char* what, auto label) {
        if (table.size() < minimum) o.fail(std::string(what) + ": only " + std::to_string(table.size()) + " cases");
        for (const auto& c : table) {
            const auto diff = cases::check(c);
            if (!diff.empty()) o.fail(std::string(what) + " \"" + label(c) + "\": " + diff);
        }
    };
    run(cases::command_cases(), 20, "command", [](const auto& c) { return std::string(c.input); });
    run(cases::vector_cases(), 15, "vector", [](const auto& c) { return std::string(c.text); });
    run(cases::extractor_cases(), 10, "extractor", [](const auto& c) { return std::string(c.text); });
    bool has_cve_na = false;
    for (const auto& c : cases::extractor_cases()) has_cve_na = has_cve_na || std::string(c.text).find("Exploited: CVE-NA") != std::string::npos;
    if (!has_cve_na) o.fail("no \"Exploited: CVE-NA\" case");
    if (o.pass) {
        o.detail = std::to_string(cases::command_cases().size()) + " command, " + std::to_string(cases::vector_cases().size()) +
                   " vector, " + std::to_string(cases::extractor_cases().size()) + " extractor cases";
    }
    return o;
}

// 8. retrieve(q, k) equals an exhaustive cosine scan, ties by (doc_id, seq); < 2 s.
Outcome retrieval_oracle() {
    Outcome o;
    std::mt19937 rng(424242);
    const std::vector<std::string> words = {"ftp", "samba", "irc", "shell", "root", "nmap", "sql", "telnet", "php", "nfs"};
    auto sentence = [&](int n) {
        std::string s;
        for (int i = 0; i < n; ++i) s += words[rng() % words.size()] + " ";
        return s;
    };
    kb::Index index;
    for (int d = 0; d < 100; ++d) index.ingest(sentence(1 + static_cast<int>(rng() % 3)), "doc" + std::to_string(d), 400, 100);
    if (index.size() != 100) {
        o.fail(std::to_string(index.size()) + " chunks, expected 100");
        return o;
    }
    const auto chunks = index.chunks();
    const auto start = Clock::now();
    int ties = 0;
    for (int q = 0; q < 50; ++q) {
        const auto query = sentence(1 + q % 3);
        const auto qv = index.embedder().embed(query);
        std::vector<std::tuple<double, std::string, int>> scan;
        for (const auto& c : chunks) {
            double dot = 0, na = 0, nb = 0;
            for (std::size_t i = 0; i < qv.size(); ++i) {
                dot += double(qv[i]) * c.vector[i];
                na += double(qv[i]) * qv[i];
                nb += double(c.vector[i]) * c.vector[i];
            }
            const double cos = na == 0 || nb == 0 ? 0.0 : dot / std::sqrt(na * nb);
            scan.emplace_back(cos, c.doc_id, c.seq);
        }
        // Similarities within 1e-12 count as tied and fall back to (doc_id, seq).
        std::stable_sort(scan.begin(), scan.end(), [](const auto& a, const auto& b) {
            if (std::abs(std::get<0>(a) - std::get<0>(b)) > 1e-12) return std::get<0>(a) > std::get<0>(b);
            return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
        });
        const std::size_t k = 10;
        const auto got = index.retrieve(query, k);
        for (std::size_t i = 0; i < k; ++i) {
            if (i > 0 && std::abs(std::get<0>(scan[i]) - std::get<0>(scan[i - 1])) <= 1e-12) ++ties;
            if (got.size() != k || got[i].chunk.doc_id != std::get<1>(scan[i]) || got[i].chunk.seq != std::get<2>(scan[i]) ||
                std::abs(got[i].similarity - std::get<0>(scan[i])) > 1e-9) {
                o.fail("query \"" + query + "\" rank " + std::to_string(i) + " differs");
                break;
            }
        }
    }
    const double secs = seconds_since(start);
    if (secs >= 2.0) o.fail("took " + text::format_fixed(secs, 2) + " s");
    if (ties == 0) o.fail("the synthetic corpus produced no ties");
    if (o.pass) o.detail = "100 chunks x 50 queries, " + std::to_string(ties) + " tied ranks, " + text::format_fixed(secs * 1000, 0) + " ms";
    return o;
}

// 9. Walkthroughs reach all 10 rows, nmap lists exactly the 10 ports, outputs repeat exactly.
Outcome simulator_walkthroughs() {
    Outcome o;
    const sim::Simulator target(sim::HostModel::builtin(), "10.0.2.4");
    std::set<int> reached;
    std::vector<std::string> first, second;
    for (const auto& w : cases::walkthroughs()) {
        const auto st = cases::run_steps(target, w.steps, {}, &first);
        cases::run_steps(target, w.steps, {}, &second);
        if (st.triggered_truth != std::set<int>{w.truth_row}) o.fail(std::string("walk \"") + w.steps.front().command + "\" missed its row");
        reached.insert(st.triggered_truth.begin(), st.triggered_truth.end());
    }
    if (reached.size() != 10) o.fail("reached " + std::to_string(reached.size()) + " of 10 rows");
    if (first != second) o.fail("outputs differ between repeated runs");

    const auto scan = target.simulate("nmap -p- 10.0.2.4", false, {});
    std::vector<int> ports;
    for (auto line : text::split_lines(scan.output)) {
        const auto slash = line.find("/tcp");
        if (slash != std::string_view::npos && slash > 0 && std::isdigit(static_cast<unsigned char>(line[0]))) {
            ports.push_back(std::stoi(std::string(line.substr(0, slash))));
        }
    }
    if (ports != std::vector<int>{21, 22, 23, 25, 53, 80, 2049, 3306, 5432, 6667}) o.fail("nmap -p- listed other ports");
    if (target.simulate("nmap -p- 10.0.2.4", false, {}).output != scan.output) o.fail("nmap output not deterministic");
    if (o.pass) o.detail = std::to_string(cases::walkthroughs().size()) + " walkthroughs, 10/10 rows, 10 ports";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"CVSS oracle suite", cvss_oracle},
        {"knapsack oracle", knapsack_oracle},
        {"Samba candidate selection under budget 3", listing_selection},
        {"hermetic golden run", golden_run},
        {"scoring arithmetic", scoring_arithmetic},
        {"counterfactual trigger property", counterfactual_trigger},
        {"parser suites", parser_suites},
        {"retrieval oracle", retrieval_oracle},
        {"simulator walkthroughs", simulator_walkthroughs},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("threw: ") + e.what());
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail << "\n";
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
