#include "penheal/app/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "penheal/core/json.hpp"
#include "penheal/core/text.hpp"
#include "penheal/net_guard.hpp"
#include "penheal/pentest/plan_protocol.hpp"
#include "penheal/scoring/scoring.hpp"
#include "penheal/sim/sim.hpp"

namespace fs = std::filesystem;

namespace penheal::app {

std::shared_ptr<const kb::Index> load_knowledge_base(const AppConfig& cfg) {
    if (!cfg.kb.empty()) return std::make_shared<kb::Index>(kb::Index::load(cfg.kb));
    if (!cfg.kb_corpus.empty()) {
        if (!fs::exists(cfg.kb_corpus)) throw ConfigError("kb_corpus", "no such file or directory: " + cfg.kb_corpus);
        auto index = std::make_shared<kb::Index>();
        kb::ingest_path(*index, cfg.kb_corpus);
        return index;
    }
    return nullptr;
}

Services make_services(const AppConfig& cfg) {
    Services s;
    s.kb = load_knowledge_base(cfg);
    if (cfg.mode == Mode::Hermetic) {
        net::deny_all(true);
        const auto transcript = (fs::path(cfg.fixtures) / kTranscriptFile).string();
        if (!fs::is_regular_file(transcript)) throw ConfigError("fixtures", "no transcript at " + transcript);
        s.llm = llm::ReplayBackend::from_file(transcript);
        if (!cfg.nvd.fixtures.empty()) s.cves = std::make_unique<remediation::FixtureCveSource>(cfg.nvd.fixtures);
    } else {
        llm::HttpOptions o;
        o.endpoint = cfg.llm.endpoint;
        o.api_key = cfg.llm.api_key;
        o.timeout_seconds = cfg.llm.timeout_seconds;
        o.max_attempts = cfg.llm.max_attempts;
        s.llm = std::make_shared<llm::HttpBackend>(o);
        remediation::NvdOptions n;
        n.base_url = cfg.nvd.base_url;
        n.api_key = cfg.nvd.api_key;
        n.cache_dir = cfg.nvd.cache_dir;
        s.cves = std::make_unique<remediation::NvdClient>(n);
    }
    if (cfg.executor == ExecutorKind::Simulator) {
        auto model = cfg.host_model.empty() ? sim::HostModel::builtin() : sim::HostModel::load(cfg.host_model);
        s.executor = std::make_unique<pentest::SimBackend>(sim::Simulator(std::move(model), cfg.run.target_address));
    } else {
        s.executor = std::make_unique<pentest::ShellBackend>(cfg.msfconsole);
    }
    return s;
}

int PipelineResult::exit_code() const {
    if (fatal) return 1;
    return artifact.warnings.empty() ? 0 : 2;
}

std::vector<Vulnerability> load_truth(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read truth file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        auto doc = json::parse(ss.str());
        const json& list = doc.is_object() ? doc.at("ground_truth") : doc;
        return list.get<std::vector<Vulnerability>>();
    } catch (const json::exception& e) {
        throw ParseError("truth file " + path + ": " + e.what(), 0);
    }
}

std::string derive_run_id(const RunArtifact& artifact) {
    json j{{"plan", artifact.plan}, {"findings", artifact.findings}};
    return "run-" + text::sha256_hex(j.dump()).substr(0, 12);
}

namespace {

// Execution summaries that mention the finding's service or port; the
// Estimator reads them as evidence.
std::string context_for(const Vulnerability& v, const pentest::PentestHistory& history) {
    std::vector<std::string> parts;
    std::size_t total = 0;
    const std::string port = v.port ? std::to_string(*v.port) : std::string();
    for (const auto& r : history.records()) {
        const std::string hay = r.command.raw + "\n" + r.summary;
        const bool hit = text::icontains(hay, v.service) || (!port.empty() && hay.find(port) != std::string::npos);
        if (!hit) continue;
        std::string piece = "$ " + r.command.raw + "\n" + r.summary;
        if (total + piece.size() > 3000) break;
        total += piece.size();
        parts.push_back(std::move(piece));
    }
    return text::join(parts, "\n\n");
}

}  // namespace

PipelineResult run_pipeline(const AppConfig& cfg, Services& services, const PipelineOptions& opt) {
    PipelineResult res;
    RunArtifact& a = res.artifact;
    a.plan = opt.plan;
    a.findings = opt.findings;
    a.transcript_ref = std::string(kTranscriptFile);
    llm::Gateway gw(services.llm, llm::GatewayOptions::from(cfg.run));

    if (opt.pentest) {
        try {
            pentest::PentestOptions po;
            po.kb = services.kb.get();
            po.history_path = opt.history_path;
            po.observer = opt.observer;
            auto pr = pentest::run_pentest(cfg.run, gw, *services.executor, po);
            a.plan = pr.plan;
            a.findings = pr.findings;
            a.termination = std::string(pentest::to_string(pr.termination));
            a.warnings.insert(a.warnings.end(), pr.warnings.begin(), pr.warnings.end());
            res.notes.insert(res.notes.end(), pr.notes.begin(), pr.notes.end());
            if (pr.abort_error) res.fatal = "pentest aborted: " + *pr.abort_error;
            res.pentest = std::move(pr);
        } catch (const Error& e) {
            res.fatal = std::string("pentest failed: ") + e.what();
        }
    }

    if (opt.remediate && !res.fatal) {
        try {
            std::vector<std::string> contexts;
            if (res.pentest) {
                for (const auto& f : a.findings) contexts.push_back(context_for(f, res.pentest->history));
            }
            gw.set_tag("remediation");
            auto rr = remediation::remediate(a.findings, cfg.run, gw, services.cves.get(), contexts);
            if (!rr.findings.empty()) a.findings = rr.findings;
            a.recommendations = rr.groups;
            a.warnings.insert(a.warnings.end(), rr.warnings.begin(), rr.warnings.end());
            res.notes.insert(res.notes.end(), rr.notes.begin(), rr.notes.end());
            res.remediation = std::move(rr);
        } catch (const Error& e) {
            res.fatal = std::string("remediation failed: ") + e.what();
        }
    }

    if (opt.score) {
        if (cfg.truth.empty()) {
            res.notes.push_back("no truth file configured; scores not computed");
        } else {
            try {
                std::vector<Recommendation> adopted;
                for (const auto& g : a.recommendations) {
                    for (const auto& c : g.candidates) {
                        if (c.status == RecommendationStatus::Adopted) adopted.push_back(c);
                    }
                }
                a.score_report = scoring::score_run(a.findings, load_truth(cfg.truth), adopted,
                                                    cfg.run.aggregation_mode, derive_run_id(a));
            } catch (const Error& e) {
                res.fatal = std::string("scoring failed: ") + e.what();
            }
        }
    }
    if (res.fatal) a.warnings.push_back(*res.fatal);

    res.transcript = gw.transcript();
    res.report = render_report(res);
    return res;
}

std::string render_report(const PipelineResult& res) {
    const auto& a = res.artifact;
    std::ostringstream os;
    os << "== Attack plan ==\n" << (a.plan.roots.empty() ? std::string("(none)") : pentest::render_plan(a.plan)) << "\n";
    if (!a.termination.empty()) os << "Terminated: " << a.termination << "\n";
    if (res.pentest) {
        os << "Iterations: " << res.pentest->iterations << ", commands executed: " << res.pentest->history.records().size()
           << "\n";
    }
    os << "\n== Findings (" << a.findings.size() << ") ==\n";
    for (const auto& f : a.findings) {
        os << "- " << f.id << " " << f.service << "/" << (f.port ? std::to_string(*f.port) : std::string("?"));
        if (f.cvss) os << " CVSS " << text::format_fixed(f.cvss->base_score, 1) << " (" << to_string(f.cvss_source) << ")";
        if (!f.description.empty()) os << ": " << f.description;
        os << "\n";
    }
    os << "\n== Recommendations ==\n";
    if (a.recommendations.empty()) {
        os << "(none)\n";
    } else {
        os << remediation::render_recommendations(a.recommendations);
    }
    if (res.remediation) {
        os << "Budget " << text::format_fixed(res.remediation->budget, 1) << ", used "
           << text::format_fixed(res.remediation->budget_used, 1) << ", total value "
           << text::format_fixed(res.remediation->total_value, 2) << "\n";
    }
    if (a.score_report) os << "\n== Scores ==\n" << scoring::render_table(*a.score_report);
    if (!res.notes.empty()) {
        os << "\n== Notes ==\n";
        for (const auto& n : res.notes) os << "- " << n << "\n";
    }
    if (!a.warnings.empty()) {
        os << "\n== Warnings ==\n";
        for (const auto& w : a.warnings) os << "- " << w << "\n";
    }
    return os.str();
}

void write_outputs(const PipelineResult& result, const std::string& dir) {
    fs::create_directories(dir);
    save_run(result.artifact, (fs::path(dir) / kArtifactFile).string());
    std::ofstream(fs::path(dir) / kReportFile, std::ios::binary | std::ios::trunc) << result.report;
    result.transcript.save((fs::path(dir) / kTranscriptFile).string());
}

}  // namespace penheal::app
