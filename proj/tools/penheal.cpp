// penheal: pentest -> remediate -> score from the command line.
//
// Exit codes: 0 clean, 2 finished with warnings, 1 fatal.

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "penheal/app/pipeline.hpp"
#include "penheal/core/artifact.hpp"
#include "penheal/core/text.hpp"
#include "penheal/kb/kb.hpp"
#include "penheal/net_guard.hpp"
#include "penheal/scoring/scoring.hpp"

namespace fs = std::filesystem;
using namespace penheal;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> target;
    std::optional<double> budget_per_vuln;
    std::optional<std::string> mode;
    std::optional<std::string> fixtures;
    std::optional<std::string> kb;
    std::optional<std::string> out;
    std::optional<std::string> aggregation;
};

void add_run_flags(CLI::App& sub, Overrides& o) {
    sub.add_option("--config", o.config, "Config file (JSON)");
    sub.add_option("--target", o.target, "Target address");
    sub.add_option("--budget-per-vuln", o.budget_per_vuln, "Remediation budget per vulnerability")
        ->check(CLI::Range(0.0, 1000.0));
    sub.add_option("--mode", o.mode, "live or hermetic")->check(CLI::IsMember({"live", "hermetic"}));
    sub.add_option("--fixtures", o.fixtures, "Replay fixture directory");
    sub.add_option("--kb", o.kb, "Knowledge-base index directory");
    sub.add_option("--out", o.out, "Output directory");
    sub.add_option("--aggregation", o.aggregation, "div3 or sum")->check(CLI::IsMember({"div3", "sum"}));
}

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

app::AppConfig resolve(const Overrides& o) {
    app::AppConfig cfg = o.config.empty() ? app::AppConfig{} : app::load_config(o.config);
    if (o.target) cfg.run.target_address = *o.target;
    if (o.budget_per_vuln) cfg.run.budget_per_vuln = *o.budget_per_vuln;
    if (o.mode) cfg.mode = *o.mode == "live" ? app::Mode::Live : app::Mode::Hermetic;
    if (o.fixtures) cfg.fixtures = absolute(*o.fixtures);
    if (o.kb) cfg.kb = absolute(*o.kb);
    if (o.out) cfg.out = absolute(*o.out);
    if (o.aggregation) cfg.run.aggregation_mode = *aggregation_mode_from(*o.aggregation);
    app::check_config(cfg);
    return cfg;
}

void print_event(const pentest::IterationEvent& ev) {
    std::cout << "[" << ev.iteration << "] " << ev.task_id << " " << ev.task_description << " (" << ev.commands
              << (ev.commands == 1 ? " command" : " commands") << ")";
    for (const auto& f : ev.new_findings) std::cout << " +" << f.id << " " << f.service;
    if (ev.counterfactual) std::cout << " [counterfactual]";
    std::cout << "\n";
}

int finish(const app::PipelineResult& res, const app::AppConfig& cfg) {
    app::write_outputs(res, cfg.out);
    std::cout << res.report;
    std::cout << "\nartifact: " << (fs::path(cfg.out) / app::kArtifactFile).string() << "\n";
    if (res.fatal) std::cerr << "error: " << *res.fatal << "\n";
    return res.exit_code();
}

int cmd_pipeline(const Overrides& o, bool pentest, bool remediate, bool score, const std::string& artifact_in) {
    const auto cfg = resolve(o);
    auto services = app::make_services(cfg);
    app::PipelineOptions opt;
    opt.pentest = pentest;
    opt.remediate = remediate;
    opt.score = score;
    opt.observer = print_event;
    std::string termination;
    if (pentest) {
        fs::create_directories(cfg.out);
        opt.history_path = (fs::path(cfg.out) / app::kHistoryFile).string();
    } else {
        const auto path = artifact_in.empty() ? (fs::path(cfg.out) / app::kArtifactFile).string() : artifact_in;
        const auto input = load_run(path);
        opt.findings = input.findings;
        opt.plan = input.plan;
        termination = input.termination;
    }
    auto res = app::run_pipeline(cfg, services, opt);
    if (!pentest) res.artifact.termination = termination;
    return finish(res, cfg);
}

int cmd_score(const std::vector<std::string>& artifacts, std::string truth_path, const std::string& config,
              const std::optional<std::string>& aggregation, bool repeat_mean) {
    AggregationMode mode = AggregationMode::DividedByThree;
    if (!config.empty()) {
        const auto cfg = app::load_config(config);
        mode = cfg.run.aggregation_mode;
        if (truth_path.empty()) truth_path = cfg.truth;
    }
    if (aggregation) mode = *aggregation_mode_from(*aggregation);
    if (truth_path.empty()) throw ConfigError("truth", "no truth file given (--truth or the config's truth)");
    if (artifacts.size() > 1 && !repeat_mean) throw ConfigError("--repeat-mean", "several artifacts need --repeat-mean");
    const auto truth = app::load_truth(truth_path);

    std::vector<ScoreReport> reports;
    for (const auto& path : artifacts) {
        const auto run = load_run(path);
        std::vector<Recommendation> adopted;
        for (const auto& g : run.recommendations) {
            for (const auto& c : g.candidates) {
                if (c.status == RecommendationStatus::Adopted) adopted.push_back(c);
            }
        }
        reports.push_back(scoring::score_run(run.findings, truth, adopted, mode, app::derive_run_id(run)));
        if (repeat_mean) std::cout << path << ": " << reports.back().run_id << "\n";
    }
    const auto report = repeat_mean ? scoring::mean_report(reports, mode) : reports.front();
    std::cout << scoring::render_table(report);
    return 0;
}

int cmd_ingest(const std::vector<std::string>& paths, const std::string& kb_dir) {
    kb::Index index = fs::exists(fs::path(kb_dir) / "meta.json") ? kb::Index::load(kb_dir) : kb::Index{};
    std::vector<std::string> warnings;
    std::size_t added = 0;
    for (const auto& p : paths) {
        if (!fs::exists(p)) throw Error("no such file or directory: " + p);
        added += kb::ingest_path(index, p, kb::kDefaultChunkSize, kb::kDefaultOverlap, &warnings);
    }
    index.save(kb_dir);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    std::cout << added << " chunks ingested; " << kb_dir << " holds " << index.size() << " chunks\n";
    return warnings.empty() ? 0 : 2;
}

int cmd_replay(const std::string& transcript_path, const Overrides& o) {
    const auto transcript = llm::Transcript::load(transcript_path);
    std::size_t n = 0;
    for (const auto& e : transcript.exchanges()) {
        if (e.seq != n) throw Error("exchange " + std::to_string(n + 1) + ": seq " + std::to_string(e.seq) + ", expected " + std::to_string(n));
        const auto hash = llm::request_hash(e.role, e.messages);
        if (hash != e.request_hash) {
            throw Error("exchange " + std::to_string(e.seq) + " (" + std::string(to_string(e.role)) +
                        "): request hash does not match its messages");
        }
        ++n;
    }
    std::cout << transcript_path << ": " << n << " exchanges, hashes consistent\n";
    if (o.config.empty()) return 0;

    // Re-run the configured hermetic pipeline against this transcript only.
    auto cfg = resolve(o);
    if (cfg.mode != app::Mode::Hermetic) throw ConfigError("mode", "replay verification runs in hermetic mode");
    auto services = app::make_services(cfg);
    auto replay = std::make_shared<llm::ReplayBackend>(transcript);
    services.llm = replay;
    const auto res = app::run_pipeline(cfg, services);
    if (res.fatal) throw Error("replay run failed: " + *res.fatal);
    if (replay->remaining() != 0) {
        throw Error(std::to_string(replay->remaining()) + " recorded responses were never requested");
    }
    std::cout << "replay run consumed every exchange; " << res.artifact.findings.size() << " findings\n";
    return res.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"penheal: automated penetration testing and remediation planning"};
    cli.require_subcommand(1, 1);

    Overrides o;
    std::string artifact_in;
    auto* pentest = cli.add_subcommand("pentest", "Run the penetration-testing stage");
    add_run_flags(*pentest, o);
    auto* remediate = cli.add_subcommand("remediate", "Recommend fixes for the findings of a run artifact");
    add_run_flags(*remediate, o);
    remediate->add_option("--artifact", artifact_in, "Input artifact (default: <out>/run.json)")->check(CLI::ExistingFile);
    auto* run = cli.add_subcommand("run", "Pentest, remediate and score");
    add_run_flags(*run, o);

    std::vector<std::string> score_artifacts;
    std::string truth;
    bool repeat_mean = false;
    auto* score = cli.add_subcommand("score", "Score one run artifact, or average several");
    score->add_option("artifacts", score_artifacts, "Run artifacts")->required()->check(CLI::ExistingFile);
    score->add_option("--truth", truth, "Ground-truth file")->check(CLI::ExistingFile);
    score->add_option("--config", o.config, "Config file (supplies truth and aggregation)");
    score->add_option("--aggregation", o.aggregation, "div3 or sum")->check(CLI::IsMember({"div3", "sum"}));
    score->add_flag("--repeat-mean", repeat_mean, "Average the scores of several artifacts");

    std::vector<std::string> ingest_paths;
    std::string kb_dir;
    auto* ingest = cli.add_subcommand("ingest", "Add documents to a knowledge-base index");
    ingest->add_option("paths", ingest_paths, "Files or directories")->required();
    ingest->add_option("--kb", kb_dir, "Index directory")->required();

    std::string transcript_path;
    auto* replay = cli.add_subcommand("replay", "Verify a recorded transcript");
    replay->add_option("transcript", transcript_path, "transcript.jsonl")->required()->check(CLI::ExistingFile);
    add_run_flags(*replay, o);

    CLI11_PARSE(cli, argc, argv);

    try {
        if (*pentest) return cmd_pipeline(o, true, false, false, "");
        if (*remediate) return cmd_pipeline(o, false, true, false, artifact_in);
        if (*run) return cmd_pipeline(o, true, true, true, "");
        if (*score) return cmd_score(score_artifacts, truth, o.config, o.aggregation, repeat_mean);
        if (*ingest) return cmd_ingest(ingest_paths, kb_dir);
        if (*replay) return cmd_replay(transcript_path, o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const llm::MissingFixtureError& e) {
        std::cerr << "replay error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
