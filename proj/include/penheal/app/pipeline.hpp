#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "penheal/app/config.hpp"
#include "penheal/core/artifact.hpp"
#include "penheal/kb/kb.hpp"
#include "penheal/llm/gateway.hpp"
#include "penheal/pentest/engine.hpp"
#include "penheal/remediation/nvd.hpp"
#include "penheal/remediation/remediate.hpp"

namespace penheal::app {

inline constexpr std::string_view kTranscriptFile = "transcript.jsonl";
inline constexpr std::string_view kArtifactFile = "run.json";
inline constexpr std::string_view kReportFile = "report.txt";
inline constexpr std::string_view kHistoryFile = "history.jsonl";

/// The pluggable parts of a run. make_services() builds them from the
/// config; tests and the fixture generator substitute their own.
struct Services {
    std::shared_ptr<llm::Backend> llm;
    std::unique_ptr<pentest::ExecutorBackend> executor;
    std::unique_ptr<remediation::CveSource> cves;
    std::shared_ptr<const kb::Index> kb;  // may be null
};

/// Hermetic: replay from `<fixtures>/transcript.jsonl`, simulator, bundled
/// NVD records, and the process-wide network guard switched to deny-all.
/// Live: HTTP model backend (recorded to `<out>/transcript.jsonl`), the
/// configured executor, NVD client. The knowledge base comes from `kb` or
/// is built in memory from `kb_corpus`.
Services make_services(const AppConfig& cfg);

/// Loads or builds the knowledge base named by the config (null if none).
std::shared_ptr<const kb::Index> load_knowledge_base(const AppConfig& cfg);

struct PipelineResult {
    RunArtifact artifact;
    std::optional<pentest::PentestResult> pentest;
    std::optional<remediation::RemediationResult> remediation;
    llm::Transcript transcript;
    std::vector<std::string> notes;
    std::optional<std::string> fatal;  // set when a stage could not finish
    std::string report;

    /// 0 clean, 2 finished with warnings, 1 fatal.
    int exit_code() const;
};

struct PipelineOptions {
    bool pentest = true;
    bool remediate = true;
    bool score = true;
    std::vector<Vulnerability> findings;  // input when pentest is off
    AttackPlan plan;                      // carried into the artifact when pentest is off
    std::string history_path;
    std::function<void(const pentest::IterationEvent&)> observer;
};

/// pentest -> remediate -> score, as far as `opt` asks. Never throws for
/// stage failures; they land in `fatal`.
PipelineResult run_pipeline(const AppConfig& cfg, Services& services, const PipelineOptions& opt = {});

/// Writes run.json, report.txt and transcript.jsonl into `dir`.
void write_outputs(const PipelineResult& result, const std::string& dir);

std::vector<Vulnerability> load_truth(const std::string& path);

/// Short id derived from the findings and plan, so identical runs share it.
std::string derive_run_id(const RunArtifact& artifact);

std::string render_report(const PipelineResult& result);

}  // namespace penheal::app
