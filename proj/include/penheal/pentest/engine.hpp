#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "penheal/core/model.hpp"
#include "penheal/kb/kb.hpp"
#include "penheal/llm/gateway.hpp"
#include "penheal/pentest/commands.hpp"
#include "penheal/pentest/executor.hpp"

namespace penheal::pentest {

inline constexpr std::size_t kMaxSummaryChars = 1200;
inline constexpr std::string_view kNoOutput = "(no output)";
inline constexpr std::string_view kSummaryClipMarker = "\n[summary clipped]";
inline constexpr std::string_view kPlannerParseFailure = "planner-parse-failure";
inline constexpr std::string_view kNoCommand = "no-command";

struct ExecutionRecord {
    int iteration = 0;
    std::string task_id;
    Command command;
    std::string raw_output;
    std::string summary;  // at most kMaxSummaryChars
    int exit_status = 0;
    bool timed_out = false;
    bool spawn_failed = false;
};

/// Append-only record of everything executed plus the findings so far.
class PentestHistory {
public:
    void append(ExecutionRecord r) { records_.push_back(std::move(r)); }
    /// Adds findings whose identity is new; returns those that were added.
    std::vector<Vulnerability> add_findings(const std::vector<Vulnerability>& found);

    const std::vector<ExecutionRecord>& records() const { return records_; }
    const std::vector<Vulnerability>& findings_so_far() const { return findings_; }

private:
    std::vector<ExecutionRecord> records_;
    std::vector<Vulnerability> findings_;
};

enum class Termination { PlanExhausted, Stagnation, BudgetExhausted, Aborted };
std::string_view to_string(Termination t);

/// What one iteration changed, as seen by the termination rule.
struct IterationMark {
    bool new_finding = false;
    bool structure_changed = false;
};

/// The three-clause rule: no actionable task left, a stagnant streak of
/// `no_new_finding_window` iterations, or `iteration >= max_iterations`.
std::optional<Termination> termination_reason(const AttackPlan& plan, const std::vector<IterationMark>& timeline,
                                               int iteration, const RunConfig& cfg);
bool should_terminate(const AttackPlan& plan, const std::vector<IterationMark>& timeline, int iteration,
                      const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Single steps; each one is a function of its inputs and the gateway.
// ---------------------------------------------------------------------------

/// Planner builds the first plan. Falls back to default_plan() when the
/// reply holds no usable task line.
AttackPlan initial_plan(std::string_view target, llm::Gateway& gw, std::vector<std::string>& warnings);

/// A ToDo leaf chosen by the Planner, or the first one depth-first when the
/// reply names anything else. nullopt when the plan is exhausted. The
/// Planner is not consulted when only one candidate exists.
std::optional<std::string> select_next_task(const AttackPlan& plan, llm::Gateway& gw);

/// Light-tier summary of one command's output, capped at kMaxSummaryChars.
std::string summarize(const Command& cmd, std::string_view raw_output, llm::Gateway& gw);

/// Planner judges the task from its summaries. A reply that leaves the task
/// ToDo (or cannot be parsed) fails it with "planner-parse-failure".
struct PlanUpdate {
    AttackPlan plan;
    bool structure_changed = false;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;  // mechanical corrections, e.g. forced completions
};
PlanUpdate update_plan(const AttackPlan& plan, const std::string& task_id, const std::vector<ExecutionRecord>& records,
                       llm::Gateway& gw);

/// Issues the counterfactual prompt listing `all_findings`, merges the
/// revision and then force-completes every ToDo task whose description names
/// a found CVE id.
PlanUpdate counterfactual_update(const AttackPlan& plan, const std::vector<Vulnerability>& all_findings,
                                 llm::Gateway& gw);

/// Tasks still ToDo that mention one of the CVE ids in `findings`.
std::vector<std::string> stragglers(const AttackPlan& plan, const std::vector<Vulnerability>& findings);

/// Extractor over the given records; empty input makes no model call.
std::vector<Vulnerability> extract_findings(const std::vector<ExecutionRecord>& records, llm::Gateway& gw,
                                            std::vector<std::string>& warnings);

// ---------------------------------------------------------------------------
// The loop
// ---------------------------------------------------------------------------

struct IterationEvent {
    int iteration = 0;
    std::string task_id;
    std::string task_description;
    std::size_t commands = 0;
    std::vector<Vulnerability> new_findings;
    bool counterfactual = false;
    AttackPlan plan;  // as left by this iteration
};

struct PentestOptions {
    const kb::Index* kb = nullptr;       // Instructor source; nullptr or empty disables guidance
    std::string history_path;            // JSON-lines, appended per record; empty = not persisted
    std::function<void(const IterationEvent&)> observer;
};

struct PentestResult {
    PentestHistory history;
    AttackPlan plan;
    std::vector<Vulnerability> findings;
    Termination termination = Termination::PlanExhausted;
    int iterations = 0;
    std::vector<int> counterfactual_iterations;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;
    std::optional<std::string> abort_error;
};

/// Runs the Planner -> Executor -> execution -> Summarizer loop until
/// termination_reason() fires. Gateway failures end the run early with
/// Termination::Aborted and whatever was gathered so far.
PentestResult run_pentest(const RunConfig& cfg, llm::Gateway& gw, ExecutorBackend& backend,
                          const PentestOptions& options = {});

std::string history_line(const ExecutionRecord& r);

}  // namespace penheal::pentest
