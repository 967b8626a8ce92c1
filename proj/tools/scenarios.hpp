#pragma once

// Scripted stand-in for the model, used to author the replay fixtures under
// fixtures/. Each scenario plays every agent role deterministically and
// reacts to what the simulator actually printed, so a recorded transcript is
// a faithful run of the engine against target-sim.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "penheal/core/model.hpp"
#include "penheal/llm/gateway.hpp"

namespace penheal::scenario {

struct ScriptedTask {
    std::string description;      // exact plan description
    std::string executor_reply;   // "{target}" is replaced with the target address
    std::vector<std::string> success_markers;  // any of them in the summaries completes the task
    std::string result_ok;
    std::string result_fail;
    std::vector<std::string> add_on_success;  // plan lines appended by the Planner
    std::vector<std::string> add_on_failure;
};

struct ScriptedFinding {
    std::string command_keyword;  // matched case-insensitively against the command
    Vulnerability vuln;
};

struct EvaluatorRule {
    std::string keyword;  // case-insensitive substring of the recommendation
    std::string effectiveness;
    std::vector<std::string> also_addresses;  // tags looked up in the numbered vulnerability list
    std::string cost;
    std::string rationale;
};

struct Scenario {
    std::string name;
    std::string target = "10.0.2.4";
    std::string initial_plan;
    std::vector<std::string> pick_order;  // Planner preference among ToDo leaves
    std::vector<ScriptedTask> tasks;
    std::vector<ScriptedFinding> findings;
    std::map<std::size_t, std::vector<std::string>> counterfactual_additions;  // by number of findings listed
    std::map<std::string, std::vector<std::string>> estimator_replies;       // by service, one per attempt
    std::map<std::string, std::string> advisor_replies;                      // by CVE id, else by service
    std::vector<EvaluatorRule> evaluator_rules;
};

const std::vector<std::string>& scenario_names();

/// Throws PreconditionError for an unknown name.
Scenario make_scenario(std::string_view name);

class ScenarioBackend : public llm::Backend {
public:
    explicit ScenarioBackend(Scenario scenario);
    std::string complete(const llm::ChatRequest& request) override;

private:
    std::string planner(const std::string& user) const;
    std::string executor(const std::vector<llm::ChatTurn>& messages) const;
    std::string summarizer(const std::string& user) const;
    std::string extractor(const std::string& user) const;
    std::string estimator(const std::vector<llm::ChatTurn>& messages) const;
    std::string advisor(const std::string& user) const;
    std::string evaluator(const std::vector<llm::ChatTurn>& messages) const;

    const ScriptedTask* task_named(std::string_view description) const;

    Scenario s_;
};

}  // namespace penheal::scenario
