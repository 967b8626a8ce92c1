#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace penheal::llm {

enum class PromptId {
    PlannerSystem,
    PlannerInit,            // {target}
    PlannerNext,            // {plan}
    PlannerUpdate,          // {plan} {task_id} {task} {commands} {summary}
    PlannerCounterfactual,  // {findings} {plan}
    ExecutorSystem,         // {target}
    ExecutorTask,           // {task}
    ExecutorRetry,
    InstructorGuidance,     // {task} {excerpts}
    SummarizerSystem,
    SummarizerTask,         // {command} {output}
    ExtractorSystem,
    ExtractorTask,          // {history}
    EstimatorSystem,
    EstimatorTask,          // {finding} {context}
    EstimatorRetry,         // {error}
    AdvisorSystem,
    AdvisorTask,            // {finding}
    AdvisorRetry,
    EvaluatorSystem,        // {vulns} {value_def} {cost_def}
    EvaluatorTask,          // {recommendation}
    EvaluatorRetry,
};

using PromptVars = std::map<std::string, std::string, std::less<>>;

std::string_view prompt_template(PromptId id);
std::string_view prompt_name(PromptId id);

/// Placeholder names of the form {name} used by the template, in order of
/// first appearance.
std::vector<std::string> prompt_placeholders(PromptId id);

/// Substitutes every {name} with its variable verbatim; substituted text is
/// not rescanned. Throws PreconditionError naming the first missing variable.
std::string render_prompt(PromptId id, const PromptVars& vars);
std::string render_template(std::string_view tmpl, const PromptVars& vars);

/// Leading sentence of the counterfactual prompt; also used to recognise it
/// in transcripts.
inline constexpr std::string_view kCounterfactualLead =
    "Here is the list of vulnerabilities already identified, please mark them as completed on the "
    "attack list. Now exploit the system as if they do not exist:";

}  // namespace penheal::llm
