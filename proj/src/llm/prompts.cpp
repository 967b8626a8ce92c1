#include "penheal/llm/prompts.hpp"

#include <algorithm>

#include "penheal/core/errors.hpp"

namespace penheal::llm {

namespace {

constexpr std::string_view kPlannerSystem = R"(As the chief director of penetration testing, you are responsible for high-level planning. Please follow these guidelines:
(1) Task Structure: Organize tasks in a layered sequence (e.g., 1, 1.1, 1.1.1). Top-level phases are Reconnaissance, Scanning, Vulnerability Assessment and Exploitation.
(2) Assign a status to each task: to-do, completed, or failed. Update this status and include succinct results based on the latest outcomes.
(3) If uncertain about a task or the previous outcomes indicate that more info is required, you are encouraged to add subtasks to acquire more information (e.g., search in Metasploit).
(4) Choose the next task based on the latest outcomes and the current attack plan. You can either start a new task (marked as to-do) or continue with the current one.
(5) Write one task per line as: <id> [<status>] <description>
    A completed or failed task appends its result: <id> [<status>] <description> => <result>
    You only need to list tasks that are new or whose status changed.
(6) When asked for the next task, answer with a single line: Next task: <id>)";

constexpr std::string_view kPlannerInit = R"(The target machine is at {target}. Create the initial attack plan covering reconnaissance, scanning, vulnerability assessment and exploitation. List every task with status to-do.)";

constexpr std::string_view kPlannerNext = R"(Current attack plan:
{plan}

Choose the next task to work on. Answer with: Next task: <id>)";

constexpr std::string_view kPlannerUpdate = R"(Current attack plan:
{plan}

Task {task_id} ({task}) was executed.
Command(s):
{commands}
Summarized outcome:
{summary}

Update the attack plan. Mark task {task_id} as completed or failed with a succinct result, and add new subtasks if more information is required.)";

constexpr std::string_view kPlannerCounterfactual = R"(Here is the list of vulnerabilities already identified, please mark them as completed on the attack list. Now exploit the system as if they do not exist:
{findings}

Current attack plan:
{plan}

Return the revised tasks.)";

constexpr std::string_view kExecutorSystem = R"(You are a penetration tester working against the target {target}. You are responsible for generating commands given the task assigned by your boss.
(1) Give your command(s) in a format starting and ending with "$" for easy parsing.
(2) If the command is too long or complex, break it down into multiple commands.
(3) Only give a sequence of commands if they are logically connected and follow a sequence that makes sense.
(4) If you want to use Metasploit, please write in this format: "msfconsole: [command]".
(5) Assume that you are operating on a Kali Linux machine. All tools are pre-installed. You are given the permission to use all of them.)";

constexpr std::string_view kExecutorTask = R"(Task: {task})";

constexpr std::string_view kExecutorRetry = R"(No command was found in your reply. Give the command(s) for the task, each starting and ending with "$".)";

constexpr std::string_view kInstructorGuidance = R"(Here is a brief introduction to the task: {task}. Here is some info from the knowledge base for your reference:
{excerpts})";

constexpr std::string_view kSummarizerSystem = R"(You summarize the output of penetration testing commands. Keep open ports, service versions, credentials, sessions, errors and any sign of successful exploitation. Be concise.)";

constexpr std::string_view kSummarizerTask = R"(Command:
{command}
Output:
{output})";

constexpr std::string_view kExtractorSystem = R"(You extract exploited vulnerabilities from a penetration testing history. For each vulnerability that was successfully exploited, output a block:
Exploited: [backdoor/CVE ID]
service: <service name>
port: <port number>
description: <short description>
method: <how it was exploited>
For vulnerabilities that are not disclosed, write "CVE-NA" as the id. Output nothing else if no vulnerability was exploited.)";

constexpr std::string_view kExtractorTask = R"(Attack history:
{history})";

constexpr std::string_view kEstimatorSystem = R"(You are a vulnerability analyst. You are responsible for producing a vector string for CVSS calculator.
(1) A vector string is of the form 'CVSS:3.0/AV:[value]/AC:[value]/PR:[value]/UI:[value]/S:[value]/C:[value]/I:[value]/A:[value]'.
(2) Attack Vector(AV): The way the vulnerability is exploited. Choose from: Network (N), Adjacent (A), Local (L), Physical (P).
(3) Attack Complexity(AC): The conditions beyond the attacker's control that must exist to exploit the vulnerability. Choose from: Low (L), High (H).
(4) Privileges Required(PR): The level of privileges an attacker must possess. Choose from: None (N), Low (L), High (H).
(5) User Interaction(UI): Whether a user other than the attacker must participate. Choose from: None (N), Required (R).
(6) Scope(S): Whether the exploit affects resources beyond the vulnerable component. Choose from: Unchanged (U), Changed (C).
(7) Confidentiality(C), Integrity(I), Availability(A): The impact on each. Choose from: High (H), Low (L), None (N).
Answer with the vector string only.)";

constexpr std::string_view kEstimatorTask = R"(Vulnerability:
{finding}
Recorded context:
{context})";

constexpr std::string_view kEstimatorRetry = R"(The vector string could not be parsed: {error}. Answer again with a single valid vector string.)";

constexpr std::string_view kAdvisorSystem = R"(You are a security engineer. You are responsible for generating remediation strategies for the vulnerabilities identified.
(1) Ensure that the remediation recommendations are actionable and effective in mitigating the identified risks.
(2) Specific commands are preferred over general recommendations. For example, "sudo apt update" is better than "Update the system".
(3) Adding protection is preferred over shutting down services. For example, suggesting enabling firewall and giving commands better than "Shut down the service".
(4) Answer with a numbered list, one recommendation per item (1., 2., ...).)";

constexpr std::string_view kAdvisorTask = R"(Vulnerability:
{finding}
Give your remediation recommendations.)";

constexpr std::string_view kAdvisorRetry = R"(Your reply did not contain a numbered list. Answer with a numbered list of recommendations (1., 2., ...).)";

constexpr std::string_view kEvaluatorSystem = R"(You have already discovered these vulnerabilities:
{vulns}
If the following remediation approach is adopted, to what extent can it mitigate the risks? Imagine the recommendation is implemented and judge how much less vulnerable the system becomes.
Give the score based on the rule:
{value_def}
Give the score based on their cost:
{cost_def}
Answer in exactly this format:
Effectiveness: full | partial <k>% | zero | negative <k>%
Addresses: <numbers of the vulnerabilities above that it addresses, comma separated>
Cost: low | moderate | high | <number from 0 to 10>
Rationale: <one sentence>)";

constexpr std::string_view kEvaluatorTask = R"(Recommendation:
{recommendation})";

constexpr std::string_view kEvaluatorRetry = R"(Your reply could not be parsed. Answer again using exactly the Effectiveness, Addresses, Cost and Rationale lines.)";

struct Entry {
    PromptId id;
    std::string_view name;
    std::string_view text;
};

constexpr Entry kCatalog[] = {
    {PromptId::PlannerSystem, "planner_system", kPlannerSystem},
    {PromptId::PlannerInit, "planner_init", kPlannerInit},
    {PromptId::PlannerNext, "planner_next", kPlannerNext},
    {PromptId::PlannerUpdate, "planner_update", kPlannerUpdate},
    {PromptId::PlannerCounterfactual, "planner_counterfactual", kPlannerCounterfactual},
    {PromptId::ExecutorSystem, "executor_system", kExecutorSystem},
    {PromptId::ExecutorTask, "executor_task", kExecutorTask},
    {PromptId::ExecutorRetry, "executor_retry", kExecutorRetry},
    {PromptId::InstructorGuidance, "instructor_guidance", kInstructorGuidance},
    {PromptId::SummarizerSystem, "summarizer_system", kSummarizerSystem},
    {PromptId::SummarizerTask, "summarizer_task", kSummarizerTask},
    {PromptId::ExtractorSystem, "extractor_system", kExtractorSystem},
    {PromptId::ExtractorTask, "extractor_task", kExtractorTask},
    {PromptId::EstimatorSystem, "estimator_system", kEstimatorSystem},
    {PromptId::EstimatorTask, "estimator_task", kEstimatorTask},
    {PromptId::EstimatorRetry, "estimator_retry", kEstimatorRetry},
    {PromptId::AdvisorSystem, "advisor_system", kAdvisorSystem},
    {PromptId::AdvisorTask, "advisor_task", kAdvisorTask},
    {PromptId::AdvisorRetry, "advisor_retry", kAdvisorRetry},
    {PromptId::EvaluatorSystem, "evaluator_system", kEvaluatorSystem},
    {PromptId::EvaluatorTask, "evaluator_task", kEvaluatorTask},
    {PromptId::EvaluatorRetry, "evaluator_retry", kEvaluatorRetry},
};

const Entry& entry(PromptId id) {
    for (const auto& e : kCatalog) {
        if (e.id == id) return e;
    }
    throw Error("unknown prompt id");
}

bool ident_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; }

// Length of a {name} placeholder starting at pos, or 0.
std::size_t placeholder_at(std::string_view s, std::size_t pos) {
    if (s[pos] != '{') return 0;
    std::size_t end = pos + 1;
    while (end < s.size() && ident_char(s[end])) ++end;
    if (end == pos + 1 || end >= s.size() || s[end] != '}') return 0;
    return end - pos + 1;
}

}  // namespace

std::string_view prompt_template(PromptId id) { return entry(id).text; }
std::string_view prompt_name(PromptId id) { return entry(id).name; }

std::vector<std::string> prompt_placeholders(PromptId id) {
    const auto tmpl = prompt_template(id);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (auto len = placeholder_at(tmpl, i)) {
            std::string name(tmpl.substr(i + 1, len - 2));
            if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
            i += len - 1;
        }
    }
    return names;
}

std::string render_template(std::string_view tmpl, const PromptVars& vars) {
    std::string out;
    out.reserve(tmpl.size());
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (auto len = placeholder_at(tmpl, i)) {
            const auto name = tmpl.substr(i + 1, len - 2);
            auto it = vars.find(name);
            if (it == vars.end()) {
                throw PreconditionError("missing prompt variable: " + std::string(name));
            }
            out += it->second;
            i += len - 1;
        } else {
            out += tmpl[i];
        }
    }
    return out;
}

std::string render_prompt(PromptId id, const PromptVars& vars) {
    return render_template(prompt_template(id), vars);
}

}  // namespace penheal::llm
