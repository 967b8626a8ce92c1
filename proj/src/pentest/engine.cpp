#include "penheal/pentest/engine.hpp"

#include <fstream>
#include <set>

#include "penheal/core/json.hpp"
#include "penheal/core/text.hpp"
#include "penheal/llm/prompts.hpp"
#include "penheal/pentest/extractor.hpp"
#include "penheal/pentest/plan_protocol.hpp"

namespace penheal::pentest {

using llm::PromptId;
using llm::render_prompt;

std::vector<Vulnerability> PentestHistory::add_findings(const std::vector<Vulnerability>& found) {
    std::set<std::string> known;
    for (const auto& f : findings_) known.insert(identity_key(f));
    std::vector<Vulnerability> added;
    for (const auto& f : found) {
        if (known.insert(identity_key(f)).second) {
            findings_.push_back(f);
            added.push_back(f);
        }
    }
    return added;
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::PlanExhausted: return "plan-exhausted";
        case Termination::Stagnation: return "no-new-findings";
        case Termination::BudgetExhausted: return "budget-exhausted";
        case Termination::Aborted: return "aborted";
    }
    return "?";
}

std::optional<Termination> termination_reason(const AttackPlan& plan, const std::vector<IterationMark>& timeline,
                                               int iteration, const RunConfig& cfg) {
    if (actionable_ids(plan).empty()) return Termination::PlanExhausted;
    int streak = 0;
    for (auto it = timeline.rbegin(); it != timeline.rend(); ++it) {
        if (it->new_finding || it->structure_changed) break;
        ++streak;
    }
    if (cfg.no_new_finding_window > 0 && streak >= cfg.no_new_finding_window) return Termination::Stagnation;
    if (iteration >= cfg.max_iterations) return Termination::BudgetExhausted;
    return std::nullopt;
}

bool should_terminate(const AttackPlan& plan, const std::vector<IterationMark>& timeline, int iteration,
                      const RunConfig& cfg) {
    return termination_reason(plan, timeline, iteration, cfg).has_value();
}

// ---------------------------------------------------------------------------
// Steps
// ---------------------------------------------------------------------------

namespace {

std::vector<llm::ChatTurn> planner_turns(std::string user) {
    return {llm::system_turn(std::string(llm::prompt_template(PromptId::PlannerSystem))),
            llm::user_turn(std::move(user))};
}

std::string describe_commands(const std::vector<ExecutionRecord>& records) {
    std::vector<std::string> lines;
    for (const auto& r : records) {
        lines.push_back((r.command.channel == Channel::Msfconsole ? "msfconsole: " : "") + r.command.raw);
    }
    return text::join(lines, "\n");
}

std::string describe_summaries(const std::vector<ExecutionRecord>& records) {
    std::vector<std::string> parts;
    for (const auto& r : records) parts.push_back(r.summary);
    return text::join(parts, "\n");
}

void fail_task(AttackPlan& plan, const std::string& id, std::string_view why) {
    if (TaskNode* n = plan.find(id); n && n->status == TaskStatus::ToDo) {
        n->status = TaskStatus::Failed;
        n->result_summary = std::string(why);
    }
}

}  // namespace

AttackPlan initial_plan(std::string_view target, llm::Gateway& gw, std::vector<std::string>& warnings) {
    const auto reply = gw.complete(AgentRole::Planner,
                                   planner_turns(render_prompt(PromptId::PlannerInit, {{"target", std::string(target)}})));
    auto merged = merge_plan(AttackPlan{}, parse_plan_lines(reply));
    for (auto& w : merged.warnings) warnings.push_back("initial plan: " + w);
    if (actionable_ids(merged.plan).empty()) {
        warnings.push_back("initial plan: Planner reply had no usable task; using the default plan");
        return default_plan(target);
    }
    return merged.plan;
}

std::optional<std::string> select_next_task(const AttackPlan& plan, llm::Gateway& gw) {
    const auto candidates = actionable_ids(plan);
    if (candidates.empty()) return std::nullopt;
    if (candidates.size() == 1) return candidates.front();
    const auto reply =
        gw.complete(AgentRole::Planner, planner_turns(render_prompt(PromptId::PlannerNext, {{"plan", render_plan(plan)}})));
    if (auto named = parse_next_task(reply)) {
        for (const auto& c : candidates) {
            if (c == *named) return c;
        }
    }
    return candidates.front();
}

std::string summarize(const Command& cmd, std::string_view raw_output, llm::Gateway& gw) {
    if (text::trim(raw_output).empty()) return std::string(kNoOutput);
    const std::string shown = (cmd.channel == Channel::Msfconsole ? "msfconsole: " : "") + cmd.raw;
    const auto reply = gw.complete(
        AgentRole::Summarizer,
        {llm::system_turn(std::string(llm::prompt_template(PromptId::SummarizerSystem))),
         llm::user_turn(render_prompt(PromptId::SummarizerTask, {{"command", shown}, {"output", std::string(raw_output)}}))});
    const auto trimmed = text::trim(reply);
    if (trimmed.empty()) return std::string(kNoOutput);
    return text::truncate_with_marker(trimmed, kMaxSummaryChars, kSummaryClipMarker);
}

PlanUpdate update_plan(const AttackPlan& plan, const std::string& task_id, const std::vector<ExecutionRecord>& records,
                       llm::Gateway& gw) {
    const TaskNode* task = plan.find(task_id);
    if (!task || task->status != TaskStatus::ToDo) {
        throw PreconditionError("update_plan: task " + task_id + " is not a ToDo task");
    }
    const auto reply = gw.complete(AgentRole::Planner,
                                   planner_turns(render_prompt(PromptId::PlannerUpdate, {{"plan", render_plan(plan)},
                                                                                         {"task_id", task_id},
                                                                                         {"task", task->description},
                                                                                         {"commands", describe_commands(records)},
                                                                                         {"summary", describe_summaries(records)}})));
    auto merged = merge_plan(plan, parse_plan_lines(reply));
    PlanUpdate out{std::move(merged.plan), merged.structure_changed, std::move(merged.warnings), {}};
    const TaskNode* after = out.plan.find(task_id);
    if (after && after->status == TaskStatus::ToDo && after->children.empty()) {
        out.warnings.push_back(task_id + ": Planner reply did not resolve the task");
        fail_task(out.plan, task_id, kPlannerParseFailure);
    }
    return out;
}

std::vector<std::string> stragglers(const AttackPlan& plan, const std::vector<Vulnerability>& findings) {
    std::vector<std::string> ids;
    for (const auto* n : plan.depth_first()) {
        if (n->status != TaskStatus::ToDo) continue;
        for (const auto& f : findings) {
            if (f.id != kCveNa && text::icontains(n->description, f.id)) {
                ids.push_back(n->id);
                break;
            }
        }
    }
    return ids;
}

PlanUpdate counterfactual_update(const AttackPlan& plan, const std::vector<Vulnerability>& all_findings,
                                 llm::Gateway& gw) {
    if (all_findings.empty()) throw PreconditionError("counterfactual_update needs at least one finding");
    std::vector<std::string> lines;
    for (const auto& f : all_findings) lines.push_back(counterfactual_line(f));
    const auto reply = gw.complete(AgentRole::Planner,
                                   planner_turns(render_prompt(PromptId::PlannerCounterfactual,
                                                               {{"findings", text::join(lines, "\n")}, {"plan", render_plan(plan)}})));
    const auto parsed = parse_plan_lines(reply);
    PlanUpdate out{plan, false, {}, {}};
    if (parsed.empty()) {
        out.warnings.push_back("counterfactual revision could not be parsed; plan kept");
    } else {
        auto merged = merge_plan(plan, parsed);
        out.plan = std::move(merged.plan);
        out.structure_changed = merged.structure_changed;
        out.warnings = std::move(merged.warnings);
    }
    for (const auto& id : stragglers(out.plan, all_findings)) {
        TaskNode* n = out.plan.find(id);
        n->status = TaskStatus::Completed;
        n->result_summary = "vulnerability already exploited";
        out.notes.push_back(id + ": force-completed after counterfactual revision");
    }
    return out;
}

std::vector<Vulnerability> extract_findings(const std::vector<ExecutionRecord>& records, llm::Gateway& gw,
                                            std::vector<std::string>& warnings) {
    if (records.empty()) return {};
    std::vector<std::string> blocks;
    for (const auto& r : records) {
        blocks.push_back("Task " + r.task_id + "\n$ " + (r.command.channel == Channel::Msfconsole ? "msfconsole: " : "") +
                         r.command.raw + "\n" + r.summary);
    }
    const auto reply = gw.complete(
        AgentRole::Extractor,
        {llm::system_turn(std::string(llm::prompt_template(PromptId::ExtractorSystem))),
         llm::user_turn(render_prompt(PromptId::ExtractorTask, {{"history", text::join(blocks, "\n\n")}}))});
    auto parsed = parse_extractor_output(reply);
    for (auto& w : parsed.warnings) warnings.push_back(std::move(w));
    return parsed.findings;
}

std::string history_line(const ExecutionRecord& r) {
    json j{{"iteration", r.iteration},
           {"task_id", r.task_id},
           {"channel", std::string(to_string(r.command.channel))},
           {"command", r.command.raw},
           {"exit_status", r.exit_status},
           {"timed_out", r.timed_out},
           {"spawn_failed", r.spawn_failed},
           {"summary", r.summary},
           {"raw_output", r.raw_output}};
    return j.dump();
}

// ---------------------------------------------------------------------------
// Loop
// ---------------------------------------------------------------------------

namespace {

class Loop {
public:
    Loop(const RunConfig& cfg, llm::Gateway& gw, ExecutorBackend& backend, const PentestOptions& opt)
        : cfg_(cfg), gw_(gw), backend_(backend), opt_(opt) {
        executor_history_.push_back(
            llm::system_turn(render_prompt(PromptId::ExecutorSystem, {{"target", cfg.target_address}})));
        if (!opt.history_path.empty()) history_out_.open(opt.history_path, std::ios::trunc);
    }

    PentestResult run() {
        try {
            gw_.set_tag("iteration=0");
            res_.plan = initial_plan(cfg_.target_address, gw_, res_.warnings);
            for (;;) {
                if (auto why = termination_reason(res_.plan, timeline_, res_.iterations, cfg_)) {
                    res_.termination = *why;
                    break;
                }
                iterate(res_.iterations + 1);
                ++res_.iterations;
            }
        } catch (const Error& e) {
            res_.termination = Termination::Aborted;
            res_.abort_error = e.what();
            res_.warnings.push_back(std::string("run aborted: ") + e.what());
        }
        res_.findings = res_.history.findings_so_far();
        return std::move(res_);
    }

private:
    std::string executor_reply(const std::string& task_text, const std::string& guidance) {
        auto turns = executor_history_;
        turns.push_back(llm::user_turn(guidance.empty() ? task_text : task_text + "\n\n" + guidance));
        auto reply = gw_.complete(AgentRole::Executor, turns);
        executor_history_.push_back(llm::user_turn(task_text));
        executor_history_.push_back(llm::assistant_turn(reply));
        return reply;
    }

    std::string guidance_for(const std::string& description) {
        if (!cfg_.instructor_enabled || !opt_.kb || opt_.kb->size() == 0 || cfg_.retrieval_k <= 0) return {};
        return kb::build_instructor_prompt(description,
                                           opt_.kb->retrieve(description, static_cast<std::size_t>(cfg_.retrieval_k)));
    }

    void iterate(int iteration) {
        gw_.set_tag("iteration=" + std::to_string(iteration));
        IterationEvent ev;
        ev.iteration = iteration;
        IterationMark mark;

        const auto task_id = select_next_task(res_.plan, gw_);
        ev.task_id = *task_id;  // termination_reason() guarantees a candidate
        ev.task_description = res_.plan.find(*task_id)->description;

        const auto task_text = render_prompt(PromptId::ExecutorTask, {{"task", ev.task_description}});
        auto parsed = parse_commands(executor_reply(task_text, guidance_for(ev.task_description)));
        if (parsed.no_command()) {
            parsed = parse_commands(executor_reply(std::string(llm::prompt_template(PromptId::ExecutorRetry)), {}));
        }
        for (const auto& p : parsed.problems) res_.warnings.push_back(ev.task_id + ": " + p);

        std::vector<ExecutionRecord> records;
        if (parsed.no_command()) {
            res_.warnings.push_back(ev.task_id + ": Executor gave no command after one retry");
            fail_task(res_.plan, ev.task_id, kNoCommand);
        } else {
            for (const auto& cmd : batch_commands(parsed.commands)) {
                const auto outcome = backend_.execute(cmd);
                ExecutionRecord r;
                r.iteration = iteration;
                r.task_id = ev.task_id;
                r.command = cmd;
                r.raw_output = outcome.output;
                r.exit_status = outcome.exit_status;
                r.timed_out = outcome.timed_out;
                r.spawn_failed = outcome.spawn_failed;
                r.summary = summarize(cmd, outcome.output, gw_);
                persist(r);
                records.push_back(r);
                res_.history.append(std::move(r));
            }
            ev.commands = records.size();
            auto upd = update_plan(res_.plan, ev.task_id, records, gw_);
            res_.plan = std::move(upd.plan);
            mark.structure_changed = upd.structure_changed;
            for (auto& w : upd.warnings) res_.warnings.push_back(std::move(w));
        }
        roll_up(res_.plan);

        ev.new_findings = res_.history.add_findings(extract_findings(records, gw_, res_.warnings));
        mark.new_finding = !ev.new_findings.empty();
        if (mark.new_finding && cfg_.counterfactual_enabled) {
            auto upd = counterfactual_update(res_.plan, res_.history.findings_so_far(), gw_);
            res_.plan = std::move(upd.plan);
            mark.structure_changed = mark.structure_changed || upd.structure_changed;
            for (auto& w : upd.warnings) res_.warnings.push_back(std::move(w));
            for (auto& n : upd.notes) res_.notes.push_back(std::move(n));
            roll_up(res_.plan);
            ev.counterfactual = true;
            res_.counterfactual_iterations.push_back(iteration);
        }
        timeline_.push_back(mark);
        if (opt_.observer) {
            ev.plan = res_.plan;
            opt_.observer(ev);
        }
    }

    void persist(const ExecutionRecord& r) {
        if (history_out_) history_out_ << history_line(r) << '\n' << std::flush;
    }

    const RunConfig& cfg_;
    llm::Gateway& gw_;
    ExecutorBackend& backend_;
    const PentestOptions& opt_;
    std::vector<llm::ChatTurn> executor_history_;
    std::vector<IterationMark> timeline_;
    std::ofstream history_out_;
    PentestResult res_;
};

}  // namespace

PentestResult run_pentest(const RunConfig& cfg, llm::Gateway& gw, ExecutorBackend& backend, const PentestOptions& options) {
    if (text::trim(cfg.target_address).empty()) throw PreconditionError("run_pentest: target_address is not set");
    return Loop(cfg, gw, backend, options).run();
}

}  // namespace penheal::pentest
