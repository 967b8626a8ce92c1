#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "penheal/core/model.hpp"

namespace penheal::pentest {

/// One task line of a Planner reply:
///   <id> [<status>] <description> [=> <result>]
struct PlanLine {
    std::string id;
    TaskStatus status = TaskStatus::ToDo;
    std::string description;
    std::optional<std::string> result;

    bool operator==(const PlanLine&) const = default;
};

std::vector<PlanLine> parse_plan_lines(std::string_view reply);

/// Renders the plan in the same line format, indented two spaces per level.
std::string render_plan(const AttackPlan& plan);

struct MergeOutcome {
    AttackPlan plan;
    std::size_t applied = 0;   // lines that changed something
    bool structure_changed = false;  // a task was added
    std::vector<std::string> warnings;
};

/// Applies Planner lines as a delta. Omitted tasks are kept; statuses only
/// move ToDo -> Completed/Failed; a new task needs an existing parent (or
/// is a root); result summaries are capped at kMaxResultSummary.
MergeOutcome merge_plan(const AttackPlan& plan, const std::vector<PlanLine>& lines);

/// "Next task: <id>" anywhere in the reply.
std::optional<std::string> parse_next_task(std::string_view reply);

/// ToDo tasks without children, depth-first. These are what the Executor
/// can work on; a ToDo task with children is a phase heading.
std::vector<std::string> actionable_ids(const AttackPlan& plan);

/// Closes every ToDo task whose children are all resolved: Completed if any
/// child completed, otherwise Failed. Returns the ids closed, innermost first.
std::vector<std::string> roll_up(AttackPlan& plan);

/// Used when the Planner's first reply yields no task at all.
AttackPlan default_plan(std::string_view target);

}  // namespace penheal::pentest
