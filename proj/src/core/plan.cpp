#include "penheal/core/plan.hpp"

#include <set>

namespace penheal {

namespace {

void check_nodes(const std::vector<TaskNode>& nodes, const std::string& parent,
                 std::set<std::string>& seen, std::vector<std::string>& out) {
    for (const auto& n : nodes) {
        const std::string label = n.id.empty() ? std::string("<empty>") : n.id;
        if (!is_dotted_id(n.id)) {
            out.push_back(label + ": malformed id");
        } else if (parent_id(n.id) != parent) {
            out.push_back(label + ": parent mismatch");
        }
        if (!seen.insert(n.id).second) out.push_back(label + ": duplicate id");
        if (n.status == TaskStatus::ToDo && n.result_summary) {
            out.push_back(label + ": to-do task carries a result summary");
        }
        if (n.status != TaskStatus::ToDo && !n.result_summary) {
            out.push_back(label + ": " + std::string(to_string(n.status)) +
                          " task lacks a result summary");
        }
        if (n.result_summary && n.result_summary->size() > kMaxResultSummary) {
            out.push_back(label + ": result summary exceeds " + std::to_string(kMaxResultSummary) +
                          " characters");
        }
        check_nodes(n.children, n.id, seen, out);
    }
}

}  // namespace

std::vector<std::string> validate_plan(const AttackPlan& plan) {
    std::vector<std::string> out;
    if (plan.roots.empty()) out.push_back("plan: no root task");
    std::set<std::string> seen;
    check_nodes(plan.roots, "", seen, out);
    return out;
}

std::vector<std::string> validate_transition(const AttackPlan& prev, const AttackPlan& next) {
    std::vector<std::string> out;
    for (const auto* old : prev.depth_first()) {
        const auto* now = next.find(old->id);
        if (!now) {
            out.push_back(old->id + ": task removed");
            continue;
        }
        if (old->status != TaskStatus::ToDo && now->status != old->status) {
            out.push_back(old->id + ": status reverted from " + std::string(to_string(old->status)));
        }
    }
    return out;
}

}  // namespace penheal
