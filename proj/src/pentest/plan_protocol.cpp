#include "penheal/pentest/plan_protocol.hpp"

#include <regex>
#include <sstream>

#include "penheal/core/text.hpp"

namespace penheal::pentest {

namespace {

constexpr std::string_view kNoResult = "(no result given)";
constexpr std::string_view kCapMarker = "...";

std::optional<TaskStatus> status_word(std::string word) {
    word = text::to_lower(word);
    if (word == "to-do" || word == "todo" || word == "to do") return TaskStatus::ToDo;
    if (word == "completed" || word == "complete" || word == "done") return TaskStatus::Completed;
    if (word == "failed" || word == "fail") return TaskStatus::Failed;
    return std::nullopt;
}

std::string cap_summary(std::string_view s) {
    const auto t = text::trim(s);
    if (t.empty()) return std::string(kNoResult);
    if (t.size() <= kMaxResultSummary) return std::string(t);
    return text::truncate_with_marker(t, kMaxResultSummary, kCapMarker);
}

int last_segment(const std::string& id) {
    const auto dot = id.rfind('.');
    return std::stoi(dot == std::string::npos ? id : id.substr(dot + 1));
}

void insert_sorted(std::vector<TaskNode>& siblings, TaskNode node) {
    const int key = last_segment(node.id);
    auto it = siblings.begin();
    while (it != siblings.end() && last_segment(it->id) < key) ++it;
    siblings.insert(it, std::move(node));
}

void render_node(std::ostringstream& out, const TaskNode& n, int depth) {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << n.id << " [" << to_string(n.status) << "] "
        << n.description;
    if (n.result_summary) out << " => " << *n.result_summary;
    out << '\n';
    for (const auto& c : n.children) render_node(out, c, depth + 1);
}

}  // namespace

std::vector<PlanLine> parse_plan_lines(std::string_view reply) {
    static const std::regex kLine(
        R"(^\s*(?:[-*]\s*)?(\d+(?:\.\d+)*)\.?\s*[:\-]?\s*\[\s*([A-Za-z -]+?)\s*\]\s*(.*)$)");
    std::vector<PlanLine> lines;
    for (auto raw : text::split_lines(reply)) {
        const std::string line(raw);
        std::smatch m;
        if (!std::regex_match(line, m, kLine)) continue;
        auto status = status_word(m[2].str());
        if (!status) continue;
        PlanLine pl;
        pl.id = m[1].str();
        pl.status = *status;
        std::string rest = m[3].str();
        const auto arrow = rest.find("=>");
        if (arrow != std::string::npos) {
            pl.result = std::string(text::trim(std::string_view(rest).substr(arrow + 2)));
            rest = rest.substr(0, arrow);
        }
        pl.description = std::string(text::trim(rest));
        if (pl.description.empty()) continue;
        lines.push_back(std::move(pl));
    }
    return lines;
}

std::string render_plan(const AttackPlan& plan) {
    std::ostringstream out;
    for (const auto& r : plan.roots) render_node(out, r, 0);
    std::string s = out.str();
    if (!s.empty()) s.pop_back();
    return s;
}

MergeOutcome merge_plan(const AttackPlan& plan, const std::vector<PlanLine>& lines) {
    MergeOutcome out;
    out.plan = plan;
    for (const auto& line : lines) {
        if (!is_dotted_id(line.id)) {
            out.warnings.push_back(line.id + ": malformed task id ignored");
            continue;
        }
        if (TaskNode* node = out.plan.find(line.id)) {
            if (node->status == TaskStatus::ToDo && line.status != TaskStatus::ToDo) {
                node->status = line.status;
                node->result_summary = cap_summary(line.result.value_or(""));
                ++out.applied;
            } else if (node->status != TaskStatus::ToDo && line.status != node->status) {
                out.warnings.push_back(line.id + ": status change from " + std::string(to_string(node->status)) +
                                       " to " + std::string(to_string(line.status)) + " ignored");
            }
            continue;
        }
        const auto parent = parent_id(line.id);
        TaskNode* parent_node = parent.empty() ? nullptr : out.plan.find(parent);
        if (!parent.empty() && !parent_node) {
            out.warnings.push_back(line.id + ": parent " + parent + " does not exist; task ignored");
            continue;
        }
        TaskNode node;
        node.id = line.id;
        node.description = line.description;
        node.status = line.status;
        if (line.status != TaskStatus::ToDo) node.result_summary = cap_summary(line.result.value_or(""));
        insert_sorted(parent_node ? parent_node->children : out.plan.roots, std::move(node));
        out.structure_changed = true;
        ++out.applied;
    }
    return out;
}

std::optional<std::string> parse_next_task(std::string_view reply) {
    static const std::regex kNext(R"(next\s+task\s*\**\s*[:\-]?\s*\**\s*(\d+(?:\.\d+)*))", std::regex::icase);
    const std::string s(reply);
    std::smatch m;
    if (std::regex_search(s, m, kNext)) return m[1].str();
    return std::nullopt;
}

std::vector<std::string> actionable_ids(const AttackPlan& plan) {
    std::vector<std::string> ids;
    for (const auto* n : plan.depth_first()) {
        if (n->status == TaskStatus::ToDo && n->children.empty()) ids.push_back(n->id);
    }
    return ids;
}

namespace {

void roll_up_node(TaskNode& n, std::vector<std::string>& closed) {
    for (auto& c : n.children) roll_up_node(c, closed);
    if (n.status != TaskStatus::ToDo || n.children.empty()) return;
    int done = 0;
    int failed = 0;
    for (const auto& c : n.children) {
        if (c.status == TaskStatus::ToDo) return;
        (c.status == TaskStatus::Completed ? done : failed)++;
    }
    n.status = done > 0 ? TaskStatus::Completed : TaskStatus::Failed;
    n.result_summary = "all subtasks resolved: " + std::to_string(done) + " completed, " + std::to_string(failed) + " failed";
    closed.push_back(n.id);
}

}  // namespace

std::vector<std::string> roll_up(AttackPlan& plan) {
    std::vector<std::string> closed;
    for (auto& r : plan.roots) roll_up_node(r, closed);
    return closed;
}

AttackPlan default_plan(std::string_view target) {
    const std::string t(target);
    AttackPlan p;
    auto leaf = [](std::string id, std::string desc) {
        TaskNode n;
        n.id = std::move(id);
        n.description = std::move(desc);
        return n;
    };
    TaskNode recon = leaf("1", "Reconnaissance");
    recon.children.push_back(leaf("1.1", "Identify open ports and services on " + t + " with nmap"));
    TaskNode scan = leaf("2", "Scanning");
    scan.children.push_back(leaf("2.1", "Detect service versions on " + t));
    TaskNode assess = leaf("3", "Vulnerability Assessment");
    assess.children.push_back(leaf("3.1", "Run nmap vulnerability scripts against " + t));
    TaskNode exploit = leaf("4", "Exploitation");
    exploit.children.push_back(leaf("4.1", "Exploit the most severe vulnerability found on " + t));
    p.roots = {recon, scan, assess, exploit};
    return p;
}

}  // namespace penheal::pentest
