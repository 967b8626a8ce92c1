#include "penheal/core/model.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

#include "penheal/core/text.hpp"

namespace penheal {

namespace {

const TaskNode* find_in(const std::vector<TaskNode>& nodes, std::string_view id) {
    // Full scan rather than prefix descent so malformed trees can still be
    // inspected by validate_plan.
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
        if (auto* hit = find_in(n.children, id)) return hit;
    }
    return nullptr;
}

void walk(const std::vector<TaskNode>& nodes, std::vector<const TaskNode*>& out) {
    for (const auto& n : nodes) {
        out.push_back(&n);
        walk(n.children, out);
    }
}

}  // namespace

const TaskNode* AttackPlan::find(std::string_view id) const { return find_in(roots, id); }

TaskNode* AttackPlan::find(std::string_view id) {
    return const_cast<TaskNode*>(std::as_const(*this).find(id));
}

std::vector<const TaskNode*> AttackPlan::depth_first() const {
    std::vector<const TaskNode*> out;
    walk(roots, out);
    return out;
}

std::vector<std::string> AttackPlan::todo_ids() const {
    std::vector<std::string> ids;
    for (const auto* n : depth_first()) {
        if (n->status == TaskStatus::ToDo) ids.push_back(n->id);
    }
    return ids;
}

std::vector<std::string> AttackPlan::all_ids() const {
    std::vector<std::string> ids;
    for (const auto* n : depth_first()) ids.push_back(n->id);
    return ids;
}

std::string parent_id(std::string_view id) {
    auto dot = id.rfind('.');
    if (dot == std::string_view::npos) return {};
    return std::string(id.substr(0, dot));
}

bool is_dotted_id(std::string_view id) {
    static const std::regex kPattern(R"(^[0-9]+(\.[0-9]+)*$)");
    return std::regex_match(id.begin(), id.end(), kPattern);
}

VulnIdentity identity_of(const Vulnerability& v) {
    return VulnIdentity{text::to_upper(v.id), text::to_lower(text::trim(v.service)), v.port};
}

std::string identity_key(const VulnIdentity& id) {
    std::string key = id.id + "@" + id.service;
    key += ":";
    key += id.port ? std::to_string(*id.port) : std::string("?");
    return key;
}

bool is_cve_id(std::string_view text) {
    static const std::regex kPattern(R"(^CVE-[0-9]{4}-[0-9]{4,}$)");
    return std::regex_match(text.begin(), text.end(), kPattern);
}

bool is_valid_vuln_id(std::string_view text) { return text == kCveNa || is_cve_id(text); }

std::vector<Vulnerability> deduplicate(const std::vector<Vulnerability>& findings) {
    std::set<VulnIdentity> seen;
    std::vector<Vulnerability> out;
    for (const auto& v : findings) {
        if (seen.insert(identity_of(v)).second) out.push_back(v);
    }
    return out;
}

ModelTier default_tier(AgentRole role) {
    switch (role) {
        case AgentRole::Planner:
        case AgentRole::Executor:
        case AgentRole::Advisor:
        case AgentRole::Evaluator:
            return ModelTier::Strong;
        case AgentRole::Summarizer:
        case AgentRole::Extractor:
        case AgentRole::Estimator:
            return ModelTier::Light;
    }
    return ModelTier::Strong;
}

RunConfig::RunConfig() {
    for (auto role : kAllRoles) role_tiers[role] = default_tier(role);
}

ModelTier RunConfig::tier_of(AgentRole role) const {
    auto it = role_tiers.find(role);
    return it == role_tiers.end() ? default_tier(role) : it->second;
}

std::string RunConfig::model_for(AgentRole role) const {
    auto it = tier_models.find(tier_of(role));
    return it == tier_models.end() ? std::string{} : it->second;
}

// ---------------------------------------------------------------------------

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view text, const std::pair<E, std::string_view> (&table)[N]) {
    for (const auto& [value, name] : table) {
        if (text::iequals(text, name)) return value;
    }
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(E value, const std::pair<E, std::string_view> (&table)[N]) {
    for (const auto& [v, name] : table) {
        if (v == value) return name;
    }
    return "?";
}

constexpr std::pair<TaskStatus, std::string_view> kTaskStatus[] = {
    {TaskStatus::ToDo, "to-do"}, {TaskStatus::Completed, "completed"}, {TaskStatus::Failed, "failed"}};
constexpr std::pair<CvssSource, std::string_view> kCvssSource[] = {
    {CvssSource::NvdLookup, "nvd_lookup"}, {CvssSource::Estimated, "estimated"}, {CvssSource::Unset, "unset"}};
constexpr std::pair<RecommendationStatus, std::string_view> kRecStatus[] = {
    {RecommendationStatus::Proposed, "proposed"},
    {RecommendationStatus::Adopted, "adopted"},
    {RecommendationStatus::Discarded, "discarded"}};
constexpr std::pair<CostTier, std::string_view> kCostTier[] = {
    {CostTier::Low, "low"}, {CostTier::Moderate, "moderate"}, {CostTier::High, "high"}};
constexpr std::pair<AggregationMode, std::string_view> kAggregation[] = {
    {AggregationMode::DividedByThree, "div3"}, {AggregationMode::Sum, "sum"}};
constexpr std::pair<AgentRole, std::string_view> kRoles[] = {
    {AgentRole::Planner, "planner"},     {AgentRole::Executor, "executor"},
    {AgentRole::Summarizer, "summarizer"}, {AgentRole::Extractor, "extractor"},
    {AgentRole::Estimator, "estimator"}, {AgentRole::Advisor, "advisor"},
    {AgentRole::Evaluator, "evaluator"}};
constexpr std::pair<ModelTier, std::string_view> kTiers[] = {
    {ModelTier::Strong, "strong"}, {ModelTier::Light, "light"}};
constexpr std::pair<BudgetMode, std::string_view> kBudgetModes[] = {
    {BudgetMode::Total, "total"}, {BudgetMode::PerGroup, "per_group"}};

}  // namespace

std::string_view to_string(TaskStatus s) { return name_of(s, kTaskStatus); }
std::string_view to_string(CvssSource s) { return name_of(s, kCvssSource); }
std::string_view to_string(RecommendationStatus s) { return name_of(s, kRecStatus); }
std::string_view to_string(CostTier t) { return name_of(t, kCostTier); }
std::string_view to_string(AggregationMode m) { return name_of(m, kAggregation); }
std::string_view to_string(AgentRole r) { return name_of(r, kRoles); }
std::string_view to_string(ModelTier t) { return name_of(t, kTiers); }
std::string_view to_string(BudgetMode m) { return name_of(m, kBudgetModes); }

std::optional<TaskStatus> task_status_from(std::string_view text) {
    if (text::iequals(text, "todo")) return TaskStatus::ToDo;
    return lookup(text, kTaskStatus);
}
std::optional<CvssSource> cvss_source_from(std::string_view text) { return lookup(text, kCvssSource); }
std::optional<RecommendationStatus> recommendation_status_from(std::string_view text) {
    return lookup(text, kRecStatus);
}
std::optional<CostTier> cost_tier_from(std::string_view text) { return lookup(text, kCostTier); }
std::optional<AggregationMode> aggregation_mode_from(std::string_view text) {
    return lookup(text, kAggregation);
}
std::optional<AgentRole> agent_role_from(std::string_view text) { return lookup(text, kRoles); }
std::optional<ModelTier> model_tier_from(std::string_view text) { return lookup(text, kTiers); }
std::optional<BudgetMode> budget_mode_from(std::string_view text) { return lookup(text, kBudgetModes); }

// ---------------------------------------------------------------------------

std::vector<std::string> validate(const Vulnerability& v) {
    std::vector<std::string> out;
    if (!is_valid_vuln_id(v.id)) out.push_back("id '" + v.id + "' is neither a CVE id nor CVE-NA");
    if (v.port && (*v.port < 0 || *v.port > 65535)) {
        out.push_back("port " + std::to_string(*v.port) + " out of range");
    }
    if (v.cvss.has_value() != (v.cvss_source != CvssSource::Unset)) {
        out.push_back("cvss_source must be unset exactly when cvss is absent");
    }
    return out;
}

std::vector<std::string> validate(const Recommendation& r, double target_score_sum) {
    std::vector<std::string> out;
    if (r.target_vuln_ids.empty()) out.push_back("recommendation has no target vulnerabilities");
    if (r.cost < 0.0 || r.cost > 10.0) out.push_back("cost " + text::format_fixed(r.cost, 2) + " outside [0,10]");
    const double eps = 1e-9;
    if (r.value > target_score_sum + eps || r.value < -target_score_sum - eps) {
        out.push_back("value " + text::format_fixed(r.value, 2) + " outside +/- target score sum " +
                      text::format_fixed(target_score_sum, 2));
    }
    return out;
}

std::vector<std::string> validate(const CostPolicy& p) {
    std::vector<std::string> out;
    for (auto tier : {CostTier::Low, CostTier::Moderate, CostTier::High}) {
        auto it = p.tier_scores.find(tier);
        if (it == p.tier_scores.end()) {
            out.push_back(std::string("missing tier score for ") + std::string(to_string(tier)));
        } else if (it->second < 0.0 || it->second > 10.0) {
            out.push_back(std::string("tier score for ") + std::string(to_string(tier)) + " outside [0,10]");
        }
    }
    return out;
}

std::vector<std::string> validate(const RunConfig& cfg) {
    std::vector<std::string> out;
    if (cfg.budget_per_vuln < 0.0) out.push_back("budget_per_vuln must be >= 0");
    if (cfg.max_iterations < 1) out.push_back("max_iterations must be >= 1");
    if (cfg.retrieval_k < 1) out.push_back("retrieval_k must be >= 1");
    if (cfg.no_new_finding_window < 1) out.push_back("no_new_finding_window must be >= 1");
    for (auto& v : validate(cfg.cost_policy)) out.push_back("cost_policy: " + v);
    return out;
}

double round_to(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

}  // namespace penheal
