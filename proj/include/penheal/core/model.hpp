#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace penheal {

// ---------------------------------------------------------------------------
// Attack plan
// ---------------------------------------------------------------------------

enum class TaskStatus { ToDo, Completed, Failed };

inline constexpr std::size_t kMaxResultSummary = 500;

struct TaskNode {
    std::string id;  // dotted path, e.g. "1.2.1"
    std::string description;
    TaskStatus status = TaskStatus::ToDo;
    std::optional<std::string> result_summary;
    std::vector<TaskNode> children;

    bool operator==(const TaskNode&) const = default;
};

/// Layered task tree. Roots conventionally follow the phase order
/// Reconnaissance, Scanning, Vulnerability Assessment, Exploitation.
struct AttackPlan {
    std::vector<TaskNode> roots;

    const TaskNode* find(std::string_view id) const;
    TaskNode* find(std::string_view id);

    /// Pre-order traversal.
    std::vector<const TaskNode*> depth_first() const;
    std::vector<std::string> todo_ids() const;
    std::vector<std::string> all_ids() const;
    bool has_todo() const { return !todo_ids().empty(); }

    bool operator==(const AttackPlan&) const = default;
};

/// Parent id of a dotted path ("1.2.1" -> "1.2"); empty for roots.
std::string parent_id(std::string_view id);
bool is_dotted_id(std::string_view id);

// ---------------------------------------------------------------------------
// CVSS v3 base metrics
// ---------------------------------------------------------------------------

enum class AttackVector { Network, Adjacent, Local, Physical };
enum class AttackComplexity { Low, High };
enum class PrivilegesRequired { None, Low, High };
enum class UserInteraction { None, Required };
enum class Scope { Unchanged, Changed };
enum class Impact { High, Low, None };

struct CvssMetrics {
    AttackVector av = AttackVector::Network;
    AttackComplexity ac = AttackComplexity::Low;
    PrivilegesRequired pr = PrivilegesRequired::None;
    UserInteraction ui = UserInteraction::None;
    Scope scope = Scope::Unchanged;
    Impact c = Impact::None;
    Impact i = Impact::None;
    Impact a = Impact::None;
    double base_score = 0.0;

    bool operator==(const CvssMetrics&) const = default;
};

enum class CvssSource { NvdLookup, Estimated, Unset };

// ---------------------------------------------------------------------------
// Findings
// ---------------------------------------------------------------------------

inline constexpr std::string_view kCveNa = "CVE-NA";

struct Vulnerability {
    std::string id;  // CVE-YYYY-NNNN+ or "CVE-NA"
    std::string service;
    std::optional<int> port;
    std::string description;
    std::string exploitation_method;
    std::optional<CvssMetrics> cvss;
    CvssSource cvss_source = CvssSource::Unset;

    bool operator==(const Vulnerability&) const = default;
};

/// Deduplication identity: (id, service, port). Service compares
/// case-insensitively, so it is stored lowercased.
struct VulnIdentity {
    std::string id;
    std::string service;
    std::optional<int> port;

    auto operator<=>(const VulnIdentity&) const = default;
    bool operator==(const VulnIdentity&) const = default;
};

VulnIdentity identity_of(const Vulnerability& v);

/// Stable textual key, e.g. "CVE-2011-2523@ftp:21" or "CVE-NA@http:80".
std::string identity_key(const VulnIdentity& id);
inline std::string identity_key(const Vulnerability& v) { return identity_key(identity_of(v)); }

bool is_cve_id(std::string_view text);
bool is_valid_vuln_id(std::string_view text);

/// Keeps the first occurrence of each identity, preserving order.
std::vector<Vulnerability> deduplicate(const std::vector<Vulnerability>& findings);

// ---------------------------------------------------------------------------
// Remediation
// ---------------------------------------------------------------------------

enum class RecommendationStatus { Proposed, Adopted, Discarded };

struct Recommendation {
    std::string text;
    std::vector<std::string> target_vuln_ids;  // identity keys
    double cost = 0.0;
    double value = 0.0;
    RecommendationStatus status = RecommendationStatus::Proposed;
    std::string rationale;

    bool operator==(const Recommendation&) const = default;
};

/// Candidates generated for one finding. At most one may be Adopted.
struct RecommendationGroup {
    VulnIdentity vuln;
    std::vector<Recommendation> candidates;

    bool operator==(const RecommendationGroup&) const = default;
};

enum class CostTier { Low, Moderate, High };

struct CostPolicy {
    std::map<CostTier, double> tier_scores{
        {CostTier::Low, 2.0}, {CostTier::Moderate, 5.0}, {CostTier::High, 10.0}};
    std::string user_preference_text;

    double score(CostTier tier) const { return tier_scores.at(tier); }
    bool operator==(const CostPolicy&) const = default;
};

// ---------------------------------------------------------------------------
// Scoring and configuration
// ---------------------------------------------------------------------------

enum class AggregationMode { DividedByThree, Sum };

struct ScoreReport {
    double s_d = 0.0;
    double s_r = 0.0;
    double c = 0.0;
    double s_overall = 0.0;
    int found_count = 0;
    int truth_count = 0;
    std::string run_id;
    AggregationMode mode = AggregationMode::DividedByThree;
    std::vector<std::string> notes;

    bool operator==(const ScoreReport&) const = default;
};

enum class AgentRole { Planner, Executor, Summarizer, Extractor, Estimator, Advisor, Evaluator };
enum class ModelTier { Strong, Light };

inline constexpr AgentRole kAllRoles[] = {AgentRole::Planner,   AgentRole::Executor,
                                          AgentRole::Summarizer, AgentRole::Extractor,
                                          AgentRole::Estimator, AgentRole::Advisor,
                                          AgentRole::Evaluator};

ModelTier default_tier(AgentRole role);

/// How the remediation budget is applied: a single pool of
/// budget_per_vuln * |findings|, or an independent budget per group.
enum class BudgetMode { Total, PerGroup };

struct RunConfig {
    std::string target_address;
    double budget_per_vuln = 4.0;
    BudgetMode budget_mode = BudgetMode::Total;
    CostPolicy cost_policy;
    int retrieval_k = 3;
    int max_iterations = 30;
    int no_new_finding_window = 5;
    std::map<AgentRole, ModelTier> role_tiers;
    std::map<ModelTier, std::string> tier_models{{ModelTier::Strong, "gpt-4-turbo"},
                                                 {ModelTier::Light, "gpt-3.5-turbo"}};
    AggregationMode aggregation_mode = AggregationMode::DividedByThree;

    // Ablation toggles.
    bool counterfactual_enabled = true;
    bool instructor_enabled = true;
    bool evaluator_enabled = true;

    RunConfig();
    ModelTier tier_of(AgentRole role) const;
    std::string model_for(AgentRole role) const;
};

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

std::string_view to_string(TaskStatus s);
std::string_view to_string(CvssSource s);
std::string_view to_string(RecommendationStatus s);
std::string_view to_string(CostTier t);
std::string_view to_string(AggregationMode m);
std::string_view to_string(AgentRole r);
std::string_view to_string(ModelTier t);
std::string_view to_string(BudgetMode m);

std::optional<TaskStatus> task_status_from(std::string_view text);
std::optional<CvssSource> cvss_source_from(std::string_view text);
std::optional<RecommendationStatus> recommendation_status_from(std::string_view text);
std::optional<CostTier> cost_tier_from(std::string_view text);
std::optional<AggregationMode> aggregation_mode_from(std::string_view text);
std::optional<AgentRole> agent_role_from(std::string_view text);
std::optional<ModelTier> model_tier_from(std::string_view text);
std::optional<BudgetMode> budget_mode_from(std::string_view text);

// ---------------------------------------------------------------------------
// Invariant checks (each returns human-readable violations; empty = valid)
// ---------------------------------------------------------------------------

std::vector<std::string> validate(const Vulnerability& v);
std::vector<std::string> validate(const Recommendation& r,
                                  double target_score_sum);
std::vector<std::string> validate(const RunConfig& cfg);
std::vector<std::string> validate(const CostPolicy& p);

/// Rounding used for stored decimal fields.
double round_to(double value, int decimals);

}  // namespace penheal
