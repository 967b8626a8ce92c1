#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "penheal/core/model.hpp"
#include "penheal/llm/gateway.hpp"
#include "penheal/remediation/knapsack.hpp"
#include "penheal/remediation/nvd.hpp"

namespace penheal::remediation {

// ---------------------------------------------------------------------------
// Estimator
// ---------------------------------------------------------------------------

/// Used when the Estimator fails twice.
inline constexpr std::string_view kFallbackVector = "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:L/I:L/A:L";

/// Asks the Estimator for a vector string (one retry carrying the parse
/// error), falling back to kFallbackVector. Returns scored metrics.
CvssMetrics estimate_vector(const Vulnerability& finding, std::string_view context, llm::Gateway& gw,
                            std::vector<std::string>& warnings);

/// NVD first for real CVE ids, Estimator otherwise. Findings that already
/// carry metrics are returned unchanged. A CVE without a v3 record is noted
/// in `notes`; a failed lookup is a warning.
Vulnerability enrich(Vulnerability finding, CveSource* cves, std::string_view context, llm::Gateway& gw,
                     std::vector<std::string>& warnings, std::vector<std::string>* notes = nullptr);

// ---------------------------------------------------------------------------
// Advisor
// ---------------------------------------------------------------------------

/// Items of a "1. ... 2. ..." list. Unnumbered lines continue the current
/// item; text before the first item is ignored.
std::vector<std::string> parse_numbered_list(std::string_view text);

/// One Advisor conversation for one finding. An unusable reply is retried
/// once; after that the group comes back empty with a warning.
RecommendationGroup advise_one(const Vulnerability& finding, llm::Gateway& gw, std::vector<std::string>& warnings);

/// Groups in finding order; empty groups are left out. Throws
/// PreconditionError on empty input.
std::vector<RecommendationGroup> advise(const std::vector<Vulnerability>& findings, llm::Gateway& gw,
                                        std::vector<std::string>& warnings);

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

enum class Effect { Full, Partial, Zero, Negative };
std::string_view to_string(Effect e);

struct EvaluatorReply {
    Effect effect = Effect::Zero;
    double k_percent = 0.0;               // Partial/Negative only
    std::vector<int> addresses;           // 1-based indices into the vulnerability list
    std::optional<CostTier> cost_tier;
    std::optional<double> explicit_cost;  // in [0, 10]
    std::string rationale;

    bool operator==(const EvaluatorReply&) const = default;
};

/// Throws ParseError describing the first unusable line.
EvaluatorReply parse_evaluator_reply(std::string_view text);

/// Full -> sum, Partial k -> k% of sum, Zero -> 0, Negative k -> -k% of sum.
/// Rounded to hundredths, the knapsack's value resolution.
double compute_value(Effect effect, double k_percent, double target_score_sum);

std::string value_definition();
std::string cost_definition(const CostPolicy& policy);
/// Numbered list the Evaluator refers to in "Addresses:".
std::string vulnerability_list(const std::vector<Vulnerability>& findings);

/// Scores `rec`, which was generated for findings[own]. Its targets are
/// findings[own] plus any other listed vulnerability the Evaluator names.
/// Two unusable replies give (Moderate cost, value 0) with a warning.
Recommendation evaluate(Recommendation rec, const std::vector<Vulnerability>& findings, std::size_t own,
                        const CostPolicy& policy, llm::Gateway& gw, std::vector<std::string>& warnings);

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

struct RemediationResult {
    std::vector<Vulnerability> findings;  // with CVSS data
    std::vector<RecommendationGroup> groups;
    std::vector<Recommendation> selected;
    double budget = 0.0;
    double budget_used = 0.0;
    double total_value = 0.0;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;
};

/// enrich -> advise -> evaluate -> select. The shared budget is
/// budget_per_vuln times the number of distinct findings (or per group in
/// BudgetMode::PerGroup). With the Evaluator disabled, candidates are still
/// scored for the benchmark but the first one per group is adopted without
/// running the selector. `contexts` (parallel to findings, may be shorter)
/// feeds the Estimator.
RemediationResult remediate(const std::vector<Vulnerability>& findings, const RunConfig& cfg, llm::Gateway& gw,
                            CveSource* cves, const std::vector<std::string>& contexts = {});

/// Human-readable report, one "[Adopted] ... Cost: 2.0, Value: 9.0" line
/// per candidate under a heading per vulnerability.
std::string render_recommendations(const std::vector<RecommendationGroup>& groups);

}  // namespace penheal::remediation
