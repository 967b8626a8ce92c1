#pragma once

#include <json.hpp>

#include "penheal/core/model.hpp"

namespace penheal {

using json = nlohmann::json;

// Field names are the snake_case names of the domain types. Enums are
// serialized as lowercase strings (CVSS metrics as their vector letters).

void to_json(json& j, const TaskNode& n);
void from_json(const json& j, TaskNode& n);
void to_json(json& j, const AttackPlan& p);
void from_json(const json& j, AttackPlan& p);
void to_json(json& j, const CvssMetrics& m);
void from_json(const json& j, CvssMetrics& m);
void to_json(json& j, const Vulnerability& v);
void from_json(const json& j, Vulnerability& v);
void to_json(json& j, const VulnIdentity& v);
void from_json(const json& j, VulnIdentity& v);
void to_json(json& j, const Recommendation& r);
void from_json(const json& j, Recommendation& r);
void to_json(json& j, const RecommendationGroup& g);
void from_json(const json& j, RecommendationGroup& g);
void to_json(json& j, const ScoreReport& r);
void from_json(const json& j, ScoreReport& r);
void to_json(json& j, const CostPolicy& p);
void from_json(const json& j, CostPolicy& p);

/// Single-letter CVSS code for each metric value ("N", "L", ...).
char metric_code(AttackVector v);
char metric_code(AttackComplexity v);
char metric_code(PrivilegesRequired v);
char metric_code(UserInteraction v);
char metric_code(Scope v);
char metric_code(Impact v);

}  // namespace penheal
