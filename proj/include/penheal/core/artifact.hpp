#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "penheal/core/model.hpp"

namespace penheal {

/// Everything one pipeline run produces. Serialized as a single UTF-8 JSON
/// document with keys `plan`, `findings`, `recommendations`,
/// `score_report`, `transcript_ref` (plus `termination` and `warnings`).
struct RunArtifact {
    AttackPlan plan;
    std::vector<Vulnerability> findings;
    std::vector<RecommendationGroup> recommendations;
    std::optional<ScoreReport> score_report;
    std::string transcript_ref;
    std::string termination;
    std::vector<std::string> warnings;

    bool operator==(const RunArtifact&) const = default;
};

inline constexpr int kArtifactSchemaVersion = 1;

std::string serialize_run(const RunArtifact& run);

/// Throws ParseError (with the byte offset for malformed bytes) on bad input.
RunArtifact deserialize_run(std::string_view bytes);

RunArtifact load_run(const std::string& path);
void save_run(const RunArtifact& run, const std::string& path);

}  // namespace penheal
