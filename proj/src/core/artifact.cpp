#include "penheal/core/artifact.hpp"

#include <fstream>
#include <sstream>

#include "penheal/core/errors.hpp"
#include "penheal/core/json.hpp"

namespace penheal {

std::string serialize_run(const RunArtifact& run) {
    json j{{"schema_version", kArtifactSchemaVersion},
           {"plan", run.plan},
           {"findings", run.findings},
           {"recommendations", run.recommendations},
           {"score_report", run.score_report ? json(*run.score_report) : json(nullptr)},
           {"transcript_ref", run.transcript_ref},
           {"termination", run.termination},
           {"warnings", run.warnings}};
    return j.dump(2) + "\n";
}

RunArtifact deserialize_run(std::string_view bytes) {
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed run artifact: ") + e.what(), e.byte);
    }
    try {
        if (!j.is_object()) throw ParseError("run artifact must be a JSON object", 0);
        if (j.value("schema_version", 0) != kArtifactSchemaVersion) {
            throw ParseError("unsupported run artifact schema_version", std::string::npos);
        }
        RunArtifact run;
        run.plan = j.at("plan").get<AttackPlan>();
        run.findings = j.at("findings").get<std::vector<Vulnerability>>();
        run.recommendations = j.at("recommendations").get<std::vector<RecommendationGroup>>();
        if (!j.at("score_report").is_null()) run.score_report = j.at("score_report").get<ScoreReport>();
        run.transcript_ref = j.at("transcript_ref").get<std::string>();
        run.termination = j.value("termination", std::string{});
        run.warnings = j.value("warnings", std::vector<std::string>{});
        return run;
    } catch (const json::exception& e) {
        throw ParseError(std::string("run artifact schema error: ") + e.what(), std::string::npos);
    }
}

RunArtifact load_run(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read run artifact " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_run(buf.str());
}

void save_run(const RunArtifact& run, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write run artifact " + path);
    out << serialize_run(run);
}

}  // namespace penheal
