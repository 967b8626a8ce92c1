#include "penheal/scoring/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "penheal/core/errors.hpp"
#include "penheal/core/text.hpp"

namespace penheal::scoring {

MatchReport match_findings(const std::vector<Vulnerability>& found,
                           const std::vector<Vulnerability>& truth) {
    std::vector<bool> found_used(found.size(), false);
    std::vector<bool> truth_used(truth.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    for (std::size_t f = 0; f < found.size(); ++f) {
        if (!is_cve_id(found[f].id)) continue;
        for (std::size_t t = 0; t < truth.size(); ++t) {
            if (!truth_used[t] && text::iequals(found[f].id, truth[t].id)) {
                found_used[f] = truth_used[t] = true;
                pairs.emplace_back(f, t);
                break;
            }
        }
    }
    for (std::size_t f = 0; f < found.size(); ++f) {
        if (found_used[f]) continue;
        const auto fid = identity_of(found[f]);
        for (std::size_t t = 0; t < truth.size(); ++t) {
            if (truth_used[t]) continue;
            const auto tid = identity_of(truth[t]);
            const bool either_na = fid.id == kCveNa || tid.id == kCveNa;
            if (either_na && fid.service == tid.service && fid.port == tid.port) {
                found_used[f] = truth_used[t] = true;
                pairs.emplace_back(f, t);
                break;
            }
        }
    }

    MatchReport report;
    for (auto [f, t] : pairs) report.matched.emplace_back(found[f], truth[t]);
    for (std::size_t f = 0; f < found.size(); ++f) {
        if (!found_used[f]) report.unmatched_found.push_back(found[f]);
    }
    for (std::size_t t = 0; t < truth.size(); ++t) {
        if (!truth_used[t]) report.unmatched_truth.push_back(truth[t]);
    }
    return report;
}

double detection_coverage(const MatchReport& match) {
    const auto truth_count = match.matched.size() + match.unmatched_truth.size();
    if (truth_count == 0) throw PreconditionError("detection coverage needs a non-empty ground truth");
    return 10.0 * static_cast<double>(match.matched.size()) / static_cast<double>(truth_count);
}

double remediation_effectiveness(const std::vector<Recommendation>& selected) {
    if (selected.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : selected) sum += r.value;
    return sum / static_cast<double>(selected.size());
}

double remediation_cost(const std::vector<Recommendation>& selected) {
    if (selected.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : selected) sum += r.cost;
    return sum / static_cast<double>(selected.size());
}

double overall(double s_d, double s_r, double c, AggregationMode mode) {
    const double sum = s_d + s_r - c;
    return mode == AggregationMode::Sum ? sum : sum / 3.0;
}

ScoreReport score_run(const std::vector<Vulnerability>& found,
                      const std::vector<Vulnerability>& truth,
                      const std::vector<Recommendation>& adopted, AggregationMode mode,
                      std::string run_id) {
    const auto match = match_findings(found, truth);
    ScoreReport report;
    report.s_d = detection_coverage(match);
    report.s_r = remediation_effectiveness(adopted);
    report.c = remediation_cost(adopted);
    report.s_overall = overall(report.s_d, report.s_r, report.c, mode);
    report.found_count = static_cast<int>(match.matched.size());
    report.truth_count = static_cast<int>(truth.size());
    report.run_id = std::move(run_id);
    report.mode = mode;
    if (adopted.empty()) report.notes.push_back("no adopted recommendations; S_R and C set to 0");
    if (!match.unmatched_found.empty()) {
        report.notes.push_back(std::to_string(match.unmatched_found.size()) +
                               " finding(s) did not match any ground-truth entry");
    }
    return report;
}

ScoreReport mean_report(const std::vector<ScoreReport>& reports, AggregationMode mode) {
    if (reports.empty()) throw PreconditionError("mean of zero score reports");
    ScoreReport mean;
    double found = 0.0;
    double truth = 0.0;
    std::vector<std::string> ids;
    for (const auto& r : reports) {
        mean.s_d += r.s_d;
        mean.s_r += r.s_r;
        mean.c += r.c;
        found += r.found_count;
        truth += r.truth_count;
        ids.push_back(r.run_id);
    }
    const double n = static_cast<double>(reports.size());
    mean.s_d /= n;
    mean.s_r /= n;
    mean.c /= n;
    mean.s_overall = overall(mean.s_d, mean.s_r, mean.c, mode);
    mean.found_count = static_cast<int>(std::lround(found / n));
    mean.truth_count = static_cast<int>(std::lround(truth / n));
    mean.run_id = "mean(" + text::join(ids, ",") + ")";
    mean.mode = mode;
    mean.notes.push_back("mean of " + std::to_string(reports.size()) + " runs");
    return mean;
}

std::string render_table(const ScoreReport& r) {
    std::ostringstream out;
    out << "run: " << r.run_id << "\n";
    out << "+-----------+--------+\n";
    out << "| metric    |  score |\n";
    out << "+-----------+--------+\n";
    auto row = [&out](const char* name, double v) {
        std::string value = text::format_fixed(v, 2);
        out << "| " << name << std::string(10 - std::string(name).size(), ' ') << "| "
            << std::string(6 - std::min<std::size_t>(6, value.size()), ' ') << value << " |\n";
    };
    row("S_D", r.s_d);
    row("S_R", r.s_r);
    row("C", r.c);
    row("S_overall", r.s_overall);
    out << "+-----------+--------+\n";
    out << "detected " << r.found_count << " of " << r.truth_count
        << " (aggregation: " << to_string(r.mode) << ")\n";
    for (const auto& note : r.notes) out << "note: " << note << "\n";
    return out.str();
}

}  // namespace penheal::scoring
