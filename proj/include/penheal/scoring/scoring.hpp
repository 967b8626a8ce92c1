#pragma once

#include <string>
#include <utility>
#include <vector>

#include "penheal/core/model.hpp"

namespace penheal::scoring {

struct MatchReport {
    std::vector<std::pair<Vulnerability, Vulnerability>> matched;  // (found, truth)
    std::vector<Vulnerability> unmatched_found;
    std::vector<Vulnerability> unmatched_truth;
};

/// Greedy two-pass matching. Pass one pairs identical CVE ids; pass two
/// pairs the remaining entries on (service, port) when either side is
/// CVE-NA. Each truth entry is consumed at most once.
MatchReport match_findings(const std::vector<Vulnerability>& found,
                           const std::vector<Vulnerability>& truth);

/// S_D = 10 * matched / truth_count. Throws PreconditionError when the
/// truth set is empty.
double detection_coverage(const MatchReport& match);

/// Mean value over the adopted set (0 when empty).
double remediation_effectiveness(const std::vector<Recommendation>& selected);

/// Mean cost over the adopted set (0 when empty).
double remediation_cost(const std::vector<Recommendation>& selected);

double overall(double s_d, double s_r, double c, AggregationMode mode);

ScoreReport score_run(const std::vector<Vulnerability>& found,
                      const std::vector<Vulnerability>& truth,
                      const std::vector<Recommendation>& adopted, AggregationMode mode,
                      std::string run_id);

/// Field-wise arithmetic mean (the repeated-run protocol).
ScoreReport mean_report(const std::vector<ScoreReport>& reports, AggregationMode mode);

/// One-screen text table.
std::string render_table(const ScoreReport& report);

}  // namespace penheal::scoring
