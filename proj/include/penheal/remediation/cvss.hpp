#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "penheal/core/errors.hpp"
#include "penheal/core/model.hpp"

namespace penheal::cvss {

/// Raised by parse_vector. `problems` lists each defect (missing metric
/// names, duplicates, bad values, ordering) in the order found.
class VectorError : public Error {
public:
    explicit VectorError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Strict grammar: "CVSS:3.0/" or "CVSS:3.1/" followed by exactly
/// AV, AC, PR, UI, S, C, I, A in that order. Values are case-insensitive.
/// The returned metrics have base_score = 0 (unset).
CvssMetrics parse_vector(std::string_view text);

/// Finds the first "CVSS:3.x/..." token inside free text (e.g. an LLM
/// reply) and returns it, or nullopt.
std::optional<std::string> find_vector(std::string_view text);

/// CVSS v3.1 base score.
double base_score(const CvssMetrics& m);

/// Metrics with base_score filled in.
CvssMetrics scored(CvssMetrics m);

/// Canonical "CVSS:3.1/AV:N/..." rendering.
std::string to_vector_string(const CvssMetrics& m);

/// The v3.1 round-up-to-one-decimal, computed in integer arithmetic.
double round_up1(double value);

}  // namespace penheal::cvss
