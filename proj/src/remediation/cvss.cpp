#include "penheal/remediation/cvss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <regex>

#include "penheal/core/json.hpp"
#include "penheal/core/text.hpp"

namespace penheal::cvss {

VectorError::VectorError(std::vector<std::string> problems)
    : Error("invalid CVSS vector: " + text::join(problems, "; ")), problems_(std::move(problems)) {}

namespace {

constexpr std::array<std::string_view, 8> kOrder = {"AV", "AC", "PR", "UI", "S", "C", "I", "A"};

// Metric weights as published by FIRST for CVSS v3.1.
double weight(AttackVector v) {
    switch (v) {
        case AttackVector::Network: return 0.85;
        case AttackVector::Adjacent: return 0.62;
        case AttackVector::Local: return 0.55;
        case AttackVector::Physical: return 0.2;
    }
    return 0.0;
}

double weight(AttackComplexity v) { return v == AttackComplexity::Low ? 0.77 : 0.44; }

double weight(PrivilegesRequired v, Scope s) {
    switch (v) {
        case PrivilegesRequired::None: return 0.85;
        case PrivilegesRequired::Low: return s == Scope::Changed ? 0.68 : 0.62;
        case PrivilegesRequired::High: return s == Scope::Changed ? 0.5 : 0.27;
    }
    return 0.0;
}

double weight(UserInteraction v) { return v == UserInteraction::None ? 0.85 : 0.62; }

double weight(Impact v) {
    switch (v) {
        case Impact::High: return 0.56;
        case Impact::Low: return 0.22;
        case Impact::None: return 0.0;
    }
    return 0.0;
}

bool assign(CvssMetrics& m, std::string_view key, char code) {
    auto pick = [code](auto& field, std::initializer_list<std::pair<char, std::decay_t<decltype(field)>>> opts) {
        for (const auto& [c, v] : opts) {
            if (c == code) {
                field = v;
                return true;
            }
        }
        return false;
    };
    if (key == "AV")
        return pick(m.av, {{'N', AttackVector::Network}, {'A', AttackVector::Adjacent},
                           {'L', AttackVector::Local}, {'P', AttackVector::Physical}});
    if (key == "AC") return pick(m.ac, {{'L', AttackComplexity::Low}, {'H', AttackComplexity::High}});
    if (key == "PR")
        return pick(m.pr, {{'N', PrivilegesRequired::None}, {'L', PrivilegesRequired::Low},
                           {'H', PrivilegesRequired::High}});
    if (key == "UI") return pick(m.ui, {{'N', UserInteraction::None}, {'R', UserInteraction::Required}});
    if (key == "S") return pick(m.scope, {{'U', Scope::Unchanged}, {'C', Scope::Changed}});
    auto impact = {std::pair{'H', Impact::High}, std::pair{'L', Impact::Low}, std::pair{'N', Impact::None}};
    if (key == "C") return pick(m.c, impact);
    if (key == "I") return pick(m.i, impact);
    if (key == "A") return pick(m.a, impact);
    return false;
}

}  // namespace

CvssMetrics parse_vector(std::string_view input) {
    std::vector<std::string> problems;
    const std::string upper = text::to_upper(text::trim(input));
    std::string_view rest = upper;
    if (rest.starts_with("CVSS:3.0/") || rest.starts_with("CVSS:3.1/")) {
        rest.remove_prefix(9);
    } else {
        throw VectorError({"missing CVSS:3.0/ or CVSS:3.1/ prefix"});
    }

    CvssMetrics m;
    std::array<int, kOrder.size()> seen{};
    std::vector<std::string> sequence;
    for (const auto& part : text::split(rest, '/')) {
        auto colon = part.find(':');
        if (colon == std::string::npos) {
            problems.push_back("malformed component '" + part + "'");
            continue;
        }
        const std::string key = part.substr(0, colon);
        const std::string value = part.substr(colon + 1);
        auto it = std::find(kOrder.begin(), kOrder.end(), key);
        if (it == kOrder.end()) {
            problems.push_back("unknown metric '" + key + "'");
            continue;
        }
        auto idx = static_cast<std::size_t>(it - kOrder.begin());
        if (++seen[idx] == 2) problems.push_back("duplicate metric " + key);
        sequence.push_back(key);
        if (value.size() != 1 || !assign(m, key, value[0])) {
            problems.push_back("invalid value '" + value + "' for " + key);
        }
    }

    std::vector<std::string> missing;
    for (std::size_t k = 0; k < kOrder.size(); ++k) {
        if (seen[k] == 0) missing.emplace_back(kOrder[k]);
    }
    if (!missing.empty()) problems.push_back("missing metrics: " + text::join(missing, ", "));

    if (problems.empty()) {
        for (std::size_t k = 0; k < sequence.size(); ++k) {
            if (sequence[k] != kOrder[k]) {
                problems.push_back("metrics out of order: expected " + std::string(kOrder[k]) + " at position " +
                                   std::to_string(k + 1) + ", found " + sequence[k]);
                break;
            }
        }
    }
    if (!problems.empty()) throw VectorError(std::move(problems));
    return m;
}

std::optional<std::string> find_vector(std::string_view text) {
    static const std::regex kToken(R"(CVSS:3\.[01]/[A-Za-z]{1,2}:[A-Za-z](/[A-Za-z]{1,2}:[A-Za-z])*)",
                                   std::regex::icase);
    std::match_results<std::string_view::const_iterator> match;
    if (std::regex_search(text.begin(), text.end(), match, kToken)) return match.str(0);
    return std::nullopt;
}

double round_up1(double value) {
    const auto int_input = static_cast<std::int64_t>(std::llround(value * 100000.0));
    if (int_input % 10000 == 0) return static_cast<double>(int_input) / 100000.0;
    return static_cast<double>(int_input / 10000 + 1) / 10.0;
}

double base_score(const CvssMetrics& m) {
    const double iss = 1.0 - (1.0 - weight(m.c)) * (1.0 - weight(m.i)) * (1.0 - weight(m.a));
    const bool changed = m.scope == Scope::Changed;
    const double impact =
        changed ? 7.52 * (iss - 0.029) - 3.25 * std::pow(iss - 0.02, 15) : 6.42 * iss;
    const double exploitability =
        8.22 * weight(m.av) * weight(m.ac) * weight(m.pr, m.scope) * weight(m.ui);
    if (impact <= 0.0) return 0.0;
    if (changed) return round_up1(std::min(1.08 * (impact + exploitability), 10.0));
    return round_up1(std::min(impact + exploitability, 10.0));
}

CvssMetrics scored(CvssMetrics m) {
    m.base_score = base_score(m);
    return m;
}

std::string to_vector_string(const CvssMetrics& m) {
    std::string out = "CVSS:3.1";
    auto add = [&out](std::string_view key, char code) {
        out += '/';
        out += key;
        out += ':';
        out += code;
    };
    add("AV", metric_code(m.av));
    add("AC", metric_code(m.ac));
    add("PR", metric_code(m.pr));
    add("UI", metric_code(m.ui));
    add("S", metric_code(m.scope));
    add("C", metric_code(m.c));
    add("I", metric_code(m.i));
    add("A", metric_code(m.a));
    return out;
}

}  // namespace penheal::cvss
