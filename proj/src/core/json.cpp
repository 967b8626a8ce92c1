#include "penheal/core/json.hpp"

#include <string>

#include "penheal/core/errors.hpp"

namespace penheal {

namespace {

template <typename E>
E enum_field(const json& j, const char* key, std::optional<E> (*parse)(std::string_view)) {
    const auto& text = j.at(key).get_ref<const std::string&>();
    auto value = parse(text);
    if (!value) throw ParseError(std::string("unknown value '") + text + "' for " + key, std::string::npos);
    return *value;
}

template <typename E, std::size_t N>
E from_code(const json& j, const char* key, const std::pair<char, E> (&table)[N]) {
    const auto& text = j.at(key).get_ref<const std::string&>();
    if (text.size() == 1) {
        for (const auto& [code, value] : table) {
            if (code == text[0]) return value;
        }
    }
    throw ParseError(std::string("unknown metric value '") + text + "' for " + key, std::string::npos);
}

template <typename E, std::size_t N>
char to_code(E value, const std::pair<char, E> (&table)[N]) {
    for (const auto& [code, v] : table) {
        if (v == value) return code;
    }
    return '?';
}

constexpr std::pair<char, AttackVector> kAv[] = {
    {'N', AttackVector::Network}, {'A', AttackVector::Adjacent},
    {'L', AttackVector::Local}, {'P', AttackVector::Physical}};
constexpr std::pair<char, AttackComplexity> kAc[] = {{'L', AttackComplexity::Low},
                                                     {'H', AttackComplexity::High}};
constexpr std::pair<char, PrivilegesRequired> kPr[] = {{'N', PrivilegesRequired::None},
                                                       {'L', PrivilegesRequired::Low},
                                                       {'H', PrivilegesRequired::High}};
constexpr std::pair<char, UserInteraction> kUi[] = {{'N', UserInteraction::None},
                                                    {'R', UserInteraction::Required}};
constexpr std::pair<char, Scope> kScope[] = {{'U', Scope::Unchanged}, {'C', Scope::Changed}};
constexpr std::pair<char, Impact> kImpact[] = {{'H', Impact::High}, {'L', Impact::Low}, {'N', Impact::None}};

std::string code_string(char c) { return std::string(1, c); }

}  // namespace

char metric_code(AttackVector v) { return to_code(v, kAv); }
char metric_code(AttackComplexity v) { return to_code(v, kAc); }
char metric_code(PrivilegesRequired v) { return to_code(v, kPr); }
char metric_code(UserInteraction v) { return to_code(v, kUi); }
char metric_code(Scope v) { return to_code(v, kScope); }
char metric_code(Impact v) { return to_code(v, kImpact); }

void to_json(json& j, const TaskNode& n) {
    j = json{{"id", n.id},
             {"description", n.description},
             {"status", to_string(n.status)},
             {"result_summary", n.result_summary ? json(*n.result_summary) : json(nullptr)},
             {"children", n.children}};
}

void from_json(const json& j, TaskNode& n) {
    n.id = j.at("id").get<std::string>();
    n.description = j.at("description").get<std::string>();
    n.status = enum_field<TaskStatus>(j, "status", task_status_from);
    n.result_summary.reset();
    if (j.contains("result_summary") && !j.at("result_summary").is_null()) {
        n.result_summary = j.at("result_summary").get<std::string>();
    }
    n.children = j.value("children", std::vector<TaskNode>{});
}

void to_json(json& j, const AttackPlan& p) { j = json{{"roots", p.roots}}; }
void from_json(const json& j, AttackPlan& p) { p.roots = j.at("roots").get<std::vector<TaskNode>>(); }

void to_json(json& j, const CvssMetrics& m) {
    j = json{{"av", code_string(metric_code(m.av))},     {"ac", code_string(metric_code(m.ac))},
             {"pr", code_string(metric_code(m.pr))},     {"ui", code_string(metric_code(m.ui))},
             {"scope", code_string(metric_code(m.scope))}, {"c", code_string(metric_code(m.c))},
             {"i", code_string(metric_code(m.i))},       {"a", code_string(metric_code(m.a))},
             {"base_score", m.base_score}};
}

void from_json(const json& j, CvssMetrics& m) {
    m.av = from_code(j, "av", kAv);
    m.ac = from_code(j, "ac", kAc);
    m.pr = from_code(j, "pr", kPr);
    m.ui = from_code(j, "ui", kUi);
    m.scope = from_code(j, "scope", kScope);
    m.c = from_code(j, "c", kImpact);
    m.i = from_code(j, "i", kImpact);
    m.a = from_code(j, "a", kImpact);
    m.base_score = j.at("base_score").get<double>();
}

void to_json(json& j, const Vulnerability& v) {
    j = json{{"id", v.id},
             {"service", v.service},
             {"port", v.port ? json(*v.port) : json(nullptr)},
             {"description", v.description},
             {"exploitation_method", v.exploitation_method},
             {"cvss", v.cvss ? json(*v.cvss) : json(nullptr)},
             {"cvss_source", to_string(v.cvss_source)}};
}

void from_json(const json& j, Vulnerability& v) {
    v.id = j.at("id").get<std::string>();
    v.service = j.at("service").get<std::string>();
    v.port.reset();
    if (j.contains("port") && !j.at("port").is_null()) v.port = j.at("port").get<int>();
    v.description = j.value("description", std::string{});
    v.exploitation_method = j.value("exploitation_method", std::string{});
    v.cvss.reset();
    if (j.contains("cvss") && !j.at("cvss").is_null()) v.cvss = j.at("cvss").get<CvssMetrics>();
    v.cvss_source = j.contains("cvss_source") ? enum_field<CvssSource>(j, "cvss_source", cvss_source_from)
                                               : CvssSource::Unset;
}

void to_json(json& j, const VulnIdentity& v) {
    j = json{{"id", v.id}, {"service", v.service}, {"port", v.port ? json(*v.port) : json(nullptr)}};
}

void from_json(const json& j, VulnIdentity& v) {
    v.id = j.at("id").get<std::string>();
    v.service = j.at("service").get<std::string>();
    v.port.reset();
    if (j.contains("port") && !j.at("port").is_null()) v.port = j.at("port").get<int>();
}

void to_json(json& j, const Recommendation& r) {
    j = json{{"text", r.text},
             {"target_vuln_ids", r.target_vuln_ids},
             {"cost", r.cost},
             {"value", r.value},
             {"status", to_string(r.status)},
             {"rationale", r.rationale}};
}

void from_json(const json& j, Recommendation& r) {
    r.text = j.at("text").get<std::string>();
    r.target_vuln_ids = j.at("target_vuln_ids").get<std::vector<std::string>>();
    r.cost = j.at("cost").get<double>();
    r.value = j.at("value").get<double>();
    r.status = enum_field<RecommendationStatus>(j, "status", recommendation_status_from);
    r.rationale = j.value("rationale", std::string{});
}

void to_json(json& j, const RecommendationGroup& g) {
    j = json{{"vuln_id", g.vuln}, {"candidates", g.candidates}};
}

void from_json(const json& j, RecommendationGroup& g) {
    g.vuln = j.at("vuln_id").get<VulnIdentity>();
    g.candidates = j.at("candidates").get<std::vector<Recommendation>>();
}

void to_json(json& j, const ScoreReport& r) {
    j = json{{"s_d", r.s_d},
             {"s_r", r.s_r},
             {"c", r.c},
             {"s_overall", r.s_overall},
             {"found_count", r.found_count},
             {"truth_count", r.truth_count},
             {"run_id", r.run_id},
             {"aggregation_mode", to_string(r.mode)},
             {"notes", r.notes}};
}

void from_json(const json& j, ScoreReport& r) {
    r.s_d = j.at("s_d").get<double>();
    r.s_r = j.at("s_r").get<double>();
    r.c = j.at("c").get<double>();
    r.s_overall = j.at("s_overall").get<double>();
    r.found_count = j.at("found_count").get<int>();
    r.truth_count = j.at("truth_count").get<int>();
    r.run_id = j.at("run_id").get<std::string>();
    r.mode = j.contains("aggregation_mode")
                 ? enum_field<AggregationMode>(j, "aggregation_mode", aggregation_mode_from)
                 : AggregationMode::DividedByThree;
    r.notes = j.value("notes", std::vector<std::string>{});
}

void to_json(json& j, const CostPolicy& p) {
    j = json{{"tier_scores",
              {{"low", p.score(CostTier::Low)},
               {"moderate", p.score(CostTier::Moderate)},
               {"high", p.score(CostTier::High)}}},
             {"user_preference_text", p.user_preference_text}};
}

void from_json(const json& j, CostPolicy& p) {
    p = CostPolicy{};
    if (j.contains("tier_scores")) {
        for (const auto& [key, value] : j.at("tier_scores").items()) {
            auto tier = cost_tier_from(key);
            if (!tier) throw ParseError("unknown cost tier '" + key + "'", std::string::npos);
            p.tier_scores[*tier] = value.get<double>();
        }
    }
    p.user_preference_text = j.value("user_preference_text", std::string{});
}

}  // namespace penheal
