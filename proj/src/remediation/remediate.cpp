#include "penheal/remediation/remediate.hpp"

#include <cctype>
#include <regex>
#include <set>
#include <sstream>
#include <variant>

#include "penheal/core/text.hpp"
#include "penheal/llm/prompts.hpp"
#include "penheal/remediation/cvss.hpp"

namespace penheal::remediation {

using llm::PromptId;
using llm::render_prompt;

namespace {

std::string port_text(const Vulnerability& v) { return v.port ? std::to_string(*v.port) : std::string("unknown"); }

std::string describe_finding(const Vulnerability& v) {
    std::string s = v.id + " on " + v.service + "/" + port_text(v);
    if (!v.description.empty()) s += "\nDescription: " + v.description;
    if (!v.exploitation_method.empty()) s += "\nExploited via: " + v.exploitation_method;
    if (v.cvss) {
        s += "\nCVSS: " + cvss::to_vector_string(*v.cvss) + " (base score " + text::format_fixed(v.cvss->base_score, 1) + ")";
    }
    return s;
}

std::string template_text(PromptId id) { return std::string(llm::prompt_template(id)); }

// Parses an Estimator reply, or returns the reason it cannot.
std::variant<CvssMetrics, std::string> try_vector(std::string_view reply) {
    const auto found = cvss::find_vector(reply);
    if (!found) return std::string("no CVSS vector string found in the reply");
    try {
        return cvss::parse_vector(*found);
    } catch (const cvss::VectorError& e) {
        return std::string(e.what());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Estimator
// ---------------------------------------------------------------------------

CvssMetrics estimate_vector(const Vulnerability& finding, std::string_view context, llm::Gateway& gw,
                            std::vector<std::string>& warnings) {
    std::vector<llm::ChatTurn> turns{
        llm::system_turn(template_text(PromptId::EstimatorSystem)),
        llm::user_turn(render_prompt(PromptId::EstimatorTask,
                                     {{"finding", describe_finding(finding)},
                                      {"context", context.empty() ? std::string("(none)") : std::string(context)}}))};
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto reply = gw.complete(AgentRole::Estimator, turns);
        auto parsed = try_vector(reply);
        if (auto* m = std::get_if<CvssMetrics>(&parsed)) return cvss::scored(*m);
        const auto& why = std::get<std::string>(parsed);
        if (attempt == 0) {
            turns.push_back(llm::assistant_turn(reply));
            turns.push_back(llm::user_turn(render_prompt(PromptId::EstimatorRetry, {{"error", why}})));
        } else {
            warnings.push_back(identity_key(finding) + ": Estimator gave no usable vector (" + why +
                               "); using the fallback vector");
        }
    }
    return cvss::scored(cvss::parse_vector(kFallbackVector));
}

Vulnerability enrich(Vulnerability finding, CveSource* cves, std::string_view context, llm::Gateway& gw,
                     std::vector<std::string>& warnings, std::vector<std::string>* notes) {
    if (finding.cvss) return finding;
    if (cves && is_cve_id(finding.id)) {
        try {
            const auto rec = lookup_cve(finding.id, *cves);
            finding.cvss = rec.metrics;
            finding.cvss_source = CvssSource::NvdLookup;
            if (finding.description.empty()) finding.description = rec.description;
            return finding;
        } catch (const CveNotFound&) {
            if (notes) notes->push_back(finding.id + ": no CVSS v3 record in NVD data; estimated");
        } catch (const Error& e) {
            warnings.push_back(finding.id + ": NVD lookup failed (" + e.what() + "); estimating");
        }
    }
    finding.cvss = estimate_vector(finding, context, gw, warnings);
    finding.cvss_source = CvssSource::Estimated;
    return finding;
}

// ---------------------------------------------------------------------------
// Advisor
// ---------------------------------------------------------------------------

std::vector<std::string> parse_numbered_list(std::string_view text_in) {
    static const std::regex kItem(R"(^\s*(?:\*\*)?\d+[.)](?:\*\*)?\s+(.*)$)");
    std::vector<std::string> items;
    bool open = false;
    for (auto raw : text::split_lines(text_in)) {
        const std::string line(raw);
        std::smatch m;
        if (std::regex_match(line, m, kItem)) {
            items.emplace_back(text::trim(m[1].str()));
            open = true;
        } else if (open && !text::trim(line).empty()) {
            auto& cur = items.back();
            if (!cur.empty()) cur += '\n';
            cur += text::trim(line);
        }
    }
    std::vector<std::string> out;
    for (auto& i : items) {
        if (!i.empty()) out.push_back(std::move(i));
    }
    return out;
}

RecommendationGroup advise_one(const Vulnerability& finding, llm::Gateway& gw, std::vector<std::string>& warnings) {
    RecommendationGroup group;
    group.vuln = identity_of(finding);
    std::vector<llm::ChatTurn> turns{
        llm::system_turn(template_text(PromptId::AdvisorSystem)),
        llm::user_turn(render_prompt(PromptId::AdvisorTask, {{"finding", describe_finding(finding)}}))};
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto reply = gw.complete(AgentRole::Advisor, turns);
        const auto items = parse_numbered_list(reply);
        if (!items.empty()) {
            for (const auto& item : items) {
                Recommendation r;
                r.text = item;
                r.target_vuln_ids = {identity_key(finding)};
                group.candidates.push_back(std::move(r));
            }
            return group;
        }
        turns.push_back(llm::assistant_turn(reply));
        turns.push_back(llm::user_turn(template_text(PromptId::AdvisorRetry)));
    }
    warnings.push_back(identity_key(finding) + ": Advisor gave no numbered list; no recommendations");
    return group;
}

std::vector<RecommendationGroup> advise(const std::vector<Vulnerability>& findings, llm::Gateway& gw,
                                        std::vector<std::string>& warnings) {
    if (findings.empty()) throw PreconditionError("advise needs at least one finding");
    std::vector<RecommendationGroup> groups;
    for (const auto& f : findings) {
        auto g = advise_one(f, gw, warnings);
        if (!g.candidates.empty()) groups.push_back(std::move(g));
    }
    return groups;
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

std::string_view to_string(Effect e) {
    switch (e) {
        case Effect::Full: return "full";
        case Effect::Partial: return "partial";
        case Effect::Zero: return "zero";
        case Effect::Negative: return "negative";
    }
    return "?";
}

EvaluatorReply parse_evaluator_reply(std::string_view text_in) {
    static const std::regex kField(R"(^\s*(?:[-*]\s*)?\**\s*(effectiveness|addresses|cost|rationale)\s*\**\s*:\s*\**\s*(.*?)\s*\**\s*$)",
                                   std::regex::icase);
    static const std::regex kEffect(R"(^(full|partial|zero|negative)\b\s*\(?\s*(-?\d+(?:\.\d+)?)?\s*%?\s*\)?.*$)",
                                    std::regex::icase);
    static const std::regex kNumber(R"(^(\d+(?:\.\d+)?)\b.*$)");
    static const std::regex kInt(R"(\d+)");

    EvaluatorReply out;
    bool have_effect = false;
    bool have_cost = false;
    for (auto raw : text::split_lines(text_in)) {
        const std::string line(raw);
        std::smatch m;
        if (!std::regex_match(line, m, kField)) continue;
        const auto key = text::to_lower(m[1].str());
        const std::string value(text::trim(m[2].str()));
        if (key == "effectiveness") {
            std::smatch em;
            if (!std::regex_match(value, em, kEffect)) throw ParseError("unrecognised effectiveness \"" + value + "\"", 0);
            const auto word = text::to_lower(em[1].str());
            out.effect = word == "full" ? Effect::Full
                         : word == "partial" ? Effect::Partial
                         : word == "zero" ? Effect::Zero
                                          : Effect::Negative;
            if (out.effect == Effect::Partial || out.effect == Effect::Negative) {
                if (!em[2].matched) throw ParseError(word + " effectiveness needs a percentage", 0);
                out.k_percent = std::stod(em[2].str());
                if (out.k_percent < 0 || out.k_percent > 100) {
                    throw ParseError("percentage out of range: " + em[2].str(), 0);
                }
            }
            have_effect = true;
        } else if (key == "addresses") {
            for (auto it = std::sregex_iterator(value.begin(), value.end(), kInt); it != std::sregex_iterator(); ++it) {
                out.addresses.push_back(std::stoi(it->str()));
            }
        } else if (key == "cost") {
            const auto lower = text::to_lower(value);
            std::smatch nm;
            if (text::istarts_with(lower, "low")) {
                out.cost_tier = CostTier::Low;
            } else if (text::istarts_with(lower, "moderate") || text::istarts_with(lower, "medium")) {
                out.cost_tier = CostTier::Moderate;
            } else if (text::istarts_with(lower, "high")) {
                out.cost_tier = CostTier::High;
            } else if (std::regex_match(lower, nm, kNumber)) {
                const double c = std::stod(nm[1].str());
                if (c > 10.0) throw ParseError("explicit cost out of range: " + nm[1].str(), 0);
                out.explicit_cost = c;
            } else {
                throw ParseError("unrecognised cost \"" + value + "\"", 0);
            }
            have_cost = true;
        } else {
            out.rationale = value;
        }
    }
    if (!have_effect) throw ParseError("missing Effectiveness line", 0);
    if (!have_cost) throw ParseError("missing Cost line", 0);
    return out;
}

double compute_value(Effect effect, double k_percent, double target_score_sum) {
    double v = 0.0;
    switch (effect) {
        case Effect::Full: v = target_score_sum; break;
        case Effect::Partial: v = k_percent / 100.0 * target_score_sum; break;
        case Effect::Zero: v = 0.0; break;
        case Effect::Negative: v = -k_percent / 100.0 * target_score_sum; break;
    }
    return round_to(v, 2) + 0.0;  // + 0.0 turns -0 into 0
}

std::string value_definition() {
    return "full: the vulnerability can no longer be exploited; the value is its full CVSS base score.\n"
           "partial <k>%: the risk drops by about k percent; the value is k% of the CVSS base score.\n"
           "zero: the risk does not change; the value is 0.\n"
           "negative <k>%: the system becomes more exposed; the value is minus k% of the CVSS base score.\n"
           "If the recommendation fixes several of the listed vulnerabilities, list all of them under "
           "Addresses; their scores are added together.";
}

std::string cost_definition(const CostPolicy& policy) {
    std::string s = "low (cost " + text::format_fixed(policy.score(CostTier::Low), 1) +
                    "): a quick change such as a package update or a configuration edit with no service interruption.\n"
                    "moderate (cost " + text::format_fixed(policy.score(CostTier::Moderate), 1) +
                    "): noticeable effort or a short service interruption, such as migrating a configuration or "
                    "adding monitoring.\n"
                    "high (cost " + text::format_fixed(policy.score(CostTier::High), 1) +
                    "): shutting down or replacing a service, or work that disrupts users.\n"
                    "You may instead give an explicit number from 0 to 10.";
    if (!text::trim(policy.user_preference_text).empty()) {
        s += "\nUser preference: " + policy.user_preference_text;
    }
    return s;
}

std::string vulnerability_list(const std::vector<Vulnerability>& findings) {
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < findings.size(); ++i) {
        const auto& f = findings[i];
        std::string line = std::to_string(i + 1) + ". " + f.id + " on " + f.service + "/" + port_text(f);
        if (!f.description.empty()) line += ": " + f.description;
        if (f.cvss) line += " (CVSS base score " + text::format_fixed(f.cvss->base_score, 1) + ")";
        lines.push_back(std::move(line));
    }
    return text::join(lines, "\n");
}

Recommendation evaluate(Recommendation rec, const std::vector<Vulnerability>& findings, std::size_t own,
                        const CostPolicy& policy, llm::Gateway& gw, std::vector<std::string>& warnings) {
    if (own >= findings.size()) throw PreconditionError("evaluate: finding index out of range");
    for (const auto& f : findings) {
        if (!f.cvss) throw PreconditionError("evaluate: " + identity_key(f) + " has no CVSS score");
    }
    std::vector<llm::ChatTurn> turns{
        llm::system_turn(render_prompt(PromptId::EvaluatorSystem, {{"vulns", vulnerability_list(findings)},
                                                                   {"value_def", value_definition()},
                                                                   {"cost_def", cost_definition(policy)}})),
        llm::user_turn(render_prompt(PromptId::EvaluatorTask, {{"recommendation", rec.text}}))};

    std::optional<EvaluatorReply> parsed;
    for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
        const auto reply = gw.complete(AgentRole::Evaluator, turns);
        try {
            parsed = parse_evaluator_reply(reply);
        } catch (const ParseError& e) {
            if (attempt == 0) {
                turns.push_back(llm::assistant_turn(reply));
                turns.push_back(llm::user_turn(template_text(PromptId::EvaluatorRetry)));
            } else {
                warnings.push_back("evaluator reply unusable for \"" + text::truncate_with_marker(rec.text, 60, "...") +
                                   "\" (" + e.what() + "); scored as moderate cost, zero value");
            }
        }
    }

    rec.target_vuln_ids = {identity_key(findings[own])};
    if (!parsed) {
        rec.cost = policy.score(CostTier::Moderate);
        rec.value = 0.0;
        return rec;
    }

    std::set<std::size_t> targets{own};
    for (int a : parsed->addresses) {
        if (a >= 1 && static_cast<std::size_t>(a) <= findings.size()) {
            targets.insert(static_cast<std::size_t>(a - 1));
        } else {
            warnings.push_back("evaluator named vulnerability " + std::to_string(a) + ", which is not in the list");
        }
    }
    double sum = 0.0;
    rec.target_vuln_ids.clear();
    for (auto t : targets) {
        sum += findings[t].cvss->base_score;
        rec.target_vuln_ids.push_back(identity_key(findings[t]));
    }
    rec.value = compute_value(parsed->effect, parsed->k_percent, sum);
    rec.cost = parsed->explicit_cost ? *parsed->explicit_cost : policy.score(parsed->cost_tier.value_or(CostTier::Moderate));
    rec.rationale = parsed->rationale;
    return rec;
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

RemediationResult remediate(const std::vector<Vulnerability>& findings_in, const RunConfig& cfg, llm::Gateway& gw,
                            CveSource* cves, const std::vector<std::string>& contexts) {
    RemediationResult out;
    const auto findings = deduplicate(findings_in);
    if (findings.empty()) {
        out.notes.push_back("no findings; nothing to remediate");
        return out;
    }
    for (std::size_t i = 0; i < findings.size(); ++i) {
        const std::string_view ctx = i < contexts.size() ? std::string_view(contexts[i]) : std::string_view();
        out.findings.push_back(enrich(findings[i], cves, ctx, gw, out.warnings, &out.notes));
    }

    std::vector<RecommendationGroup> groups;
    for (std::size_t i = 0; i < out.findings.size(); ++i) {
        auto g = advise_one(out.findings[i], gw, out.warnings);
        if (g.candidates.empty()) continue;
        for (auto& c : g.candidates) c = evaluate(std::move(c), out.findings, i, cfg.cost_policy, gw, out.warnings);
        groups.push_back(std::move(g));
    }

    const double n = static_cast<double>(out.findings.size());
    if (!cfg.evaluator_enabled) {
        out.budget = cfg.budget_per_vuln * n;
        for (auto& g : groups) {
            for (std::size_t c = 0; c < g.candidates.size(); ++c) {
                g.candidates[c].status = c == 0 ? RecommendationStatus::Adopted : RecommendationStatus::Discarded;
            }
        }
        out.notes.push_back("evaluator disabled: first recommendation of each group adopted without selection");
        out.groups = std::move(groups);
    } else {
        Selection sel = cfg.budget_mode == BudgetMode::PerGroup ? select_per_group(std::move(groups), cfg.budget_per_vuln)
                                                                : select(std::move(groups), cfg.budget_per_vuln * n);
        out.budget = cfg.budget_mode == BudgetMode::PerGroup ? cfg.budget_per_vuln * static_cast<double>(sel.groups.size())
                                                             : cfg.budget_per_vuln * n;
        out.groups = std::move(sel.groups);
    }
    for (const auto& g : out.groups) {
        for (const auto& c : g.candidates) {
            if (c.status != RecommendationStatus::Adopted) continue;
            out.selected.push_back(c);
            out.budget_used += c.cost;
            out.total_value += c.value;
        }
    }
    out.budget_used = round_to(out.budget_used, 2);
    out.total_value = round_to(out.total_value, 2);
    return out;
}

std::string render_recommendations(const std::vector<RecommendationGroup>& groups) {
    std::ostringstream os;
    for (const auto& g : groups) {
        os << "Vulnerability: " << g.vuln.id << " on " << g.vuln.service << "/"
           << (g.vuln.port ? std::to_string(*g.vuln.port) : std::string("unknown")) << '\n';
        for (const auto& c : g.candidates) {
            std::string label(to_string(c.status));
            label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
            std::string body = c.text;
            for (auto& ch : body) {
                if (ch == '\n') ch = ' ';
            }
            os << "  [" << label << "] " << body << " Cost: " << text::format_fixed(c.cost, 1)
               << ", Value: " << text::format_fixed(c.value, 1) << '\n';
        }
    }
    return os.str();
}

}  // namespace penheal::remediation
