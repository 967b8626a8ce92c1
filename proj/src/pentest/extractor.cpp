#include "penheal/pentest/extractor.hpp"

#include <regex>

#include "penheal/core/text.hpp"

namespace penheal::pentest {

namespace {

struct Block {
    std::string id_text;
    std::size_t line_no = 0;
    std::vector<std::pair<std::string, std::string>> attrs;
};

std::string normalise_key(std::string key) {
    key = text::to_lower(text::trim(key));
    std::string out;
    for (char c : key) out += (c == ' ' || c == '-') ? '_' : c;
    return out;
}

}  // namespace

ExtractResult parse_extractor_output(std::string_view text_in) {
    static const std::regex kHeader(R"(^\s*(?:[-*]\s*)?(?:\d+[.)]\s*)?\**exploited\**\s*:\s*(.*)$)", std::regex::icase);
    static const std::regex kAttr(R"(^\s*(?:[-*]\s*)?\**([A-Za-z][A-Za-z _-]*?)\**\s*:\s*(.*)$)");
    static const std::regex kCve(R"(CVE-\d{4}-\d{4,})", std::regex::icase);
    static const std::regex kPort(R"((\d{1,5}))");

    std::vector<Block> blocks;
    std::size_t line_no = 0;
    for (auto raw : text::split_lines(text_in)) {
        ++line_no;
        const std::string line(raw);
        std::smatch m;
        if (std::regex_match(line, m, kHeader)) {
            blocks.push_back({m[1].str(), line_no, {}});
        } else if (!blocks.empty() && std::regex_match(line, m, kAttr)) {
            blocks.back().attrs.emplace_back(normalise_key(m[1].str()), std::string(text::trim(m[2].str())));
        }
    }

    ExtractResult result;
    std::vector<Vulnerability> parsed;
    for (const auto& b : blocks) {
        const std::string where = "extractor block at line " + std::to_string(b.line_no);
        Vulnerability v;
        std::smatch m;
        if (std::regex_search(b.id_text, m, kCve)) {
            v.id = text::to_upper(m[0].str());
        } else {
            v.id = std::string(kCveNa);
        }
        bool bad_port = false;
        for (const auto& [key, value] : b.attrs) {
            if (key == "service") {
                v.service = text::to_lower(value);
            } else if (key == "port") {
                std::smatch pm;
                if (std::regex_search(value, pm, kPort)) {
                    const int port = std::stoi(pm[1].str());
                    if (port <= 65535) {
                        v.port = port;
                    } else {
                        bad_port = true;
                    }
                } else if (!text::iequals(value, "unknown") && !text::iequals(value, "n/a")) {
                    bad_port = true;
                }
            } else if (key == "description") {
                v.description = value;
            } else if (key == "method" || key == "exploitation_method" || key == "exploitation") {
                v.exploitation_method = value;
            }
        }
        if (v.service.empty()) {
            result.warnings.push_back(where + ": no service line; block skipped");
            continue;
        }
        if (bad_port) {
            result.warnings.push_back(where + ": unreadable port; block skipped");
            continue;
        }
        parsed.push_back(std::move(v));
    }
    result.findings = deduplicate(parsed);
    return result;
}

std::string counterfactual_line(const Vulnerability& v) {
    std::string line = "Port " + (v.port ? std::to_string(*v.port) : std::string("unknown")) + "/" + v.service + ": ";
    line += v.description.empty() ? std::string("exploited vulnerability") : v.description;
    line += v.id == kCveNa ? " (Unknown CVE)" : " (" + v.id + ")";
    return line;
}

}  // namespace penheal::pentest
