#include "penheal/pentest/commands.hpp"

#include <regex>

#include "penheal/core/text.hpp"

namespace penheal::pentest {

std::string_view to_string(Channel c) { return c == Channel::Msfconsole ? "msfconsole" : "shell"; }

ParseResult parse_commands(std::string_view llm_output) {
    static const std::regex kMsfPrefix(R"(^\s*msfconsole\s*:\s*)", std::regex::icase);

    ParseResult result;
    std::vector<std::size_t> marks;
    for (std::size_t i = 0; i < llm_output.size(); ++i) {
        if (llm_output[i] == '$') marks.push_back(i);
    }
    for (std::size_t m = 0; m + 1 < marks.size(); m += 2) {
        const auto open = marks[m];
        const auto close = marks[m + 1];
        const std::string body(text::trim(llm_output.substr(open + 1, close - open - 1)));
        if (body.empty()) {
            result.problems.push_back("empty command at offset " + std::to_string(open));
            continue;
        }
        Command cmd;
        std::smatch match;
        if (std::regex_search(body, match, kMsfPrefix)) {
            cmd.channel = Channel::Msfconsole;
            cmd.raw = std::string(text::trim(body.substr(static_cast<std::size_t>(match.length(0)))));
            if (cmd.raw.empty()) {
                result.problems.push_back("empty msfconsole command at offset " + std::to_string(open));
                continue;
            }
        } else {
            cmd.raw = body;
        }
        result.commands.push_back(std::move(cmd));
    }
    if (marks.size() % 2 == 1) {
        result.problems.push_back("unpaired '$' at offset " + std::to_string(marks.back()));
    }
    return result;
}

std::vector<Command> batch_commands(const std::vector<Command>& commands) {
    std::vector<Command> out;
    for (const auto& c : commands) {
        if (c.channel == Channel::Msfconsole && !out.empty() && out.back().channel == Channel::Msfconsole) {
            out.back().raw += "; " + c.raw;
            out.back().timeout_seconds = std::max(out.back().timeout_seconds, c.timeout_seconds);
        } else {
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace penheal::pentest
