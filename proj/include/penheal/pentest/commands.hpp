#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace penheal::pentest {

enum class Channel { Shell, Msfconsole };

std::string_view to_string(Channel c);

struct Command {
    std::string raw;
    Channel channel = Channel::Shell;
    int timeout_seconds = 120;

    bool operator==(const Command&) const = default;
};

struct ParseResult {
    std::vector<Command> commands;
    std::vector<std::string> problems;  // unpaired or empty fragments

    bool no_command() const { return commands.empty(); }
};

/// Extracts every `$...$` body in order. Bodies starting with
/// "msfconsole:" (any case, whitespace allowed around the colon) go to the
/// Metasploit channel with the prefix removed.
ParseResult parse_commands(std::string_view llm_output);

/// Consecutive Msfconsole commands are joined with "; " into one console
/// batch; shell commands stay separate.
std::vector<Command> batch_commands(const std::vector<Command>& commands);

}  // namespace penheal::pentest
