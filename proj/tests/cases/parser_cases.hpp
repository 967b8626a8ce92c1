#pragma once

// Case tables for the three reply parsers. Shared by the unit suites and the
// acceptance binary; each check returns "" on a match, else what differed.

#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "penheal/pentest/commands.hpp"
#include "penheal/pentest/extractor.hpp"
#include "penheal/remediation/cvss.hpp"

namespace cases {

using penheal::pentest::Channel;

struct CommandCase {
    const char* input;
    std::vector<std::pair<Channel, const char*>> commands;
    std::size_t problems;
};

inline const std::vector<CommandCase>& command_cases() {
    const Channel S = Channel::Shell;
    const Channel M = Channel::Msfconsole;
    static const std::vector<CommandCase> cases = {
        {"$nmap --script vuln 10.0.2.4$", {{S, "nmap --script vuln 10.0.2.4"}}, 0},
        {"run $msfconsole: use exploit/multi/samba/usermap_script$ now",
         {{M, "use exploit/multi/samba/usermap_script"}}, 0},
        {"no dollar signs here", {}, 0},
        {"", {}, 0},
        {"$a$ $b$", {{S, "a"}, {S, "b"}}, 0},
        {"$a$\n$b$\n$c$", {{S, "a"}, {S, "b"}, {S, "c"}}, 0},
        {"$  nmap -sV 10.0.2.4  $", {{S, "nmap -sV 10.0.2.4"}}, 0},
        {"$MSFCONSOLE: search vsftpd$", {{M, "search vsftpd"}}, 0},
        {"$msfconsole :set RHOSTS 10.0.2.4$", {{M, "set RHOSTS 10.0.2.4"}}, 0},
        {"$ msfconsole:exploit$", {{M, "exploit"}}, 0},
        {"$$", {}, 1},
        {"$   $ $ls$", {{S, "ls"}}, 1},
        {"$msfconsole:$", {}, 1},
        {"$unterminated", {}, 1},
        {"$a$ $b", {{S, "a"}}, 1},
        {"$nmap -p-\n10.0.2.4$", {{S, "nmap -p-\n10.0.2.4"}}, 0},
        {"Use $curl http://10.0.2.4/$ then $msfconsole: use auxiliary/scanner/smtp/smtp_enum$",
         {{S, "curl http://10.0.2.4/"}, {M, "use auxiliary/scanner/smtp/smtp_enum"}}, 0},
        {"$echo msfconsole: hi$", {{S, "echo msfconsole: hi"}}, 0},
        {"$sqlmap -u \"http://10.0.2.4/dvwa/?id=1\" --batch$", {{S, "sqlmap -u \"http://10.0.2.4/dvwa/?id=1\" --batch"}}, 0},
        {"1. $nmap -p- 10.0.2.4$\n2. $nmap -sV -p 21 10.0.2.4$",
         {{S, "nmap -p- 10.0.2.4"}, {S, "nmap -sV -p 21 10.0.2.4"}}, 0},
        {"$msfconsole: use exploit/unix/ftp/vsftpd_234_backdoor$ $msfconsole: set RHOSTS 10.0.2.4$ $msfconsole: exploit$",
         {{M, "use exploit/unix/ftp/vsftpd_234_backdoor"}, {M, "set RHOSTS 10.0.2.4"}, {M, "exploit"}}, 0},
        {"$hacker:)$", {{S, "hacker:)"}}, 0},
    };
    return cases;
}

inline std::string check(const CommandCase& c) {
    const auto r = penheal::pentest::parse_commands(c.input);
    std::ostringstream diff;
    if (r.commands.size() != c.commands.size()) {
        diff << r.commands.size() << " commands, expected " << c.commands.size();
        return diff.str();
    }
    for (std::size_t i = 0; i < c.commands.size(); ++i) {
        if (r.commands[i].channel != c.commands[i].first || r.commands[i].raw != c.commands[i].second) {
            diff << "command " << i << " is [" << penheal::pentest::to_string(r.commands[i].channel) << "] "
                 << r.commands[i].raw;
            return diff.str();
        }
    }
    if (r.problems.size() != c.problems) {
        diff << r.problems.size() << " problems, expected " << c.problems;
        return diff.str();
    }
    if (r.no_command() != c.commands.empty()) return "no_command() disagrees";
    return "";
}

struct VectorCase {
    const char* text;
    bool ok;
    const char* mentions;  // substring expected in the error when !ok
};

inline const std::vector<VectorCase>& vector_cases() {
    static const std::vector<VectorCase> cases = {
        {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", true, ""},
        {"CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", true, ""},
        {"cvss:3.1/av:n/ac:l/pr:n/ui:n/s:u/c:h/i:h/a:h", true, ""},
        {"CVSS:3.1/AV:P/AC:H/PR:H/UI:R/S:C/C:N/I:N/A:N", true, ""},
        {"CVSS:3.1/AV:A/AC:L/PR:L/UI:N/S:U/C:L/I:L/A:L", true, ""},
        {"  CVSS:3.1/AV:L/AC:L/PR:N/UI:R/S:U/C:H/I:N/A:N  ", true, ""},
        {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H", false, "A"},
        {"CVSS:3.1/AC:L/AV:N/PR:N/UI:N/S:U/C:H/I:H/A:H", false, "order"},
        {"CVSS:2.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", false, "CVSS"},
        {"AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", false, "CVSS"},
        {"CVSS:3.1/AV:X/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", false, "AV"},
        {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H/A:H", false, "A"},
        {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:Q/C:H/I:H/A:H", false, "S"},
        {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:", false, "A"},
        {"", false, "CVSS"},
        {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H/E:F", false, "E"},
        {"CVSS:3.1/AVN/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", false, "AV"},
    };
    return cases;
}

inline std::string check(const VectorCase& c) {
    try {
        penheal::cvss::parse_vector(c.text);
    } catch (const penheal::cvss::VectorError& e) {
        if (c.ok) return std::string("rejected: ") + e.what();
        if (std::string(e.what()).find(c.mentions) == std::string::npos) return std::string("error lacks \"") + c.mentions + "\": " + e.what();
        if (e.problems().empty()) return "error lists no problems";
        return "";
    }
    return c.ok ? "" : "accepted";
}

struct ExtractorCase {
    const char* text;
    std::vector<std::tuple<std::string, std::string, std::optional<int>>> expected;  // id, service, port
    std::size_t warnings;
};

inline const std::vector<ExtractorCase>& extractor_cases() {
    static const std::vector<ExtractorCase> cases = {
        {"Exploited: CVE-2011-2523\nservice: ftp\nport: 21\ndescription: vsFTPd backdoor\nmethod: msf",
         {{"CVE-2011-2523", "ftp", 21}}, 0},
        {"Exploited: CVE-NA\nservice: http\nport: 80\ndescription: SQL injection", {{"CVE-NA", "http", 80}}, 0},
        {"Exploited: [backdoor/CVE ID]\nservice: irc\nport: 6667", {{"CVE-NA", "irc", 6667}}, 0},
        {"No exploited vulnerabilities.", {}, 0},
        {"", {}, 0},
        {"Exploited: cve-2010-2075\nService: IRC\nPort: 6667/tcp", {{"CVE-2010-2075", "irc", 6667}}, 0},
        {"1. **Exploited:** CVE-2012-1823\n   - **Service**: http\n   - **Port**: 80", {{"CVE-2012-1823", "http", 80}}, 0},
        {"Exploited: CVE-2011-2523\nport: 21", {}, 1},
        {"Exploited: CVE-NA\nservice: telnet\nport: twenty-three", {}, 1},
        {"Exploited: CVE-NA\nservice: nfs\nport: unknown", {{"CVE-NA", "nfs", std::nullopt}}, 0},
        {"Exploited: CVE-NA\nservice: smtp\nport: 99999", {}, 1},
        {"Exploited: CVE-2011-2523\nservice: ftp\nport: 21\n\nExploited: CVE-2011-2523\nservice: FTP\nport: 21",
         {{"CVE-2011-2523", "ftp", 21}}, 0},
        {"Exploited: CVE-NA\nservice: http\nport: 80\nExploited: CVE-2012-1823\nservice: http\nport: 80",
         {{"CVE-NA", "http", 80}, {"CVE-2012-1823", "http", 80}}, 0},
        {"Exploited: Samba usermap_script (CVE-2007-2447)\nservice: samba\nport: 139",
         {{"CVE-2007-2447", "samba", 139}}, 0},
    };
    return cases;
}

inline std::string check(const ExtractorCase& c) {
    const auto r = penheal::pentest::parse_extractor_output(c.text);
    std::ostringstream diff;
    if (r.findings.size() != c.expected.size()) {
        diff << r.findings.size() << " findings, expected " << c.expected.size();
        return diff.str();
    }
    for (std::size_t i = 0; i < c.expected.size(); ++i) {
        const auto& f = r.findings[i];
        if (f.id != std::get<0>(c.expected[i]) || f.service != std::get<1>(c.expected[i]) || f.port != std::get<2>(c.expected[i])) {
            diff << "finding " << i << " is " << f.id << " on " << f.service << "/" << (f.port ? std::to_string(*f.port) : "?");
            return diff.str();
        }
    }
    if (r.warnings.size() != c.warnings) {
        diff << r.warnings.size() << " warnings, expected " << c.warnings;
        return diff.str();
    }
    return "";
}

}  // namespace cases
