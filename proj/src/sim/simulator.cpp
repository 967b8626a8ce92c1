#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "penheal/core/text.hpp"
#include "penheal/sim/sim.hpp"

namespace penheal::sim {

namespace {

constexpr int kHandlerPort = 4444;
constexpr int kFirstEphemeralPort = 40000;

// Shell-style word splitting with single/double quotes and backslash escapes.
std::vector<std::string> shell_split(std::string_view s) {
    std::vector<std::string> words;
    std::string cur;
    bool in_word = false;
    char quote = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (quote) {
            if (c == quote) {
                quote = 0;
            } else if (c == '\\' && quote == '"' && i + 1 < s.size()) {
                cur += s[++i];
            } else {
                cur += c;
            }
        } else if (c == '\'' || c == '"') {
            quote = c;
            in_word = true;
        } else if (c == '\\' && i + 1 < s.size()) {
            cur += s[++i];
            in_word = true;
        } else if (c == ' ' || c == '\t' || c == '\n') {
            if (in_word) words.push_back(std::move(cur));
            cur.clear();
            in_word = false;
        } else {
            cur += c;
            in_word = true;
        }
    }
    if (in_word) words.push_back(std::move(cur));
    return words;
}

std::string basename_of(const std::string& prog) {
    const auto slash = prog.rfind('/');
    return slash == std::string::npos ? prog : prog.substr(slash + 1);
}

std::optional<int> to_port(std::string_view s) {
    if (s.empty() || s.size() > 5) return std::nullopt;
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
    }
    if (v > 65535) return std::nullopt;
    return v;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string url_decode(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
            out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
            i += 2;
        } else if (s[i] == '+') {
            out += ' ';
        } else {
            out += s[i];
        }
    }
    return out;
}

struct Url {
    std::string host;
    int port = 80;
    std::string path = "/";
    std::string query;  // without '?'
};

std::optional<Url> parse_url(std::string_view raw) {
    std::string_view s = raw;
    if (text::istarts_with(s, "http://")) {
        s.remove_prefix(7);
    } else if (text::istarts_with(s, "https://")) {
        s.remove_prefix(8);
    }
    if (s.empty()) return std::nullopt;
    Url u;
    const auto path_start = s.find_first_of("/?");
    std::string_view authority = s.substr(0, path_start);
    std::string_view rest = path_start == std::string_view::npos ? std::string_view{} : s.substr(path_start);
    const auto colon = authority.find(':');
    if (colon != std::string_view::npos) {
        auto port = to_port(authority.substr(colon + 1));
        if (!port) return std::nullopt;
        u.port = *port;
        authority = authority.substr(0, colon);
    }
    u.host = std::string(authority);
    const auto q = rest.find('?');
    if (q != std::string_view::npos) {
        u.query = std::string(rest.substr(q + 1));
        rest = rest.substr(0, q);
    }
    if (!rest.empty()) u.path = std::string(rest);
    return u;
}

bool looks_like_sqli(const std::string& decoded_query) {
    const auto q = text::to_lower(decoded_query);
    return q.find('\'') != std::string::npos || q.find("union select") != std::string::npos ||
           q.find(" or 1=1") != std::string::npos || q.find("sleep(") != std::string::npos;
}

std::string service_of_login_module(std::string_view module) {
    if (module.find("/ssh/") != std::string_view::npos) return "ssh";
    if (module.find("/telnet/") != std::string_view::npos) return "telnet";
    if (module.find("/mysql/") != std::string_view::npos) return "mysql";
    if (module.find("/postgres/") != std::string_view::npos) return "postgresql";
    if (module.find("/ftp/") != std::string_view::npos) return "ftp";
    return "";
}

}  // namespace

struct Simulator::Ctx {
    SimState state;
    int exit_status = 0;
    bool msf_session_root = false;
    bool msf_session_open = false;
};

Simulator::Simulator(HostModel model, std::string address)
    : model_(std::move(model)), address_(address.empty() ? model_.default_address : std::move(address)) {}

bool Simulator::matches(std::string_view pattern, std::string_view key) {
    const auto star = pattern.find('*');
    if (star == std::string_view::npos) return pattern == key;
    const auto prefix = pattern.substr(0, star);
    const auto suffix = pattern.substr(star + 1);
    return key.size() >= prefix.size() + suffix.size() && key.substr(0, prefix.size()) == prefix &&
           key.substr(key.size() - suffix.size()) == suffix;
}

bool Simulator::targets_host(std::string_view host) const {
    if (host.empty()) return false;
    if (host == address_) return true;
    if (!model_.hostname.empty()) {
        if (text::iequals(host, model_.hostname)) return true;
        if (text::iequals(host, model_.hostname + "." + model_.domain)) return true;
    }
    // a.b.c.0/24 style sweep that covers the address
    const auto slash = host.find('/');
    if (slash != std::string_view::npos && host.substr(slash) == "/24") {
        const auto net = host.substr(0, slash);
        const auto a = net.rfind('.');
        const auto b = address_.rfind('.');
        return a != std::string_view::npos && b != std::string::npos && net.substr(0, a) == address_.substr(0, b);
    }
    return false;
}

std::string Simulator::expand(std::string_view text) const {
    std::string out(text);
    static constexpr std::string_view kPlaceholder = "{address}";
    for (auto pos = out.find(kPlaceholder); pos != std::string::npos; pos = out.find(kPlaceholder, pos)) {
        out.replace(pos, kPlaceholder.size(), address_);
        pos += address_.size();
    }
    return out;
}

std::optional<std::string> Simulator::fire(const std::string& key, Ctx& ctx) const {
    for (const auto& svc : model_.services) {
        for (const auto& w : svc.weaknesses) {
            if (!matches(w.trigger, key)) continue;
            const auto& row = model_.ground_truth.at(static_cast<std::size_t>(w.truth));
            ctx.state.exploited.emplace(row.port.value_or(svc.port), row.id);
            ctx.state.triggered_truth.insert(w.truth);
            std::ostringstream out;
            if (w.effect == Effect::InfoLeak) {
                out << expand(w.artifact);
            } else {
                ++ctx.state.shells_open;
                const bool root = w.effect == Effect::RootShell;
                ctx.msf_session_open = true;
                ctx.msf_session_root = root;
                out << "[sim] " << (root ? "root shell" : "shell") << " obtained through " << svc.name << "/"
                    << svc.port << "\n";
                out << (w.artifact.empty() ? (root ? "uid=0(root) gid=0(root)" : "uid=1000(msfadmin) gid=1000(msfadmin)")
                                           : expand(w.artifact));
            }
            return out.str();
        }
    }
    return std::nullopt;
}

SimResult Simulator::simulate(std::string_view command, bool msf, const SimState& state) const {
    Ctx ctx;
    ctx.state = state;
    std::string body;
    const auto trimmed = text::trim(command);
    if (msf) {
        ctx.state.pending.reset();
        body = run_msf(trimmed, ctx);
    } else if (ctx.state.pending) {
        body = continue_login(trimmed, ctx);
    } else {
        body = run_shell(trimmed, ctx);
    }
    SimResult r;
    r.output = "[sim] simulated host " + model_.name + " at " + address_ + "\n" + body;
    if (!r.output.empty() && r.output.back() != '\n') r.output += '\n';
    r.exit_status = ctx.exit_status;
    r.state = std::move(ctx.state);
    return r;
}

// ---------------------------------------------------------------------------
// Logins
// ---------------------------------------------------------------------------

std::string Simulator::try_login(const std::string& service, int port, const std::string& user,
                                 const std::string& pass, Ctx& ctx) const {
    const std::string key = "cred:" + service + ":" + user + "/" + pass;
    const bool shared = std::find(model_.credentials.begin(), model_.credentials.end(),
                                  std::make_pair(user, pass)) != model_.credentials.end();
    auto fired = fire(key, ctx);
    std::ostringstream out;
    if (service == "telnet") {
        if (!fired) {
            ctx.exit_status = 1;
            return "Login incorrect\nmetasploitable login: \nConnection closed by foreign host.";
        }
        out << "Linux metasploitable 2.6.24-16-server #1 SMP Thu Apr 10 13:58:00 UTC 2008 i686\n"
            << user << "@metasploitable:~$\n" << *fired;
    } else if (service == "ssh") {
        if (!fired) {
            ctx.exit_status = 255;
            return user + "@" + address_ + ": Permission denied (publickey,password).";
        }
        out << "Linux metasploitable 2.6.24-16-server #1 SMP Thu Apr 10 13:58:00 UTC 2008 i686\n"
            << user << "@metasploitable:~$\n" << *fired;
    } else if (service == "mysql") {
        if (!fired) {
            ctx.exit_status = 1;
            return "ERROR 1045 (28000): Access denied for user '" + user + "'@'" + model_.attacker_address +
                   "' (using password: " + (pass.empty() ? "NO" : "YES") + ")";
        }
        out << "Welcome to the MySQL monitor.  Commands end with ; or \\g.\n"
            << "Server version: 5.0.51a-3ubuntu5 (Ubuntu)\nmysql>\n" << *fired;
    } else if (service == "postgresql") {
        if (!fired) {
            ctx.exit_status = 2;
            return "psql: FATAL:  password authentication failed for user \"" + user + "\"";
        }
        out << "psql (8.3.1)\nType \"help\" for help.\n\n" << user << "=#\n" << *fired;
    } else if (service == "ftp") {
        if (fired) {
            out << "230 Login successful.\n" << *fired;
        } else if (shared) {
            out << "230 Login successful.\nRemote system type is UNIX.\nUsing binary mode to transfer files.";
        } else {
            ctx.exit_status = 1;
            return "530 Login incorrect.\nLogin failed.";
        }
    } else {
        ctx.exit_status = 1;
        return "login: unsupported service " + service;
    }
    (void)port;
    return out.str();
}

std::string Simulator::continue_login(std::string_view line, Ctx& ctx) const {
    auto pending = *ctx.state.pending;
    const std::string input(text::trim(line));
    if (!pending.awaiting_password) {
        pending.user = input;
        pending.awaiting_password = true;
        if (pending.service == "ftp" && input.size() >= 2 && input.substr(input.size() - 2) == ":)") {
            ctx.state.pending.reset();
            auto fired = fire("ftp:user:" + input, ctx);
            std::string out = "331 Please specify the password.\n";
            if (fired) {
                out += "[sim] backdoor listener opened on 6200/tcp\n" + *fired;
            }
            return out;
        }
        ctx.state.pending = pending;
        return pending.service == "ftp" ? "331 Please specify the password.\nPassword:" : "Password:";
    }
    ctx.state.pending.reset();
    return try_login(pending.service, pending.port, pending.user, input, ctx);
}

// ---------------------------------------------------------------------------
// Shell grammar
// ---------------------------------------------------------------------------

std::string Simulator::run_shell(std::string_view command, Ctx& ctx) const {
    auto words = shell_split(command);
    std::map<std::string, std::string> env;
    while (!words.empty()) {
        const auto eq = words.front().find('=');
        if (words.front() == "sudo") {
            words.erase(words.begin());
        } else if (eq != std::string::npos && eq > 0 && words.front().find('/') == std::string::npos) {
            env[words.front().substr(0, eq)] = words.front().substr(eq + 1);
            words.erase(words.begin());
        } else {
            break;
        }
    }
    if (words.empty()) return "";
    const std::string prog = basename_of(words[0]);
    const std::vector<std::string> args(words.begin() + 1, words.end());
    std::ostringstream out;

    auto unreachable = [&](const std::string& host, int port) {
        ctx.exit_status = 1;
        return prog + ": connect to host " + host + " port " + std::to_string(port) + ": No route to host";
    };
    auto refused = [&](const std::string& host, int port) {
        ctx.exit_status = 1;
        return prog + ": connect to host " + host + " port " + std::to_string(port) + ": Connection refused";
    };

    if (prog == "nmap") return run_nmap(args, ctx);

    if (prog == "msfconsole") {
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "-x") return run_msf(args[i + 1], ctx);
        }
        ctx.exit_status = 1;
        return "[-] interactive console sessions are not available here; pass commands with -x";
    }

    if (prog == "telnet" || prog == "ftp" || prog == "nc" || prog == "netcat") {
        std::vector<std::string> pos;
        for (const auto& a : args) {
            if (!a.empty() && a[0] != '-') pos.push_back(a);
        }
        if (pos.empty()) {
            ctx.exit_status = 1;
            return "usage: " + prog + " host [port]";
        }
        const std::string host = pos[0];
        const int default_port = prog == "ftp" ? 21 : 23;
        int port = default_port;
        if (pos.size() > 1) {
            if (auto p = to_port(pos[1])) port = *p;
        } else if (prog == "nc" || prog == "netcat") {
            ctx.exit_status = 1;
            return "nc: missing port number";
        }
        if (!targets_host(host)) return unreachable(host, port);
        const auto* svc = model_.service_on(port);
        if (!svc) {
            if (prog == "telnet") {
                ctx.exit_status = 1;
                return "Trying " + address_ + "...\ntelnet: Unable to connect to remote host: Connection refused";
            }
            return refused(host, port);
        }
        if (prog == "telnet" && port == 23) {
            ctx.state.pending = PendingLogin{"telnet", 23, "", false};
            out << "Trying " << address_ << "...\nConnected to " << address_ << ".\nEscape character is '^]'.\n"
                << svc->banner << "\nmetasploitable login:";
            return out.str();
        }
        if (prog == "ftp" && port == 21) {
            ctx.state.pending = PendingLogin{"ftp", 21, "", false};
            out << "Connected to " << address_ << ".\n" << svc->banner << "\nName (" << address_ << ":root):";
            return out.str();
        }
        if (prog == "telnet") out << "Trying " << address_ << "...\nConnected to " << address_ << ".\n";
        out << (svc->banner.empty() ? "(connected; no banner)" : svc->banner);
        return out.str();
    }

    if (prog == "ssh" || prog == "sshpass") {
        std::string password;
        bool have_password = false;
        std::vector<std::string> rest = args;
        if (prog == "sshpass") {
            for (std::size_t i = 0; i < rest.size(); ++i) {
                if (rest[i] == "-p" && i + 1 < rest.size()) {
                    password = rest[i + 1];
                    have_password = true;
                    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i), rest.begin() + static_cast<std::ptrdiff_t>(i) + 2);
                    break;
                }
                if (rest[i].rfind("-p", 0) == 0 && rest[i].size() > 2) {
                    password = rest[i].substr(2);
                    have_password = true;
                    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
                    break;
                }
            }
            if (!rest.empty() && basename_of(rest[0]) == "ssh") rest.erase(rest.begin());
        }
        std::string user = "root";
        std::string host;
        int port = 22;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            const auto& a = rest[i];
            if ((a == "-l") && i + 1 < rest.size()) {
                user = rest[++i];
            } else if (a == "-p" && i + 1 < rest.size()) {
                if (auto p = to_port(rest[++i])) port = *p;
            } else if ((a == "-o" || a == "-i") && i + 1 < rest.size()) {
                ++i;
            } else if (!a.empty() && a[0] != '-' && host.empty()) {
                const auto at = a.find('@');
                if (at != std::string::npos) {
                    user = a.substr(0, at);
                    host = a.substr(at + 1);
                } else {
                    host = a;
                }
            }
        }
        if (host.empty()) {
            ctx.exit_status = 255;
            return "usage: ssh [-l login_name] [-p port] destination [command]";
        }
        if (!targets_host(host)) return unreachable(host, port);
        if (!model_.service_on(port)) return refused(host, port);
        if (!have_password) {
            ctx.state.pending = PendingLogin{"ssh", port, user, true};
            return user + "@" + address_ + "'s password:";
        }
        return try_login("ssh", port, user, password, ctx);
    }

    if (prog == "mysql") {
        std::string host, user = "root", password;
        for (std::size_t i = 0; i < args.size(); ++i) {
            const auto& a = args[i];
            if (a == "-h" && i + 1 < args.size()) host = args[++i];
            else if (a.rfind("-h", 0) == 0 && a.size() > 2) host = a.substr(2);
            else if (a.rfind("--host=", 0) == 0) host = a.substr(7);
            else if (a == "-u" && i + 1 < args.size()) user = args[++i];
            else if (a.rfind("-u", 0) == 0 && a.size() > 2) user = a.substr(2);
            else if (a.rfind("--user=", 0) == 0) user = a.substr(7);
            else if (a.rfind("--password=", 0) == 0) password = a.substr(11);
            else if (a.rfind("-p", 0) == 0 && a.size() > 2) password = a.substr(2);
        }
        if (host.empty()) {
            ctx.exit_status = 1;
            return "ERROR 2002 (HY000): Can't connect to local MySQL server through socket '/var/run/mysqld/mysqld.sock' (2)";
        }
        if (!targets_host(host)) {
            ctx.exit_status = 1;
            return "ERROR 2003 (HY000): Can't connect to MySQL server on '" + host + "' (113)";
        }
        return try_login("mysql", 3306, user, password, ctx);
    }

    if (prog == "psql") {
        std::string host, user = "root", password = env.count("PGPASSWORD") ? env["PGPASSWORD"] : "";
        for (std::size_t i = 0; i < args.size(); ++i) {
            const auto& a = args[i];
            if (a == "-h" && i + 1 < args.size()) host = args[++i];
            else if (a == "-U" && i + 1 < args.size()) user = args[++i];
            else if (a.rfind("postgres://", 0) == 0 || a.rfind("postgresql://", 0) == 0) {
                auto rest = a.substr(a.find("://") + 3);
                const auto at = rest.find('@');
                if (at != std::string::npos) {
                    const auto cred = rest.substr(0, at);
                    const auto colon = cred.find(':');
                    user = cred.substr(0, colon);
                    if (colon != std::string::npos) password = cred.substr(colon + 1);
                    rest = rest.substr(at + 1);
                }
                host = rest.substr(0, rest.find_first_of(":/"));
            }
        }
        if (host.empty() || !targets_host(host)) {
            ctx.exit_status = 2;
            return "psql: could not connect to server: No route to host\n\tIs the server running on host \"" +
                   host + "\" and accepting TCP/IP connections on port 5432?";
        }
        return try_login("postgresql", 5432, user, password, ctx);
    }

    if (prog == "hydra") {
        std::string user, pass, target, service;
        bool user_list = false, pass_list = false;
        for (std::size_t i = 0; i < args.size(); ++i) {
            const auto& a = args[i];
            if (a == "-l" && i + 1 < args.size()) user = args[++i];
            else if (a == "-L" && i + 1 < args.size()) { user_list = true; ++i; }
            else if (a == "-p" && i + 1 < args.size()) pass = args[++i];
            else if (a == "-P" && i + 1 < args.size()) { pass_list = true; ++i; }
            else if ((a == "-t" || a == "-s" || a == "-o" || a == "-w") && i + 1 < args.size()) ++i;
            else if (!a.empty() && a[0] != '-') {
                const auto scheme = a.find("://");
                if (scheme != std::string::npos) {
                    service = a.substr(0, scheme);
                    target = a.substr(scheme + 3);
                    target = target.substr(0, target.find_first_of(":/"));
                } else if (target.empty()) {
                    target = a;
                } else {
                    service = a;
                }
            }
        }
        if (service == "postgres") service = "postgresql";
        const std::map<std::string, int> ports{{"ssh", 22}, {"telnet", 23}, {"ftp", 21}, {"mysql", 3306}, {"postgresql", 5432}};
        if (!ports.count(service) || target.empty()) {
            ctx.exit_status = 255;
            return "[ERROR] unknown or missing service / target";
        }
        const int port = ports.at(service);
        if (!targets_host(target)) {
            ctx.exit_status = 255;
            return "[ERROR] could not connect to " + target + ":" + std::to_string(port);
        }
        std::vector<std::pair<std::string, std::string>> attempts;
        if (user_list || pass_list) {
            for (const auto& c : model_.credentials) {
                if ((user_list || c.first == user) && (pass_list || c.second == pass)) attempts.push_back(c);
            }
            if (service == "mysql" && (user_list || user == "root") && pass_list) attempts.emplace_back("root", "");
        } else {
            attempts.emplace_back(user, pass);
        }
        out << "Hydra v9.5 starting\n[DATA] attacking " << service << "://" << address_ << ":" << port << "/\n";
        int found = 0;
        for (const auto& [u, p] : attempts) {
            Ctx probe = ctx;
            if (fire("cred:" + service + ":" + u + "/" + p, probe)) {
                // hydra only validates; record the weakness but no shell stays open
                probe.state.shells_open = ctx.state.shells_open;
                ctx.state = probe.state;
                out << "[" << port << "][" << service << "] host: " << address_ << "   login: " << u
                    << "   password: " << p << "\n";
                ++found;
            }
        }
        out << "1 of 1 target " << (found ? "successfully completed" : "completed") << ", " << found
            << " valid password" << (found == 1 ? "" : "s") << " found";
        return out.str();
    }

    if (prog == "curl" || prog == "wget" || prog == "sqlmap" || prog == "nikto" || prog == "dirb" ||
        prog == "gobuster" || prog == "whatweb") {
        return run_http(prog, args, ctx);
    }

    if (prog == "showmount") {
        std::string host;
        for (const auto& a : args) {
            if (!a.empty() && a[0] != '-') host = a;
        }
        if (!targets_host(host)) {
            ctx.exit_status = 1;
            return "clnt_create: RPC: Port mapper failure - Unable to receive: errno 113 (No route to host)";
        }
        return "Export list for " + address_ + ":\n/ *";
    }

    if (prog == "mount") {
        for (const auto& a : args) {
            const auto colon = a.find(":/");
            if (colon == std::string::npos) continue;
            const std::string host = a.substr(0, colon);
            const std::string path = a.substr(colon + 1);
            if (!targets_host(host)) {
                ctx.exit_status = 32;
                return "mount.nfs: No route to host";
            }
            if (auto fired = fire("nfs:mount:" + path, ctx)) {
                return "[sim] mounted " + address_ + ":" + path + " (rw,no_root_squash)\n" + *fired;
            }
            ctx.exit_status = 32;
            return "mount.nfs: access denied by server while mounting " + address_ + ":" + path;
        }
        ctx.exit_status = 1;
        return "mount: bad usage";
    }

    if (prog == "dig" || prog == "dnsrecon" || prog == "dnsenum" || prog == "host") {
        std::string server;
        bool transfer = prog != "dig";
        for (std::size_t i = 0; i < args.size(); ++i) {
            const auto& a = args[i];
            if (!a.empty() && a[0] == '@') server = a.substr(1);
            else if (text::iequals(a, "axfr") || a == "-l" || a == "-a" || text::iequals(a, "-t")) transfer = true;
            else if ((a == "-n" || a == "--dnsserver") && i + 1 < args.size()) server = args[++i];
            else if (!a.empty() && a[0] != '-' && server.empty() && prog != "dig") server = a;
        }
        if (!targets_host(server)) {
            ctx.exit_status = 9;
            return ";; connection timed out; no servers could be reached";
        }
        if (transfer) {
            if (auto fired = fire("enum:dns", ctx)) return "; <<>> DiG 9.18 <<>> axfr @" + address_ + "\n" + *fired;
        }
        return ";; ANSWER SECTION:\nmetasploitable.localdomain. 604800 IN A " + address_;
    }

    if (prog == "smtp-user-enum") {
        std::string host;
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "-t") host = args[i + 1];
        }
        if (!targets_host(host)) {
            ctx.exit_status = 1;
            return "[-] could not connect to " + host + ":25";
        }
        auto fired = fire("enum:smtp", ctx);
        return "Starting smtp-user-enum v1.2\nMode ..................... VRFY\nTarget count ............. 1\n" +
               fired.value_or("0 results.");
    }

    if (prog == "enum4linux" || prog == "smbclient" || prog == "smbmap") {
        std::string host;
        for (const auto& a : args) {
            if (a.rfind("//", 0) == 0) host = a.substr(2, a.find('/', 2) - 2);
            else if (!a.empty() && a[0] != '-') host = a;
        }
        if (!targets_host(host)) {
            ctx.exit_status = 1;
            return "Connection to " + host + " failed (Error NT_STATUS_HOST_UNREACHABLE)";
        }
        return "\tSharename       Type      Comment\n\t---------       ----      -------\n"
               "\tprint$          Disk      Printer Drivers\n\ttmp             Disk      oh noes!\n"
               "\topt             Disk      \n\tIPC$            IPC       IPC Service (metasploitable server (Samba 3.0.20-Debian))\n"
               "\tADMIN$          IPC       IPC Service (metasploitable server (Samba 3.0.20-Debian))";
    }

    if (prog == "searchsploit") {
        const auto terms = text::split_ws(text::join(args, " "));
        out << "------------------------------------------------------------ ---------------------------------\n"
            << " Exploit Title                                              |  Path\n"
            << "------------------------------------------------------------ ---------------------------------\n";
        int n = 0;
        for (const auto& m : model_.msf_modules) {
            bool all = !terms.empty();
            for (const auto& t : terms) {
                all = all && (text::icontains(m.description, t) || text::icontains(m.name, t));
            }
            if (!all) continue;
            out << pad(" " + m.description + " (Metasploit)", 60) << "| " << m.name << ".rb\n";
            ++n;
        }
        if (!n) return "Exploits: No Results\nShellcodes: No Results";
        return out.str();
    }

    if (prog == "ping") {
        std::string host = args.empty() ? "" : args.back();
        if (!targets_host(host)) {
            ctx.exit_status = 1;
            return "From " + model_.attacker_address + " icmp_seq=1 Destination Host Unreachable";
        }
        return "PING " + address_ + " 56(84) bytes of data.\n64 bytes from " + address_ +
               ": icmp_seq=1 ttl=64 time=0.412 ms\n--- " + address_ + " ping statistics ---\n1 packets transmitted, 1 received, 0% packet loss";
    }

    if (prog == "whoami") return "root";
    if (prog == "id") return "uid=0(root) gid=0(root) groups=0(root)";
    if (prog == "hostname") return "kali";
    if (prog == "uname") return "Linux kali 6.6.9-amd64 #1 SMP PREEMPT_DYNAMIC Kali 6.6.9-1kali1 x86_64 GNU/Linux";
    if (prog == "pwd") return "/root";
    if (prog == "ifconfig" || prog == "ip") {
        return "eth0: flags=4163<UP,BROADCAST,RUNNING,MULTICAST>  mtu 1500\n        inet " + model_.attacker_address +
               "  netmask 255.255.255.0  broadcast 10.0.2.255";
    }
    if (prog == "echo") return text::join(args, " ");
    if (prog == "ls") return "Desktop  Documents  Downloads  wordlists";
    if (prog == "cat") {
        ctx.exit_status = 1;
        return "cat: " + (args.empty() ? std::string("-") : args[0]) + ": No such file or directory";
    }

    ctx.exit_status = 127;
    return "sh: 1: " + prog + ": not found";
}

// ---------------------------------------------------------------------------
// nmap
// ---------------------------------------------------------------------------

std::string Simulator::run_nmap(const std::vector<std::string>& args, Ctx& ctx) const {
    static const std::vector<std::string> kValueFlags = {"-p", "--script", "-oN", "-oX", "-oG", "-oA", "--top-ports",
                                                         "-e", "--script-args", "-iL", "--max-retries", "--min-rate"};
    std::string target, port_spec, scripts;
    bool version = false, os = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        if (std::find(kValueFlags.begin(), kValueFlags.end(), a) != kValueFlags.end()) {
            if (i + 1 < args.size()) {
                if (a == "-p") port_spec = args[i + 1];
                if (a == "--script") scripts = args[i + 1];
                ++i;
            }
        } else if (a.rfind("-p", 0) == 0 && a.size() > 2) {
            port_spec = a.substr(2);
        } else if (a.rfind("--script=", 0) == 0) {
            scripts = a.substr(9);
        } else if (a == "-sV") {
            version = true;
        } else if (a == "-sC") {
            scripts = scripts.empty() ? "default" : scripts;
        } else if (a == "-A") {
            version = os = true;
            scripts = scripts.empty() ? "default" : scripts;
        } else if (a == "-O") {
            os = true;
        } else if (!a.empty() && a[0] != '-') {
            target = a;
        }
    }
    std::ostringstream out;
    out << "Starting Nmap 7.94 ( https://nmap.org )\n";
    if (target.empty()) {
        out << "WARNING: No targets were specified, so 0 hosts scanned.\n"
            << "Nmap done: 0 IP addresses (0 hosts up) scanned in 0.04 seconds";
        return out.str();
    }
    if (!targets_host(target)) {
        out << "Note: Host seems down. If it is really up, but blocking our ping probes, try -Pn\n"
            << "Nmap done: 1 IP address (0 hosts up) scanned in 3.04 seconds";
        return out.str();
    }

    // Which ports to report.
    std::vector<int> requested;
    bool explicit_ports = !port_spec.empty() && port_spec != "-";
    if (explicit_ports) {
        for (const auto& part : text::split(port_spec, ',')) {
            std::string p = part;
            if (p.rfind("T:", 0) == 0) p = p.substr(2);
            const auto dash = p.find('-');
            if (dash != std::string::npos) {
                auto lo = to_port(p.substr(0, dash));
                auto hi = to_port(p.substr(dash + 1));
                if (!lo || !hi) continue;
                for (const auto& s : model_.services) {
                    if (s.port >= *lo && s.port <= *hi &&
                        std::find(requested.begin(), requested.end(), s.port) == requested.end()) {
                        requested.push_back(s.port);
                    }
                }
            } else if (auto v = to_port(p)) {
                if (std::find(requested.begin(), requested.end(), *v) == requested.end()) requested.push_back(*v);
            }
        }
        std::sort(requested.begin(), requested.end());
    }

    const bool vuln = scripts.find("vuln") != std::string::npos;
    out << "Nmap scan report for " << model_.hostname << "." << model_.domain << " (" << address_ << ")\n"
        << "Host is up (0.00031s latency).\n";
    std::vector<std::string> rows;
    int open = 0;
    auto row_for = [&](const SimService& s) {
        std::string row = pad(std::to_string(s.port) + "/tcp", 9) + pad("open", 6) + pad(s.name, 11) + " ";
        if (version) row += s.product;
        while (!row.empty() && row.back() == ' ') row.pop_back();
        if (vuln && !s.vuln_script.empty()) row += "\n" + expand(s.vuln_script);
        return row;
    };
    if (explicit_ports) {
        for (int p : requested) {
            if (const auto* s = model_.service_on(p)) {
                rows.push_back(row_for(*s));
                ++open;
            } else {
                rows.push_back(pad(std::to_string(p) + "/tcp", 9) + pad("closed", 7) + "unknown");
            }
        }
    } else {
        std::vector<const SimService*> listed;
        for (const auto& s : model_.services) {
            if (s.in_full_scan) listed.push_back(&s);
        }
        std::sort(listed.begin(), listed.end(), [](auto* a, auto* b) { return a->port < b->port; });
        for (const auto* s : listed) {
            rows.push_back(row_for(*s));
            ++open;
        }
        const int universe = port_spec == "-" ? 65535 : 1000;
        out << "Not shown: " << (universe - open) << " closed tcp ports (reset)\n";
    }
    out << (version ? "PORT     STATE SERVICE     VERSION\n" : "PORT     STATE SERVICE\n");
    for (const auto& r : rows) out << r << "\n";
    out << "MAC Address: " << model_.mac << " (Oracle VirtualBox virtual NIC)\n";
    if (os) out << "Running: Linux 2.6.X\nOS details: " << model_.os << "\n";
    if (version) out << "Service Info: Host:  metasploitable.localdomain; OSs: Unix, Linux; CPE: cpe:/o:linux:linux_kernel\n";
    out << "Nmap done: 1 IP address (1 host up) scanned in 12.31 seconds";
    (void)ctx;
    return out.str();
}

// ---------------------------------------------------------------------------
// HTTP tools
// ---------------------------------------------------------------------------

std::string Simulator::run_http(const std::string& tool, const std::vector<std::string>& args, Ctx& ctx) const {
    static const std::vector<std::string> kCurlValueFlags = {"-d", "--data", "-H", "-X", "-o", "-A", "-b", "-e",
                                                             "--data-urlencode", "-O", "--output", "-u"};
    std::string raw_url;
    if (tool == "sqlmap") {
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "-u" || args[i] == "--url") raw_url = args[i + 1];
        }
        for (const auto& a : args) {
            if (a.rfind("--url=", 0) == 0) raw_url = a.substr(6);
        }
    } else if (tool == "nikto") {
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "-h" || args[i] == "-host") raw_url = args[i + 1];
        }
    } else if (tool == "gobuster") {
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "-u") raw_url = args[i + 1];
        }
    } else {
        for (std::size_t i = 0; i < args.size(); ++i) {
            const auto& a = args[i];
            if (std::find(kCurlValueFlags.begin(), kCurlValueFlags.end(), a) != kCurlValueFlags.end()) {
                ++i;
            } else if (!a.empty() && a[0] != '-' && raw_url.empty()) {
                raw_url = a;
            }
        }
    }
    auto url = parse_url(raw_url);
    if (!url) {
        ctx.exit_status = tool == "curl" ? 3 : 1;
        return tool + ": no URL specified";
    }
    if (!targets_host(url->host)) {
        ctx.exit_status = tool == "curl" ? 7 : 1;
        return tool + ": (7) Failed to connect to " + url->host + " port " + std::to_string(url->port) +
               ": No route to host";
    }
    if (!model_.service_on(url->port)) {
        ctx.exit_status = tool == "curl" ? 7 : 1;
        return tool + ": (7) Failed to connect to " + url->host + " port " + std::to_string(url->port) +
               ": Connection refused";
    }
    const std::string query = url_decode(url->query);
    std::ostringstream out;

    if (tool == "nikto") {
        out << "- Nikto v2.5.0\n+ Target IP:          " << address_ << "\n+ Target Port:        " << url->port
            << "\n+ Server: Apache/2.2.8 (Ubuntu) DAV/2\n"
            << "+ /: Retrieved x-powered-by header: PHP/5.2.4-2ubuntu5.10.\n"
            << "+ /phpinfo.php: Output from the phpinfo() function was found.\n"
            << "+ /phpMyAdmin/: phpMyAdmin directory found.\n"
            << "+ /mutillidae/: Deliberately vulnerable web application found.\n"
            << "+ /dvwa/: Deliberately vulnerable web application found.\n"
            << "+ /cgi-bin/php: PHP-CGI binary is directly reachable; query strings may be parsed as arguments.";
        return out.str();
    }
    if (tool == "dirb" || tool == "gobuster") {
        out << "---- Scanning URL: http://" << address_ << "/ ----\n";
        for (const char* d : {"cgi-bin/", "dav/", "dvwa/", "index.php", "mutillidae/", "phpMyAdmin/", "phpinfo.php",
                              "test/", "twiki/"}) {
            out << "+ http://" << address_ << "/" << d << " (CODE:200)\n";
        }
        return out.str();
    }

    const bool argi = !query.empty() && query[0] == '-';
    if (tool == "sqlmap") {
        if (url->query.empty()) {
            ctx.exit_status = 1;
            return "[CRITICAL] no parameter(s) found for testing in the provided data";
        }
        if (auto fired = fire("http:sqli:" + url->path, ctx)) {
            out << "[INFO] testing connection to the target URL\n"
                << "[INFO] GET parameter is vulnerable. Do you want to keep testing the others? [y/N] N\n"
                << "sqlmap identified the following injection point(s):\n"
                << "Parameter: (GET)\n    Type: boolean-based blind\n    Title: OR boolean-based blind - WHERE or HAVING clause\n"
                << "back-end DBMS: MySQL >= 5.0\n" << *fired;
            return out.str();
        }
        ctx.exit_status = 1;
        return "[WARNING] GET parameter does not seem to be injectable\n"
               "[CRITICAL] all tested parameters do not appear to be injectable";
    }

    if (argi) {
        if (auto fired = fire("http:argi:" + url->path, ctx)) {
            out << "HTTP/1.1 200 OK\nX-Powered-By: PHP/5.2.4-2ubuntu5.10\n\n" << *fired;
            return out.str();
        }
    }
    if (!query.empty() && looks_like_sqli(query)) {
        if (auto fired = fire("http:sqli:" + url->path, ctx)) {
            out << "HTTP/1.1 200 OK\n\n" << *fired;
            return out.str();
        }
        return "HTTP/1.1 200 OK\n\nYou have an error in your SQL syntax; check the manual that corresponds to your MySQL server version";
    }

    const std::string& p = url->path;
    if (p == "/" || p == "/index.php") {
        return "HTTP/1.1 200 OK\n\n<html><head><title>Metasploitable2 - Linux</title></head><body>\n"
               "<a href=\"/twiki/\">TWiki</a> <a href=\"/phpMyAdmin/\">phpMyAdmin</a> "
               "<a href=\"/mutillidae/\">Mutillidae</a> <a href=\"/dvwa/\">DVWA</a> <a href=\"/dav/\">WebDAV</a>\n</body></html>";
    }
    if (p.rfind("/mutillidae", 0) == 0) {
        return "HTTP/1.1 200 OK\n\n<title>OWASP Mutillidae II</title>\n"
               "<form action=\"index.php?page=user-info.php\" method=\"GET\">Name <input name=\"username\"> "
               "Password <input name=\"password\"></form>";
    }
    if (p.rfind("/dvwa", 0) == 0) {
        return "HTTP/1.1 200 OK\n\n<title>Damn Vulnerable Web App (DVWA) - Login</title>\n"
               "<form action=\"login.php\" method=\"post\">Username <input name=\"username\"></form>";
    }
    if (p == "/phpinfo.php") {
        return "HTTP/1.1 200 OK\n\nPHP Version 5.2.4-2ubuntu5.10\nServer API CGI/FastCGI\nSystem Linux metasploitable 2.6.24-16-server";
    }
    if (p.rfind("/cgi-bin/php", 0) == 0) {
        return "HTTP/1.1 500 Internal Server Error\n\nNo input file specified.";
    }
    ctx.exit_status = tool == "curl" ? 22 : 8;
    return "HTTP/1.1 404 Not Found\n\n<h1>Not Found</h1>The requested URL " + p + " was not found on this server.";
}

// ---------------------------------------------------------------------------
// Metasploit console
// ---------------------------------------------------------------------------

std::string Simulator::run_msf(std::string_view script, Ctx& ctx) const {
    std::vector<std::string> statements;
    std::string cur;
    for (char c : script) {
        if (c == ';' || c == '\n') {
            statements.emplace_back(text::trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    statements.emplace_back(text::trim(cur));

    std::ostringstream out;
    const MsfModule* current = nullptr;
    std::string current_name;
    std::map<std::string, std::string> options;
    std::vector<const MsfModule*> last_search;

    for (const auto& stmt : statements) {
        if (stmt.empty()) continue;
        auto words = text::split_ws(stmt);
        const auto verb = text::to_lower(words[0]);

        if (verb == "search") {
            std::vector<std::string> terms;
            for (std::size_t i = 1; i < words.size(); ++i) {
                auto t = words[i];
                const auto colon = t.find(':');
                if (colon != std::string::npos) t = t.substr(colon + 1);
                if (!t.empty()) terms.push_back(t);
            }
            last_search.clear();
            for (const auto& m : model_.msf_modules) {
                bool all = !terms.empty();
                for (const auto& t : terms) {
                    all = all && (text::icontains(m.name, t) || text::icontains(m.description, t));
                }
                if (all) last_search.push_back(&m);
            }
            if (last_search.empty()) {
                out << "[-] No results from search\n";
                continue;
            }
            out << "\nMatching Modules\n================\n\n"
                << "   #  Name                                          Disclosure Date  Rank       Check  Description\n"
                << "   -  ----                                          ---------------  ----       -----  -----------\n";
            for (std::size_t i = 0; i < last_search.size(); ++i) {
                const auto* m = last_search[i];
                out << "   " << pad(std::to_string(i), 3) << pad(m->name, 46) << pad(m->date, 17) << pad(m->rank, 11)
                    << pad("No", 7) << m->description << "\n";
            }
            out << "\n";
        } else if (verb == "use") {
            if (words.size() < 2) {
                out << "[-] Usage: use <name|index>\n";
                continue;
            }
            std::string name = words[1];
            if (auto idx = to_port(name); idx && *idx < static_cast<int>(last_search.size())) {
                name = last_search[static_cast<std::size_t>(*idx)]->name;
            }
            if (name.rfind("exploits/", 0) == 0) name = "exploit/" + name.substr(9);
            const auto* m = model_.module(name);
            if (!m) {
                out << "[-] No results from search\n[-] Failed to load module: " << name << "\n";
                current = nullptr;
                continue;
            }
            current = m;
            current_name = name;
            options.clear();
            if (name.rfind("exploit/", 0) == 0) out << "[*] No payload configured, defaulting to cmd/unix/interact\n";
        } else if (verb == "set" || verb == "setg") {
            if (words.size() < 2) continue;
            const auto key = text::to_upper(words[1]);
            std::string value;
            for (std::size_t i = 2; i < words.size(); ++i) value += (i > 2 ? " " : "") + words[i];
            options[key == "RHOST" ? "RHOSTS" : key] = value;
            out << key << " => " << value << "\n";
        } else if (verb == "show" || verb == "options" || verb == "info") {
            if (!current) {
                out << "[-] No module selected.\n";
                continue;
            }
            out << "Module: " << current->name << "\n    " << current->description << "\n\n"
                << "   Name    Current Setting  Required\n   ----    ---------------  --------\n"
                << "   RHOSTS  " << pad(options.count("RHOSTS") ? options["RHOSTS"] : "", 17) << "yes\n"
                << "   RPORT   " << pad(options.count("RPORT") ? options["RPORT"] : std::to_string(current->port), 17)
                << "yes\n";
        } else if (verb == "exploit" || verb == "run") {
            if (!current) {
                out << "[-] No module selected.\n";
                ctx.exit_status = 1;
                continue;
            }
            const std::string rhost = options.count("RHOSTS") ? options["RHOSTS"] : "";
            int port = current->port;
            if (options.count("RPORT")) {
                if (auto p = to_port(options["RPORT"])) port = *p;
            }
            if (rhost.empty()) {
                out << "[-] Msf::OptionValidateError One or more options failed to validate: RHOSTS.\n";
                ctx.exit_status = 1;
                continue;
            }
            const std::string where = rhost + ":" + std::to_string(port);
            if (!targets_host(rhost)) {
                out << "[-] " << where << " - Exploit failed [unreachable]: Rex::HostUnreachable The host (" << where
                    << ") was unreachable.\n";
                ctx.exit_status = 1;
                continue;
            }
            if (!model_.service_on(port)) {
                out << "[-] " << where << " - Exploit failed [unreachable]: Rex::ConnectionRefused The connection was refused by the remote host (" << where << ").\n";
                ctx.exit_status = 1;
                continue;
            }
            const bool is_login = current_name.size() > 6 && current_name.substr(current_name.size() - 6) == "_login";
            if (is_login) {
                const std::string service = service_of_login_module(current_name);
                std::vector<std::pair<std::string, std::string>> attempts;
                const bool lists = options.count("USER_FILE") || options.count("PASS_FILE") || options.count("USERPASS_FILE");
                if (lists) {
                    attempts = model_.credentials;
                    if (service == "mysql") attempts.emplace_back("root", "");
                } else {
                    attempts.emplace_back(options.count("USERNAME") ? options["USERNAME"] : "",
                                          options.count("PASSWORD") ? options["PASSWORD"] : "");
                }
                bool any = false;
                for (const auto& [u, p] : attempts) {
                    if (auto fired = fire("cred:" + service + ":" + u + "/" + p, ctx)) {
                        out << "[+] " << where << " - Success: '" << u << ":" << p << "'\n" << *fired << "\n";
                        any = true;
                    } else if (!lists) {
                        out << "[-] " << where << " - Failed: '" << u << ":" << p << "'\n";
                    }
                }
                if (!any) ctx.exit_status = 1;
                out << "[*] Scanned 1 of 1 hosts (100% complete)\n[*] Auxiliary module execution completed\n";
                continue;
            }
            const bool aux = current_name.rfind("auxiliary/", 0) == 0;
            if (!aux) out << "[*] Started reverse TCP handler on " << model_.attacker_address << ":" << kHandlerPort << "\n";
            out << "[*] " << where << " - Running " << current->description << "\n";
            const int session = ctx.state.shells_open + 1;
            if (auto fired = fire("msf:" + current_name, ctx)) {
                if (aux) {
                    out << *fired << "\n[*] Auxiliary module execution completed\n";
                } else {
                    out << "[*] Command shell session " << session << " opened (" << model_.attacker_address << ":"
                        << kHandlerPort << " -> " << address_ << ":" << (kFirstEphemeralPort + session) << ")\n"
                        << *fired << "\n";
                }
            } else {
                ctx.exit_status = 1;
                out << (aux ? "[*] Auxiliary module execution completed\n"
                            : "[*] Exploit completed, but no session was created.\n");
            }
        } else if (verb == "back") {
            current = nullptr;
        } else if (verb == "exit" || verb == "quit" || verb == "sessions" || verb == "jobs") {
            continue;
        } else if (ctx.msf_session_open) {
            // input to the shell session opened earlier in this batch
            if (verb == "id") {
                out << (ctx.msf_session_root ? "uid=0(root) gid=0(root)" : "uid=1(daemon) gid=1(daemon)") << "\n";
            } else if (verb == "whoami") {
                out << (ctx.msf_session_root ? "root" : "daemon") << "\n";
            } else if (verb == "hostname") {
                out << model_.hostname << "\n";
            } else if (verb == "uname") {
                out << "Linux metasploitable 2.6.24-16-server #1 SMP Thu Apr 10 13:58:00 UTC 2008 i686 GNU/Linux\n";
            } else {
                out << "sh: " << words[0] << ": not found\n";
            }
        } else {
            out << "[-] Unknown command: " << words[0] << ".\n";
        }
    }
    return out.str();
}

}  // namespace penheal::sim
