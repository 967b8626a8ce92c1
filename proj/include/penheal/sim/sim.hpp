#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "penheal/core/model.hpp"

namespace penheal::sim {

enum class Effect { Shell, RootShell, InfoLeak };

std::string_view to_string(Effect e);
std::optional<Effect> effect_from(std::string_view text);

struct SimWeakness {
    std::string trigger;  // action key pattern, at most one '*'
    Effect effect = Effect::Shell;
    int truth = 0;         // index into HostModel::ground_truth
    std::string artifact;  // success text; may contain {address}
};

struct SimService {
    std::string name;
    int port = 0;
    std::string product;
    std::string banner;
    std::string vuln_script;  // nmap --script vuln block
    bool in_full_scan = true;  // listed by untargeted scans
    std::vector<SimWeakness> weaknesses;
};

struct MsfModule {
    std::string name;
    std::string date;
    std::string rank;
    int port = 0;
    std::string description;
};

struct HostModel {
    std::string name;
    std::string hostname;
    std::string domain;
    std::string default_address;
    std::string attacker_address;
    std::string os;
    std::string mac;
    std::vector<std::pair<std::string, std::string>> credentials;
    std::vector<SimService> services;
    std::vector<Vulnerability> ground_truth;
    std::vector<MsfModule> msf_modules;

    const SimService* service_on(int port) const;
    const MsfModule* module(std::string_view name) const;

    /// Declarative JSON host file. Throws ParseError / ConfigError.
    static HostModel from_json_text(std::string_view text);
    static HostModel load(const std::string& path);
    /// The bundled Metasploitable2 model.
    static const HostModel& builtin();
};

/// Interactive login prompt left open by telnet/ssh/ftp.
struct PendingLogin {
    std::string service;
    int port = 0;
    std::string user;  // empty until the username line arrives
    bool awaiting_password = false;

    bool operator==(const PendingLogin&) const = default;
    auto operator<=>(const PendingLogin&) const = default;
};

struct SimState {
    std::set<std::pair<int, std::string>> exploited;  // (truth port, truth id)
    int shells_open = 0;
    std::optional<PendingLogin> pending;
    std::set<int> triggered_truth;  // ground-truth rows reached

    bool operator==(const SimState&) const = default;
};

struct SimResult {
    std::string output;
    int exit_status = 0;
    SimState state;
};

/// In-process victim. `simulate` is a pure function of (command, state).
class Simulator {
public:
    explicit Simulator(HostModel model, std::string address = {});

    /// `msf` selects the Metasploit console grammar; several statements may
    /// be separated by ';' or newlines.
    SimResult simulate(std::string_view command, bool msf, const SimState& state) const;

    std::vector<Vulnerability> ground_truth() const { return model_.ground_truth; }
    const HostModel& model() const { return model_; }
    const std::string& address() const { return address_; }

    /// Exact or single-'*' pattern match.
    static bool matches(std::string_view pattern, std::string_view key);

private:
    struct Ctx;
    std::string run_shell(std::string_view command, Ctx& ctx) const;
    std::string run_msf(std::string_view script, Ctx& ctx) const;
    std::string run_nmap(const std::vector<std::string>& args, Ctx& ctx) const;
    std::string run_http(const std::string& tool, const std::vector<std::string>& args, Ctx& ctx) const;
    std::string continue_login(std::string_view line, Ctx& ctx) const;
    std::string try_login(const std::string& service, int port, const std::string& user,
                          const std::string& pass, Ctx& ctx) const;
    /// Applies the first weakness whose trigger matches `key`; returns the
    /// success text or nullopt.
    std::optional<std::string> fire(const std::string& key, Ctx& ctx) const;
    bool targets_host(std::string_view host) const;
    std::string expand(std::string_view text) const;

    HostModel model_;
    std::string address_;
};

/// Ground truth of the bundled model (10 rows).
std::vector<Vulnerability> ground_truth();

}  // namespace penheal::sim
