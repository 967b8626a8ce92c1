#include <algorithm>
#include <fstream>
#include <sstream>

#include "penheal/core/errors.hpp"
#include "penheal/core/json.hpp"
#include "penheal/sim/sim.hpp"

namespace penheal::sim {

namespace {

constexpr std::string_view kBuiltinHost =
#include "default_host.inc"
    ;

constexpr std::pair<Effect, std::string_view> kEffects[] = {
    {Effect::Shell, "shell"}, {Effect::RootShell, "root_shell"}, {Effect::InfoLeak, "info_leak"}};

}  // namespace

std::string_view to_string(Effect e) {
    for (const auto& [effect, name] : kEffects) {
        if (effect == e) return name;
    }
    return "?";
}

std::optional<Effect> effect_from(std::string_view text) {
    for (const auto& [effect, name] : kEffects) {
        if (name == text) return effect;
    }
    return std::nullopt;
}

const SimService* HostModel::service_on(int port) const {
    for (const auto& s : services) {
        if (s.port == port) return &s;
    }
    return nullptr;
}

const MsfModule* HostModel::module(std::string_view name) const {
    for (const auto& m : msf_modules) {
        if (m.name == name) return &m;
    }
    return nullptr;
}

HostModel HostModel::from_json_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("host model: ") + e.what(), e.byte);
    }

    HostModel m;
    try {
        m.name = j.at("name").get<std::string>();
        m.hostname = j.value("hostname", std::string{});
        m.domain = j.value("domain", std::string{});
        m.default_address = j.value("default_address", std::string{});
        m.attacker_address = j.value("attacker_address", std::string("10.0.2.15"));
        m.os = j.value("os", std::string{});
        m.mac = j.value("mac", std::string{});
        for (const auto& c : j.value("credentials", json::array())) {
            m.credentials.emplace_back(c.at(0).get<std::string>(), c.at(1).get<std::string>());
        }
        for (const auto& v : j.at("ground_truth")) m.ground_truth.push_back(v.get<Vulnerability>());
        for (const auto& s : j.at("services")) {
            SimService svc;
            svc.name = s.at("name").get<std::string>();
            svc.port = s.at("port").get<int>();
            svc.product = s.value("product", std::string{});
            svc.banner = s.value("banner", std::string{});
            svc.vuln_script = s.value("vuln_script", std::string{});
            svc.in_full_scan = s.value("in_full_scan", true);
            for (const auto& w : s.value("weaknesses", json::array())) {
                SimWeakness weak;
                weak.trigger = w.at("trigger").get<std::string>();
                const auto effect = effect_from(w.at("effect").get<std::string>());
                if (!effect) throw ConfigError("services." + svc.name + ".effect", "unknown effect");
                weak.effect = *effect;
                weak.truth = w.at("truth").get<int>();
                weak.artifact = w.value("artifact", std::string{});
                svc.weaknesses.push_back(std::move(weak));
            }
            m.services.push_back(std::move(svc));
        }
        for (const auto& mod : j.value("msf_modules", json::array())) {
            m.msf_modules.push_back({mod.at("name").get<std::string>(), mod.value("date", std::string{}),
                                     mod.value("rank", std::string("normal")), mod.value("port", 0),
                                     mod.value("description", std::string{})});
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("host model: ") + e.what(), std::string::npos);
    }

    // Structural checks: unique ports, single-wildcard triggers, truth links.
    for (std::size_t a = 0; a < m.services.size(); ++a) {
        for (std::size_t b = a + 1; b < m.services.size(); ++b) {
            if (m.services[a].port == m.services[b].port) {
                throw ConfigError("services", "duplicate port " + std::to_string(m.services[a].port));
            }
        }
        for (const auto& w : m.services[a].weaknesses) {
            if (std::count(w.trigger.begin(), w.trigger.end(), '*') > 1) {
                throw ConfigError("services." + m.services[a].name, "trigger '" + w.trigger + "' has more than one wildcard");
            }
            if (w.truth < 0 || w.truth >= static_cast<int>(m.ground_truth.size())) {
                throw ConfigError("services." + m.services[a].name, "weakness points outside ground_truth");
            }
        }
    }
    return m;
}

HostModel HostModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read host model " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

const HostModel& HostModel::builtin() {
    static const HostModel model = from_json_text(kBuiltinHost);
    return model;
}

std::vector<Vulnerability> ground_truth() { return HostModel::builtin().ground_truth; }

}  // namespace penheal::sim
