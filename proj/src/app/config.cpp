#include "penheal/app/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "penheal/core/errors.hpp"
#include "penheal/core/text.hpp"

namespace fs = std::filesystem;

namespace penheal::app {

std::string_view to_string(Mode m) { return m == Mode::Live ? "live" : "hermetic"; }

std::string interpolate_env(std::string_view text) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text.compare(i, 2, "${") == 0) {
            const auto close = text.find('}', i + 2);
            if (close != std::string_view::npos) {
                const std::string name(text.substr(i + 2, close - i - 2));
                if (const char* v = std::getenv(name.c_str())) out += v;
                i = close + 1;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

namespace {

class Reader {
public:
    Reader(const json& obj, std::string prefix, std::string base_dir)
        : obj_(obj), prefix_(std::move(prefix)), base_(std::move(base_dir)) {
        if (!obj_.is_object()) throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "expected an object");
    }

    std::string key(std::string_view k) const { return prefix_.empty() ? std::string(k) : prefix_ + "." + std::string(k); }

    void allow(std::initializer_list<std::string_view> keys) const {
        std::set<std::string_view> ok(keys);
        for (const auto& [k, _] : obj_.items()) {
            if (!ok.count(k)) throw ConfigError(key(k), "unknown key");
        }
    }

    const json* get(std::string_view k) const {
        auto it = obj_.find(std::string(k));
        return it == obj_.end() || it->is_null() ? nullptr : &*it;
    }

    void str(std::string_view k, std::string& out) const {
        if (const json* v = get(k)) {
            if (!v->is_string()) throw ConfigError(key(k), "expected a string");
            out = interpolate_env(v->get<std::string>());
        }
    }

    void path(std::string_view k, std::string& out) const {
        std::string raw;
        str(k, raw);
        if (raw.empty()) return;
        fs::path p(raw);
        out = (p.is_absolute() ? p : fs::path(base_) / p).lexically_normal().string();
    }

    void number(std::string_view k, double& out, double lo, double hi) const {
        if (const json* v = get(k)) {
            if (!v->is_number()) throw ConfigError(key(k), "expected a number");
            const double d = v->get<double>();
            if (d < lo || d > hi) {
                throw ConfigError(key(k), "must be between " + text::format_fixed(lo, 1) + " and " + text::format_fixed(hi, 1));
            }
            out = d;
        }
    }

    void integer(std::string_view k, int& out, int lo, int hi) const {
        if (const json* v = get(k)) {
            if (!v->is_number_integer()) throw ConfigError(key(k), "expected an integer");
            const auto n = v->get<long long>();
            if (n < lo || n > hi) {
                throw ConfigError(key(k), "must be between " + std::to_string(lo) + " and " + std::to_string(hi));
            }
            out = static_cast<int>(n);
        }
    }

    void boolean(std::string_view k, bool& out) const {
        if (const json* v = get(k)) {
            if (!v->is_boolean()) throw ConfigError(key(k), "expected true or false");
            out = v->get<bool>();
        }
    }

    template <typename E, typename F>
    void enumeration(std::string_view k, E& out, F parse, std::string_view choices) const {
        std::string s;
        str(k, s);
        if (s.empty()) return;
        auto e = parse(s);
        if (!e) throw ConfigError(key(k), "expected one of " + std::string(choices) + ", got \"" + s + "\"");
        out = *e;
    }

private:
    const json& obj_;
    std::string prefix_;
    std::string base_;
};

std::optional<Mode> mode_from(std::string_view s) {
    if (text::iequals(s, "live")) return Mode::Live;
    if (text::iequals(s, "hermetic")) return Mode::Hermetic;
    return std::nullopt;
}

std::optional<ExecutorKind> executor_from(std::string_view s) {
    if (text::iequals(s, "sim") || text::iequals(s, "simulator")) return ExecutorKind::Simulator;
    if (text::iequals(s, "shell")) return ExecutorKind::Shell;
    return std::nullopt;
}

}  // namespace

AppConfig config_from_json(const json& doc, const std::string& base_dir) {
    AppConfig cfg;
    Reader r(doc, "", base_dir);
    r.allow({"target_address", "mode", "executor", "host_model", "fixtures", "kb", "kb_corpus", "truth", "out",
             "msfconsole", "budget_per_vuln", "budget_mode", "retrieval_k", "max_iterations", "no_new_finding_window",
             "aggregation", "counterfactual", "instructor", "evaluator", "cost_policy", "llm", "nvd"});
    r.str("target_address", cfg.run.target_address);
    r.enumeration("mode", cfg.mode, mode_from, "live, hermetic");
    r.enumeration("executor", cfg.executor, executor_from, "sim, shell");
    r.path("host_model", cfg.host_model);
    r.path("fixtures", cfg.fixtures);
    r.path("kb", cfg.kb);
    r.path("kb_corpus", cfg.kb_corpus);
    r.path("truth", cfg.truth);
    r.path("out", cfg.out);
    r.str("msfconsole", cfg.msfconsole);
    r.number("budget_per_vuln", cfg.run.budget_per_vuln, 0.0, 1000.0);
    r.enumeration("budget_mode", cfg.run.budget_mode, budget_mode_from, "total, per_group");
    r.integer("retrieval_k", cfg.run.retrieval_k, 0, 50);
    r.integer("max_iterations", cfg.run.max_iterations, 1, 10000);
    r.integer("no_new_finding_window", cfg.run.no_new_finding_window, 1, 10000);
    r.enumeration("aggregation", cfg.run.aggregation_mode, aggregation_mode_from, "div3, sum");
    r.boolean("counterfactual", cfg.run.counterfactual_enabled);
    r.boolean("instructor", cfg.run.instructor_enabled);
    r.boolean("evaluator", cfg.run.evaluator_enabled);

    if (const json* cp = r.get("cost_policy")) {
        Reader c(*cp, "cost_policy", base_dir);
        c.allow({"low", "moderate", "high", "preference"});
        c.number("low", cfg.run.cost_policy.tier_scores[CostTier::Low], 0.0, 10.0);
        c.number("moderate", cfg.run.cost_policy.tier_scores[CostTier::Moderate], 0.0, 10.0);
        c.number("high", cfg.run.cost_policy.tier_scores[CostTier::High], 0.0, 10.0);
        c.str("preference", cfg.run.cost_policy.user_preference_text);
    }
    if (const json* l = r.get("llm")) {
        Reader c(*l, "llm", base_dir);
        c.allow({"endpoint", "api_key", "timeout_seconds", "max_attempts", "models", "role_tiers"});
        c.str("endpoint", cfg.llm.endpoint);
        c.str("api_key", cfg.llm.api_key);
        c.integer("timeout_seconds", cfg.llm.timeout_seconds, 1, 3600);
        c.integer("max_attempts", cfg.llm.max_attempts, 1, 20);
        if (const json* m = c.get("models")) {
            Reader mr(*m, "llm.models", base_dir);
            mr.allow({"strong", "light"});
            std::string s;
            mr.str("strong", s);
            if (!s.empty()) cfg.run.tier_models[ModelTier::Strong] = s;
            s.clear();
            mr.str("light", s);
            if (!s.empty()) cfg.run.tier_models[ModelTier::Light] = s;
        }
        if (const json* t = c.get("role_tiers")) {
            Reader tr(*t, "llm.role_tiers", base_dir);
            for (const auto& [k, v] : t->items()) {
                auto role = agent_role_from(k);
                if (!role) throw ConfigError(tr.key(k), "unknown agent role");
                tr.enumeration(k, cfg.run.role_tiers[*role], model_tier_from, "strong, light");
            }
        }
    }
    if (const json* n = r.get("nvd")) {
        Reader c(*n, "nvd", base_dir);
        c.allow({"fixtures", "base_url", "api_key", "cache_dir"});
        c.path("fixtures", cfg.nvd.fixtures);
        c.str("base_url", cfg.nvd.base_url);
        c.str("api_key", cfg.nvd.api_key);
        c.path("cache_dir", cfg.nvd.cache_dir);
    }

    if (cfg.llm.api_key.empty()) {
        if (const char* k = std::getenv("PENHEAL_LLM_API_KEY")) cfg.llm.api_key = k;
    }
    if (cfg.nvd.api_key.empty()) {
        if (const char* k = std::getenv("PENHEAL_NVD_API_KEY")) cfg.nvd.api_key = k;
    }
    return cfg;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(path, std::string("malformed JSON at byte ") + std::to_string(e.byte));
    }
    return config_from_json(doc, fs::absolute(path).parent_path().string());
}

void check_config(const AppConfig& cfg) {
    if (text::trim(cfg.run.target_address).empty()) throw ConfigError("target_address", "is required");
    if (cfg.mode == Mode::Hermetic) {
        if (cfg.fixtures.empty()) throw ConfigError("fixtures", "hermetic mode needs a fixture directory");
        if (cfg.executor != ExecutorKind::Simulator) throw ConfigError("executor", "hermetic mode runs against the simulator only");
    } else if (cfg.llm.api_key.empty()) {
        throw ConfigError("llm.api_key", "live mode needs an API key (set PENHEAL_LLM_API_KEY)");
    }
    for (const auto& problem : validate(cfg.run)) throw ConfigError("run", problem);
}

}  // namespace penheal::app
