#pragma once

#include <string>
#include <string_view>

#include "penheal/core/json.hpp"
#include "penheal/core/model.hpp"

namespace penheal::app {

enum class Mode { Live, Hermetic };
enum class ExecutorKind { Simulator, Shell };

struct LlmSettings {
    std::string endpoint = "https://api.openai.com/v1";
    std::string api_key;  // falls back to $PENHEAL_LLM_API_KEY
    int timeout_seconds = 120;
    int max_attempts = 3;
};

struct NvdSettings {
    std::string fixtures;  // bundled responses; used in hermetic mode and as a live fallback
    std::string base_url = "https://services.nvd.nist.gov/rest/json/cves/2.0";
    std::string api_key;  // falls back to $PENHEAL_NVD_API_KEY
    std::string cache_dir;
};

/// Everything the CLI needs for one invocation. Paths are absolute once
/// loaded (relative ones resolve against the config file's directory).
struct AppConfig {
    RunConfig run;
    Mode mode = Mode::Hermetic;
    ExecutorKind executor = ExecutorKind::Simulator;
    std::string host_model;  // simulator host file; empty = built-in Metasploitable2 model
    std::string fixtures;    // directory holding transcript.jsonl for replay
    std::string kb;          // saved index directory
    std::string kb_corpus;   // documents ingested in memory when `kb` is empty
    std::string truth;
    std::string out = "out";
    std::string msfconsole = "msfconsole";
    LlmSettings llm;
    NvdSettings nvd;
};

std::string_view to_string(Mode m);

/// Replaces every ${NAME} with the environment variable's value (empty when
/// unset). Used for secrets such as API keys.
std::string interpolate_env(std::string_view text);

/// Throws ConfigError naming the offending key for unknown keys, wrong
/// types and out-of-range values.
AppConfig config_from_json(const json& doc, const std::string& base_dir);
AppConfig load_config(const std::string& path);

/// Cross-field checks run after CLI overrides; throws ConfigError.
void check_config(const AppConfig& cfg);

}  // namespace penheal::app
