#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "penheal/core/errors.hpp"
#include "penheal/core/model.hpp"

namespace penheal::llm {

enum class TurnRole { System, User, Assistant };

struct ChatTurn {
    TurnRole role_tag = TurnRole::User;
    std::string content;

    bool operator==(const ChatTurn&) const = default;
};

inline ChatTurn system_turn(std::string content) { return {TurnRole::System, std::move(content)}; }
inline ChatTurn user_turn(std::string content) { return {TurnRole::User, std::move(content)}; }
inline ChatTurn assistant_turn(std::string content) { return {TurnRole::Assistant, std::move(content)}; }

std::string_view to_string(TurnRole r);
std::optional<TurnRole> turn_role_from(std::string_view text);

/// One request as it reaches a backend. `request_hash` is the replay key.
struct ChatRequest {
    AgentRole role = AgentRole::Planner;
    ModelTier tier = ModelTier::Strong;
    std::string model;
    std::vector<ChatTurn> messages;
    std::string request_hash;
};

/// SHA-256 over the role and the full message history.
std::string request_hash(AgentRole role, const std::vector<ChatTurn>& messages);

struct Exchange {
    std::size_t seq = 0;
    AgentRole role = AgentRole::Planner;
    ModelTier tier = ModelTier::Strong;
    std::string model;
    std::string request_hash;
    std::vector<ChatTurn> messages;
    std::string response;
    std::string timestamp;  // ISO-8601 UTC
    std::string tag;        // caller context, e.g. "iteration=3"
};

/// Append-only log of exchanges; one JSON object per line on disk.
class Transcript {
public:
    void append(Exchange e);
    const std::vector<Exchange>& exchanges() const { return exchanges_; }
    std::size_t size() const { return exchanges_.size(); }

    static std::string to_line(const Exchange& e);
    /// Throws ParseError naming the 1-based line on malformed input.
    static Exchange from_line(std::string_view line, std::size_t line_no);

    static Transcript load(const std::string& path);
    void save(const std::string& path) const;

private:
    std::vector<Exchange> exchanges_;
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class MissingFixtureError : public Error {
public:
    MissingFixtureError(AgentRole role, std::string hash);
    AgentRole role() const noexcept { return role_; }
    const std::string& hash() const noexcept { return hash_; }

private:
    AgentRole role_;
    std::string hash_;
};

class HttpError : public Error {
public:
    HttpError(std::string endpoint, int status, const std::string& detail);
    const std::string& endpoint() const noexcept { return endpoint_; }
    int status() const noexcept { return status_; }  // 0 for transport failures

private:
    std::string endpoint_;
    int status_;
};

class AuthError : public HttpError {
public:
    using HttpError::HttpError;
};

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// Serves recorded responses keyed by (role, request hash). Responses for a
/// repeated key are served in record order; once consumed they are gone.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(const Transcript& transcript);
    static std::shared_ptr<ReplayBackend> from_file(const std::string& path);

    std::string complete(const ChatRequest& request) override;
    std::size_t remaining() const;

private:
    mutable std::mutex mutex_;
    std::map<std::pair<AgentRole, std::string>, std::deque<std::string>> responses_;
};

/// Wraps another backend and appends every exchange to a JSON-lines file.
class RecordingBackend : public Backend {
public:
    RecordingBackend(std::shared_ptr<Backend> inner, const std::string& path);
    std::string complete(const ChatRequest& request) override;

private:
    std::shared_ptr<Backend> inner_;
    std::string path_;
    std::mutex mutex_;
    std::size_t seq_ = 0;
};

struct HttpOptions {
    std::string endpoint;  // base URL, e.g. https://api.openai.com/v1
    std::string api_key;
    int timeout_seconds = 120;
    int max_attempts = 3;
    double initial_backoff_seconds = 1.0;
};

/// OpenAI-compatible chat-completions client (temperature 0, no streaming).
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpOptions options);
    std::string complete(const ChatRequest& request) override;

    const HttpOptions& options() const { return options_; }

private:
    HttpOptions options_;
};

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

struct GatewayOptions {
    std::map<AgentRole, ModelTier> role_tiers;
    std::map<ModelTier, std::string> tier_models;
    std::map<ModelTier, std::size_t> context_budget_chars{{ModelTier::Strong, 100000},
                                                          {ModelTier::Light, 12000}};

    static GatewayOptions from(const RunConfig& cfg);
};

/// Single entry point through which every agent role talks to a model.
/// Thread-safe; the in-memory transcript is appended under a lock.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, GatewayOptions options);

    /// `history` must start with the role's system prompt.
    std::string complete(AgentRole role, std::vector<ChatTurn> history);

    void set_tag(std::string tag);
    Transcript transcript() const;
    std::size_t calls() const;

    /// Oldest-first truncation after the system prompt so the history fits
    /// `budget` characters. The newest turn is kept (and clipped if needed).
    static std::vector<ChatTurn> fit_context(std::vector<ChatTurn> history, std::size_t budget);

private:
    std::shared_ptr<Backend> backend_;
    GatewayOptions options_;
    mutable std::mutex mutex_;
    Transcript transcript_;
    std::string tag_;
};

std::string utc_timestamp();

}  // namespace penheal::llm
