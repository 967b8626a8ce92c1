#include "penheal/llm/gateway.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "penheal/core/json.hpp"
#include "penheal/core/text.hpp"

namespace penheal::llm {

namespace {

constexpr std::pair<TurnRole, std::string_view> kTurnRoles[] = {
    {TurnRole::System, "system"}, {TurnRole::User, "user"}, {TurnRole::Assistant, "assistant"}};

json messages_json(const std::vector<ChatTurn>& messages) {
    json arr = json::array();
    for (const auto& m : messages) arr.push_back({{"role", to_string(m.role_tag)}, {"content", m.content}});
    return arr;
}

std::size_t total_chars(const std::vector<ChatTurn>& history) {
    std::size_t n = 0;
    for (const auto& t : history) n += t.content.size();
    return n;
}

}  // namespace

std::string_view to_string(TurnRole r) {
    for (const auto& [role, name] : kTurnRoles) {
        if (role == r) return name;
    }
    return "?";
}

std::optional<TurnRole> turn_role_from(std::string_view text) {
    for (const auto& [role, name] : kTurnRoles) {
        if (name == text) return role;
    }
    return std::nullopt;
}

std::string request_hash(AgentRole role, const std::vector<ChatTurn>& messages) {
    json key{{"role", to_string(role)}, {"messages", messages_json(messages)}};
    return text::sha256_hex(key.dump());
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Transcript
// ---------------------------------------------------------------------------

void Transcript::append(Exchange e) { exchanges_.push_back(std::move(e)); }

std::string Transcript::to_line(const Exchange& e) {
    json j{{"seq", e.seq},
           {"role", to_string(e.role)},
           {"tier", to_string(e.tier)},
           {"model", e.model},
           {"request_hash", e.request_hash},
           {"messages", messages_json(e.messages)},
           {"response", e.response},
           {"timestamp", e.timestamp},
           {"tag", e.tag}};
    return j.dump();
}

Exchange Transcript::from_line(std::string_view line, std::size_t line_no) {
    const std::string where = "transcript line " + std::to_string(line_no);
    json j;
    try {
        j = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
        throw ParseError(where + ": " + e.what(), e.byte);
    }
    try {
        Exchange e;
        e.seq = j.at("seq").get<std::size_t>();
        auto role = agent_role_from(j.at("role").get<std::string>());
        if (!role) throw ParseError(where + ": unknown role", std::string::npos);
        e.role = *role;
        e.tier = model_tier_from(j.value("tier", std::string("strong"))).value_or(default_tier(e.role));
        e.model = j.value("model", std::string{});
        e.request_hash = j.at("request_hash").get<std::string>();
        for (const auto& m : j.at("messages")) {
            auto tag = turn_role_from(m.at("role").get<std::string>());
            if (!tag) throw ParseError(where + ": unknown message role", std::string::npos);
            e.messages.push_back({*tag, m.at("content").get<std::string>()});
        }
        e.response = j.at("response").get<std::string>();
        e.timestamp = j.value("timestamp", std::string{});
        e.tag = j.value("tag", std::string{});
        return e;
    } catch (const json::exception& ex) {
        throw ParseError(where + ": " + ex.what(), std::string::npos);
    }
}

Transcript Transcript::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read transcript " + path);
    Transcript t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        t.append(from_line(line, line_no));
    }
    return t;
}

void Transcript::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write transcript " + path);
    for (const auto& e : exchanges_) out << to_line(e) << '\n';
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

MissingFixtureError::MissingFixtureError(AgentRole role, std::string hash)
    : Error("no recorded response for role " + std::string(penheal::to_string(role)) +
            " with request hash " + hash),
      role_(role),
      hash_(std::move(hash)) {}

HttpError::HttpError(std::string endpoint, int status, const std::string& detail)
    : Error(endpoint + " -> " + (status ? "HTTP " + std::to_string(status) : std::string("transport error")) +
            (detail.empty() ? "" : ": " + detail)),
      endpoint_(std::move(endpoint)),
      status_(status) {}

// ---------------------------------------------------------------------------
// Replay / record
// ---------------------------------------------------------------------------

ReplayBackend::ReplayBackend(const Transcript& transcript) {
    for (const auto& e : transcript.exchanges()) {
        responses_[{e.role, e.request_hash}].push_back(e.response);
    }
}

std::shared_ptr<ReplayBackend> ReplayBackend::from_file(const std::string& path) {
    return std::make_shared<ReplayBackend>(Transcript::load(path));
}

std::string ReplayBackend::complete(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    auto it = responses_.find({request.role, request.request_hash});
    if (it == responses_.end() || it->second.empty()) {
        throw MissingFixtureError(request.role, request.request_hash);
    }
    std::string response = std::move(it->second.front());
    it->second.pop_front();
    return response;
}

std::size_t ReplayBackend::remaining() const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& [key, queue] : responses_) n += queue.size();
    return n;
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner, const std::string& path)
    : inner_(std::move(inner)), path_(path) {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write transcript " + path_);
}

std::string RecordingBackend::complete(const ChatRequest& request) {
    std::string response = inner_->complete(request);
    Exchange e;
    e.role = request.role;
    e.tier = request.tier;
    e.model = request.model;
    e.request_hash = request.request_hash;
    e.messages = request.messages;
    e.response = response;
    e.timestamp = utc_timestamp();

    std::lock_guard lock(mutex_);
    e.seq = seq_++;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot append to transcript " + path_);
    out << Transcript::to_line(e) << '\n';
    return response;
}

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

GatewayOptions GatewayOptions::from(const RunConfig& cfg) {
    GatewayOptions o;
    o.role_tiers = cfg.role_tiers;
    o.tier_models = cfg.tier_models;
    return o;
}

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {}

std::vector<ChatTurn> Gateway::fit_context(std::vector<ChatTurn> history, std::size_t budget) {
    static constexpr std::string_view kClipMarker = "\n[...clipped]";
    while (total_chars(history) > budget && history.size() > 2) {
        history.erase(history.begin() + 1);
    }
    if (total_chars(history) > budget && history.size() >= 2) {
        const std::size_t others = total_chars(history) - history.back().content.size();
        const std::size_t room = budget > others ? budget - others : 0;
        history.back().content = text::truncate_with_marker(history.back().content,
                                                            std::max<std::size_t>(room, kClipMarker.size() + 1),
                                                            kClipMarker);
    }
    return history;
}

std::string Gateway::complete(AgentRole role, std::vector<ChatTurn> history) {
    if (history.empty() || history.front().role_tag != TurnRole::System) {
        throw PreconditionError("history for " + std::string(penheal::to_string(role)) +
                                " must start with its system prompt");
    }
    for (const auto& turn : history) {
        if (turn.content.empty()) throw PreconditionError("chat turn content must be non-empty");
    }

    ChatRequest req;
    req.role = role;
    auto tier_it = options_.role_tiers.find(role);
    req.tier = tier_it == options_.role_tiers.end() ? default_tier(role) : tier_it->second;
    auto model_it = options_.tier_models.find(req.tier);
    req.model = model_it == options_.tier_models.end() ? std::string{} : model_it->second;
    auto budget_it = options_.context_budget_chars.find(req.tier);
    req.messages = budget_it == options_.context_budget_chars.end()
                       ? std::move(history)
                       : fit_context(std::move(history), budget_it->second);
    req.request_hash = request_hash(role, req.messages);

    std::string response = backend_->complete(req);

    Exchange e;
    e.role = role;
    e.tier = req.tier;
    e.model = req.model;
    e.request_hash = req.request_hash;
    e.messages = std::move(req.messages);
    e.response = response;
    e.timestamp = utc_timestamp();
    std::lock_guard lock(mutex_);
    e.seq = transcript_.size();
    e.tag = tag_;
    transcript_.append(std::move(e));
    return response;
}

void Gateway::set_tag(std::string tag) {
    std::lock_guard lock(mutex_);
    tag_ = std::move(tag);
}

Transcript Gateway::transcript() const {
    std::lock_guard lock(mutex_);
    return transcript_;
}

std::size_t Gateway::calls() const {
    std::lock_guard lock(mutex_);
    return transcript_.size();
}

}  // namespace penheal::llm
