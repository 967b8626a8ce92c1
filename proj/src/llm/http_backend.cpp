#include <httplib.h>

#include <chrono>
#include <cmath>
#include <thread>

#include "../common/url.hpp"
#include "penheal/core/json.hpp"
#include "penheal/llm/gateway.hpp"
#include "penheal/net_guard.hpp"

namespace penheal::llm {

namespace {

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpBackend::HttpBackend(HttpOptions options) : options_(std::move(options)) {
    if (options_.endpoint.empty()) throw ConfigError("llm.endpoint", "endpoint URL is empty");
    if (options_.max_attempts < 1) options_.max_attempts = 1;
}

std::string HttpBackend::complete(const ChatRequest& request) {
    const auto url = detail::split_url(options_.endpoint);
    const std::string path = url.path + "/chat/completions";
    const std::string endpoint = url.origin + path;

    json body{{"model", request.model}, {"temperature", 0}, {"stream", false}};
    json messages = json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", to_string(m.role_tag)}, {"content", m.content}});
    }
    body["messages"] = std::move(messages);
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

    for (int attempt = 1;; ++attempt) {
        net::check(endpoint);
        httplib::Client client(url.origin);
        client.set_connection_timeout(options_.timeout_seconds, 0);
        client.set_read_timeout(options_.timeout_seconds, 0);
        client.set_write_timeout(options_.timeout_seconds, 0);

        auto res = client.Post(path, headers, payload, "application/json");
        const int status = res ? res->status : 0;
        if (res && status == 200) {
            try {
                auto j = json::parse(res->body);
                return j.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const json::exception& e) {
                throw HttpError(endpoint, status, std::string("malformed completion body: ") + e.what());
            }
        }
        if (status == 401 || status == 403) {
            throw AuthError(endpoint, status, res->body.substr(0, 200));
        }
        const bool transient = !res || retryable(status);
        if (!transient || attempt >= options_.max_attempts) {
            const std::string detail = res ? res->body.substr(0, 200) : httplib::to_string(res.error());
            throw HttpError(endpoint, status, detail);
        }
        const double wait = options_.initial_backoff_seconds * std::pow(2.0, attempt - 1);
        std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
}

}  // namespace penheal::llm
