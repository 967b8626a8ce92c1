#pragma once

#include <atomic>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "penheal/llm/gateway.hpp"

namespace testing {

inline std::string source_path(const std::string& rel) { return std::string(PENHEAL_SOURCE_DIR) + "/" + rel; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
}

/// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("penheal-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

/// Backend answering from per-role queues; the last reply of a queue
/// repeats once it is reached. Every request is kept for inspection.
class QueueBackend : public penheal::llm::Backend {
public:
    std::map<penheal::AgentRole, std::deque<std::string>> replies;
    std::function<std::string(const penheal::llm::ChatRequest&)> fallback;
    std::vector<penheal::llm::ChatRequest> requests;

    void push(penheal::AgentRole role, std::string reply) { replies[role].push_back(std::move(reply)); }

    std::string complete(const penheal::llm::ChatRequest& request) override {
        requests.push_back(request);
        auto it = replies.find(request.role);
        if (it != replies.end() && !it->second.empty()) {
            std::string r = it->second.front();
            if (it->second.size() > 1) it->second.pop_front();
            return r;
        }
        if (fallback) return fallback(request);
        throw penheal::Error("QueueBackend: no reply for " + std::string(penheal::to_string(request.role)));
    }

    std::size_t count(penheal::AgentRole role) const {
        std::size_t n = 0;
        for (const auto& r : requests) n += r.role == role;
        return n;
    }
};

}  // namespace testing
