#include "penheal/net_guard.hpp"

#include <atomic>

namespace penheal::net {

namespace {
std::atomic<bool> g_denied{false};
std::atomic<std::size_t> g_attempts{0};
}  // namespace

void deny_all(bool deny) { g_denied = deny; }
bool denied() { return g_denied; }

void check(const std::string& endpoint) {
    ++g_attempts;
    if (g_denied) throw NetworkDenied(endpoint);
}

std::size_t attempts() { return g_attempts; }
void reset_attempts() { g_attempts = 0; }

}  // namespace penheal::net
