#pragma once

#include <cstddef>
#include <string>

#include "penheal/core/errors.hpp"

namespace penheal::net {

class NetworkDenied : public Error {
public:
    explicit NetworkDenied(const std::string& endpoint)
        : Error("network access denied in hermetic mode: " + endpoint) {}
};

/// Process-wide switch consulted by every outbound HTTP client. When
/// denied, clients throw NetworkDenied before opening a socket.
void deny_all(bool deny);
bool denied();

/// Called by clients before each request. Counts the attempt and throws if
/// the network is denied.
void check(const std::string& endpoint);

/// Number of outbound attempts since the last reset.
std::size_t attempts();
void reset_attempts();

}  // namespace penheal::net
