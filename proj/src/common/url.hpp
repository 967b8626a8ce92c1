#pragma once

#include <string>
#include <string_view>

namespace penheal::detail {

/// "https://host:8443/v1/x" -> {"https://host:8443", "/v1/x"}.
struct SplitUrl {
    std::string origin;
    std::string path;
};

inline SplitUrl split_url(std::string_view url) {
    const auto scheme_end = url.find("://");
    const auto host_start = scheme_end == std::string_view::npos ? 0 : scheme_end + 3;
    const auto slash = url.find('/', host_start);
    if (slash == std::string_view::npos) return {std::string(url), ""};
    std::string path(url.substr(slash));
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {std::string(url.substr(0, slash)), path};
}

}  // namespace penheal::detail
