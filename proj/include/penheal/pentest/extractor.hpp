#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "penheal/core/model.hpp"

namespace penheal::pentest {

struct ExtractResult {
    std::vector<Vulnerability> findings;  // deduplicated, in block order
    std::vector<std::string> warnings;    // one per skipped block
};

/// Parses Extractor output: blocks opened by "Exploited: <id>" followed by
/// "key: value" attribute lines (service, port, description, method).
/// Ids without a CVE pattern become "CVE-NA"; blocks lacking a service are
/// skipped.
ExtractResult parse_extractor_output(std::string_view text);

/// One line per finding in the counterfactual prompt format, e.g.
/// "Port 21/ftp: vsFTPd 2.3.4 backdoor (CVE-2011-2523)".
std::string counterfactual_line(const Vulnerability& v);

}  // namespace penheal::pentest
