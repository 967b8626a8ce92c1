#pragma once

#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "penheal/core/errors.hpp"
#include "penheal/core/model.hpp"

namespace penheal::remediation {

struct CveRecord {
    std::string cve_id;
    std::string description;
    std::string vector_string;
    CvssMetrics metrics;  // parsed from vector_string, base score computed locally
    std::string source_timestamp;

    bool operator==(const CveRecord&) const = default;
};

class CveNotFound : public Error {
public:
    explicit CveNotFound(const std::string& cve_id) : Error("no NVD record for " + cve_id), id_(cve_id) {}
    const std::string& cve_id() const noexcept { return id_; }

private:
    std::string id_;
};

/// Reads an NVD 2.0 "cves" response body. Prefers a CVSS v3.1 primary
/// metric, then any v3.1, then v3.0. Throws CveNotFound when the response
/// holds no matching record or no v3 vector, ParseError on malformed JSON.
CveRecord parse_nvd_response(std::string_view body, const std::string& cve_id);

class CveSource {
public:
    virtual ~CveSource() = default;
    /// Throws CveNotFound; callers fall back to the Estimator.
    virtual CveRecord lookup(const std::string& cve_id) = 0;
};

/// Bundled responses: `<dir>/<CVE-ID>.json`, each a full NVD response body.
class FixtureCveSource : public CveSource {
public:
    explicit FixtureCveSource(std::string dir);
    CveRecord lookup(const std::string& cve_id) override;

private:
    std::string dir_;
};

struct NvdOptions {
    std::string base_url = "https://services.nvd.nist.gov/rest/json/cves/2.0";
    std::string api_key;    // sent as the "apiKey" header when set
    std::string cache_dir;  // raw responses kept indefinitely; empty = no cache
    int timeout_seconds = 30;
    int max_attempts = 4;
    double initial_backoff_seconds = 2.0;
};

/// Live NVD client with an on-disk cache consulted before the network.
class NvdClient : public CveSource {
public:
    explicit NvdClient(NvdOptions options);
    CveRecord lookup(const std::string& cve_id) override;

private:
    NvdOptions options_;
    std::shared_mutex cache_mutex_;
};

/// Checks the id, then asks `source`. "CVE-NA" and malformed ids raise
/// PreconditionError.
CveRecord lookup_cve(const std::string& cve_id, CveSource& source);

}  // namespace penheal::remediation
