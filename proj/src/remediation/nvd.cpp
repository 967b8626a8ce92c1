#include "penheal/remediation/nvd.hpp"

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "../common/url.hpp"
#include "penheal/core/json.hpp"
#include "penheal/core/text.hpp"
#include "penheal/net_guard.hpp"
#include "penheal/remediation/cvss.hpp"

namespace fs = std::filesystem;

namespace penheal::remediation {

namespace {

const json* pick_metric(const json& metrics) {
    for (const char* key : {"cvssMetricV31", "cvssMetricV30"}) {
        if (!metrics.contains(key) || !metrics[key].is_array() || metrics[key].empty()) continue;
        for (const auto& m : metrics[key]) {
            if (m.value("type", "") == "Primary") return &m;
        }
        return &metrics[key].front();
    }
    return nullptr;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

CveRecord parse_nvd_response(std::string_view body, const std::string& cve_id) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ParseError("NVD response for " + cve_id + ": " + e.what(), e.byte);
    }
    const auto& vulns = doc.value("vulnerabilities", json::array());
    for (const auto& v : vulns) {
        const auto& cve = v.value("cve", json::object());
        if (!text::iequals(cve.value("id", ""), cve_id)) continue;
        const json metrics = cve.value("metrics", json::object());
        const json* metric = pick_metric(metrics);
        if (!metric) throw CveNotFound(cve_id);
        CveRecord rec;
        rec.cve_id = cve.value("id", cve_id);
        for (const auto& d : cve.value("descriptions", json::array())) {
            if (d.value("lang", "") == "en") {
                rec.description = d.value("value", "");
                break;
            }
        }
        rec.vector_string = metric->at("cvssData").at("vectorString").get<std::string>();
        rec.metrics = cvss::scored(cvss::parse_vector(rec.vector_string));
        rec.source_timestamp = cve.value("lastModified", "");
        return rec;
    }
    throw CveNotFound(cve_id);
}

FixtureCveSource::FixtureCveSource(std::string dir) : dir_(std::move(dir)) {}

CveRecord FixtureCveSource::lookup(const std::string& cve_id) {
    const fs::path p = fs::path(dir_) / (cve_id + ".json");
    if (!fs::is_regular_file(p)) throw CveNotFound(cve_id);
    return parse_nvd_response(read_file(p), cve_id);
}

NvdClient::NvdClient(NvdOptions options) : options_(std::move(options)) {
    if (options_.max_attempts < 1) options_.max_attempts = 1;
}

CveRecord NvdClient::lookup(const std::string& cve_id) {
    const fs::path cached = options_.cache_dir.empty() ? fs::path() : fs::path(options_.cache_dir) / (cve_id + ".json");
    if (!cached.empty()) {
        std::shared_lock lock(cache_mutex_);
        if (fs::is_regular_file(cached)) return parse_nvd_response(read_file(cached), cve_id);
    }

    const auto url = detail::split_url(options_.base_url);
    const std::string endpoint = url.origin + url.path;
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("apiKey", options_.api_key);
    const httplib::Params params{{"cveId", cve_id}};

    std::string body;
    for (int attempt = 1;; ++attempt) {
        net::check(endpoint);
        httplib::Client client(url.origin);
        client.set_connection_timeout(options_.timeout_seconds, 0);
        client.set_read_timeout(options_.timeout_seconds, 0);
        auto res = client.Get(url.path.empty() ? "/" : url.path, params, headers);
        const int status = res ? res->status : 0;
        if (status == 200) {
            body = res->body;
            break;
        }
        if (status == 404) throw CveNotFound(cve_id);
        // NVD signals rate limiting with 403 as well as 429.
        const bool transient = !res || status == 403 || status == 429 || status >= 500;
        if (!transient || attempt >= options_.max_attempts) {
            throw Error("NVD lookup of " + cve_id + " failed: " +
                        (res ? "HTTP " + std::to_string(status) : httplib::to_string(res.error())));
        }
        std::this_thread::sleep_for(
            std::chrono::duration<double>(options_.initial_backoff_seconds * std::pow(2.0, attempt - 1)));
    }

    auto rec = parse_nvd_response(body, cve_id);
    if (!cached.empty()) {
        std::unique_lock lock(cache_mutex_);
        fs::create_directories(cached.parent_path());
        const fs::path tmp = cached.string() + ".tmp";
        std::ofstream(tmp, std::ios::binary | std::ios::trunc) << body;
        fs::rename(tmp, cached);
    }
    return rec;
}

CveRecord lookup_cve(const std::string& cve_id, CveSource& source) {
    if (!is_cve_id(cve_id)) throw PreconditionError("lookup_cve needs a CVE id, got \"" + cve_id + "\"");
    return source.lookup(cve_id);
}

}  // namespace penheal::remediation
