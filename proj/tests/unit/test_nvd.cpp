#include <atomic>

#include "doctest.h"
#include "penheal/net_guard.hpp"
#include "penheal/remediation/cvss.hpp"
#include "penheal/remediation/nvd.hpp"
#include "stub_server.hpp"
#include "support.hpp"

using namespace penheal;
using namespace penheal::remediation;

namespace {

std::string fixture(const std::string& id) { return testing::read_file(testing::source_path("data/nvd/" + id + ".json")); }

std::string response_with(const std::string& id, const std::string& metrics) {
    return R"({"resultsPerPage":1,"totalResults":1,"vulnerabilities":[{"cve":{"id":")" + id +
           R"(","published":"2011-07-07T20:55:01.000","descriptions":[{"lang":"en","value":"desc"}],"metrics":)" + metrics +
           "}}]}";
}

std::string metric(const std::string& key, const std::string& type, const std::string& vector) {
    return "\"" + key + R"(":[{"source":"x","type":")" + type + R"(","cvssData":{"vectorString":")" + vector + "\"}}]";
}

}  // namespace

TEST_SUITE("nvd") {

TEST_CASE("bundled responses parse and rescore") {
    FixtureCveSource source(testing::source_path("data/nvd"));
    const auto rec = lookup_cve("CVE-2011-2523", source);
    CHECK(rec.cve_id == "CVE-2011-2523");
    CHECK(rec.vector_string == "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H");
    CHECK(rec.metrics.base_score == 9.8);
    CHECK(rec.metrics.base_score == cvss::base_score(cvss::parse_vector(rec.vector_string)));
    CHECK_FALSE(rec.description.empty());
    for (const char* id : {"CVE-2010-2075", "CVE-2012-1823"}) {
        CHECK(lookup_cve(id, source).metrics.base_score == 9.8);
    }
}

TEST_CASE("records without a v3 metric are not found") {
    FixtureCveSource source(testing::source_path("data/nvd"));
    CHECK_THROWS_AS(lookup_cve("CVE-2007-2447", source), CveNotFound);
    CHECK_THROWS_AS(lookup_cve("CVE-1999-0001", source), CveNotFound);
}

TEST_CASE("lookups need a real CVE id") {
    FixtureCveSource source(testing::source_path("data/nvd"));
    CHECK_THROWS_AS(lookup_cve("CVE-NA", source), PreconditionError);
    CHECK_THROWS_AS(lookup_cve("vsftpd", source), PreconditionError);
    CHECK_THROWS_AS(lookup_cve("", source), PreconditionError);
}

TEST_CASE("metric preference") {
    const std::string v31s = metric("cvssMetricV31", "Secondary", "CVSS:3.1/AV:N/AC:H/PR:N/UI:N/S:U/C:L/I:N/A:N");
    const std::string v30 = metric("cvssMetricV30", "Primary", "CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H");

    CHECK(parse_nvd_response(response_with("CVE-2000-0001", "{" + v30 + "}"), "CVE-2000-0001").metrics.base_score == 9.8);
    CHECK(parse_nvd_response(response_with("CVE-2000-0001", "{" + v31s + "," + v30 + "}"), "CVE-2000-0001")
              .metrics.base_score == 3.7);

    const std::string both = R"({"cvssMetricV31":[{"type":"Secondary","cvssData":{"vectorString":"CVSS:3.1/AV:N/AC:H/PR:N/UI:N/S:U/C:L/I:N/A:N"}},)"
                             R"({"type":"Primary","cvssData":{"vectorString":"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:N/A:N"}}]})";
    CHECK(parse_nvd_response(response_with("CVE-2000-0001", both), "CVE-2000-0001").metrics.base_score == 7.5);

    CHECK_THROWS_AS(parse_nvd_response(response_with("CVE-2000-0001", "{}"), "CVE-2000-0001"), CveNotFound);
    CHECK_THROWS_AS(parse_nvd_response(response_with("CVE-2000-0002", "{" + v30 + "}"), "CVE-2000-0001"), CveNotFound);
    CHECK_THROWS_AS(parse_nvd_response(R"({"vulnerabilities":[]})", "CVE-2000-0001"), CveNotFound);
    CHECK_THROWS_AS(parse_nvd_response("{not json", "CVE-2000-0001"), ParseError);
}

TEST_CASE("live client: success, cache and api key") {
    net::deny_all(false);
    testing::StubServer stub;
    std::atomic<int> hits{0};
    std::string key;
    std::string cve_param;
    stub.server.Get("/rest/json/cves/2.0", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        key = req.get_header_value("apiKey");
        cve_param = req.get_param_value("cveId");
        res.set_content(fixture("CVE-2011-2523"), "application/json");
    });
    stub.start();

    testing::TempDir cache;
    NvdOptions opt;
    opt.base_url = stub.url("/rest/json/cves/2.0");
    opt.api_key = "nvd-key";
    opt.cache_dir = cache.str();
    opt.initial_backoff_seconds = 0;
    NvdClient client(opt);
    CHECK(client.lookup("CVE-2011-2523").metrics.base_score == 9.8);
    CHECK(key == "nvd-key");
    CHECK(cve_param == "CVE-2011-2523");
    CHECK(std::filesystem::exists(cache.file("CVE-2011-2523.json")));

    net::reset_attempts();
    CHECK(client.lookup("CVE-2011-2523").metrics.base_score == 9.8);
    CHECK(hits == 1);
    CHECK(net::attempts() == 0);

    opt.api_key.clear();
    opt.cache_dir.clear();
    NvdClient no_key(opt);
    no_key.lookup("CVE-2011-2523");
    CHECK(key.empty());
    CHECK(hits == 2);
}

TEST_CASE("live client: 404 and retries") {
    net::deny_all(false);
    testing::StubServer stub;
    std::atomic<int> flaky{0};
    stub.server.Get("/missing", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    stub.server.Get("/flaky", [&](const httplib::Request&, httplib::Response& res) {
        if (++flaky < 3) {
            res.status = flaky == 1 ? 403 : 503;
            return;
        }
        res.set_content(fixture("CVE-2012-1823"), "application/json");
    });
    stub.server.Get("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 400; });
    stub.start();

    NvdOptions opt;
    opt.initial_backoff_seconds = 0;
    opt.base_url = stub.url("/missing");
    CHECK_THROWS_AS(NvdClient(opt).lookup("CVE-2012-1823"), CveNotFound);
    opt.base_url = stub.url("/flaky");
    CHECK(NvdClient(opt).lookup("CVE-2012-1823").metrics.base_score == 9.8);
    CHECK(flaky == 3);
    opt.base_url = stub.url("/broken");
    CHECK_THROWS_WITH_AS(NvdClient(opt).lookup("CVE-2012-1823"), doctest::Contains("HTTP 400"), Error);
}

TEST_CASE("live client refuses the network in hermetic mode") {
    net::deny_all(true);
    net::reset_attempts();
    NvdOptions opt;
    opt.base_url = "http://127.0.0.1:9/rest";
    CHECK_THROWS_AS(NvdClient(opt).lookup("CVE-2011-2523"), net::NetworkDenied);
    CHECK(net::attempts() == 1);
    net::deny_all(false);
    net::reset_attempts();
}

}  // TEST_SUITE
