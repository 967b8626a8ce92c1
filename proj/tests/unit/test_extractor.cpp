#include "doctest.h"
#include "penheal/pentest/extractor.hpp"
#include "cases/parser_cases.hpp"

using namespace penheal;
using namespace penheal::pentest;

TEST_SUITE("extractor") {

TEST_CASE("extractor block parser table") {
    const auto& table = cases::extractor_cases();
    CHECK(table.size() >= 10);
    for (const auto& c : table) {
        INFO(c.text);
        CHECK(cases::check(c) == "");
    }
}

TEST_CASE("description and method are carried") {
    const auto r = parse_extractor_output(
        "Exploited: CVE-2011-2523\nservice: ftp\nport: 21\ndescription: vsFTPd 2.3.4 backdoor\n"
        "exploitation method: msf vsftpd_234_backdoor");
    REQUIRE(r.findings.size() == 1);
    CHECK(r.findings[0].description == "vsFTPd 2.3.4 backdoor");
    CHECK(r.findings[0].exploitation_method == "msf vsftpd_234_backdoor");
}

TEST_CASE("counterfactual lines") {
    Vulnerability v;
    v.id = "CVE-2011-2523";
    v.service = "ftp";
    v.port = 21;
    v.description = "vsFTPd 2.3.4 backdoor";
    CHECK(counterfactual_line(v) == "Port 21/ftp: vsFTPd 2.3.4 backdoor (CVE-2011-2523)");
    v.id = "CVE-NA";
    v.service = "http";
    v.port = 80;
    v.description = "SQL injection";
    CHECK(counterfactual_line(v) == "Port 80/http: SQL injection (Unknown CVE)");
    v.description.clear();
    v.port.reset();
    CHECK(counterfactual_line(v) == "Port unknown/http: exploited vulnerability (Unknown CVE)");
}

}  // TEST_SUITE
