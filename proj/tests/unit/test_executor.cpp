#include <chrono>

#include "doctest.h"
#include "penheal/pentest/executor.hpp"

using namespace penheal;
using namespace penheal::pentest;

TEST_SUITE("executor") {

TEST_CASE("output cap includes the marker") {
    CHECK(cap_output("short") == "short");
    const std::string exact(kMaxOutputBytes, 'x');
    CHECK(cap_output(exact) == exact);
    const auto capped = cap_output(std::string(kMaxOutputBytes + 1, 'x'));
    CHECK(capped.size() == kMaxOutputBytes);
    CHECK(capped.substr(capped.size() - kOutputTruncatedMarker.size()) == kOutputTruncatedMarker);
}

TEST_CASE("sim backend carries state between commands") {
    SimBackend backend(sim::Simulator(sim::HostModel::builtin(), "10.0.2.4"));
    CHECK(backend.name() == "target-sim");
    auto o = backend.execute({"telnet 10.0.2.4", Channel::Shell, 120});
    CHECK(o.exit_status == 0);
    backend.execute({"msfadmin", Channel::Shell, 120});
    o = backend.execute({"msfadmin", Channel::Shell, 120});
    CHECK(backend.state().triggered_truth == std::set<int>{2});
    o = backend.execute({"use exploit/unix/irc/unreal_ircd_3281_backdoor; set RHOSTS 10.0.2.4; exploit",
                         Channel::Msfconsole, 120});
    CHECK(o.output.find("Command shell session 2 opened") != std::string::npos);
    CHECK(backend.state().triggered_truth == std::set<int>{2, 7});
    CHECK_FALSE(o.timed_out);
    CHECK_FALSE(o.spawn_failed);
}

TEST_CASE("subprocess output and exit status") {
    auto o = ShellBackend::run_process({"/bin/sh", "-c", "echo out; echo err 1>&2; exit 3"}, 10);
    CHECK(o.exit_status == 3);
    CHECK(o.output.find("out") != std::string::npos);
    CHECK(o.output.find("err") != std::string::npos);
    CHECK_FALSE(o.timed_out);

    ShellBackend shell;
    o = shell.execute({"printf 'a%sb' x", Channel::Shell, 10});
    CHECK(o.exit_status == 0);
    CHECK(o.output == "axb");
}

TEST_CASE("subprocess timeout kills the process group") {
    const auto start = std::chrono::steady_clock::now();
    const auto o = ShellBackend::run_process({"/bin/sh", "-c", "sleep 999 & sleep 999"}, 1);
    const auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(o.timed_out);
    CHECK(o.exit_status == -1);
    CHECK(o.output.find("[timed out after 1s]") != std::string::npos);
    CHECK(elapsed < std::chrono::seconds(5));
}

TEST_CASE("subprocess output is capped") {
    const auto o = ShellBackend::run_process({"/bin/sh", "-c", "head -c 200000 /dev/zero | tr '\\0' 'y'"}, 10);
    CHECK(o.exit_status == 0);
    CHECK(o.output.size() == kMaxOutputBytes);
}

TEST_CASE("missing programs are reported") {
    const auto o = ShellBackend::run_process({"/nonexistent/program"}, 5);
    CHECK(o.exit_status != 0);
    ShellBackend shell("/nonexistent/msfconsole");
    const auto m = shell.execute({"search samba", Channel::Msfconsole, 5});
    CHECK(m.spawn_failed);
    CHECK(m.output.find("msfconsole not found") != std::string::npos);
}

}  // TEST_SUITE
