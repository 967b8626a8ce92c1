#include "penheal/pentest/executor.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>

#include "penheal/core/text.hpp"

namespace penheal::pentest {

std::string cap_output(std::string output) {
    if (output.size() <= kMaxOutputBytes) return output;
    return text::truncate_with_marker(output, kMaxOutputBytes, kOutputTruncatedMarker);
}

// ---------------------------------------------------------------------------
// Simulator
// ---------------------------------------------------------------------------

SimBackend::SimBackend(sim::Simulator simulator) : sim_(std::move(simulator)) {}

ExecOutcome SimBackend::execute(const Command& cmd) {
    std::lock_guard lock(mutex_);
    auto r = sim_.simulate(cmd.raw, cmd.channel == Channel::Msfconsole, state_);
    state_ = std::move(r.state);
    return {cap_output(std::move(r.output)), r.exit_status, false, false};
}

// ---------------------------------------------------------------------------
// Subprocess
// ---------------------------------------------------------------------------

namespace {

bool on_path(const std::string& prog) {
    if (prog.find('/') != std::string::npos) return ::access(prog.c_str(), X_OK) == 0;
    const char* path = std::getenv("PATH");
    if (!path) return false;
    for (const auto& dir : text::split(path, ':')) {
        if (dir.empty()) continue;
        const auto candidate = std::filesystem::path(dir) / prog;
        if (::access(candidate.c_str(), X_OK) == 0) return true;
    }
    return false;
}

}  // namespace

ShellBackend::ShellBackend(std::string msfconsole_path) : msfconsole_(std::move(msfconsole_path)) {}

ExecOutcome ShellBackend::run_process(const std::vector<std::string>& argv, int timeout_seconds) {
    ExecOutcome outcome;
    int fds[2];
    if (::pipe(fds) != 0) {
        outcome.spawn_failed = true;
        outcome.exit_status = -1;
        outcome.output = std::string("pipe failed: ") + std::strerror(errno);
        return outcome;
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        outcome.spawn_failed = true;
        outcome.exit_status = -1;
        outcome.output = std::string("fork failed: ") + std::strerror(errno);
        return outcome;
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(fds[1], STDOUT_FILENO);
        ::dup2(fds[1], STDERR_FILENO);
        ::close(fds[0]);
        ::close(fds[1]);
        std::vector<char*> args;
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    ::close(fds[1]);

    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(timeout_seconds);
    std::string buf;
    char chunk[4096];
    for (;;) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            outcome.timed_out = true;
            break;
        }
        pollfd pfd{fds[0], POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
        if (ready < 0 && errno != EINTR) break;
        if (ready <= 0) continue;
        const ssize_t n = ::read(fds[0], chunk, sizeof chunk);
        if (n <= 0) break;
        // Keep draining past the cap so the child never blocks on a full pipe.
        if (buf.size() <= kMaxOutputBytes) buf.append(chunk, static_cast<std::size_t>(n));
    }
    ::close(fds[0]);
    if (outcome.timed_out) ::kill(-pid, SIGKILL);

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (outcome.timed_out) {
        outcome.exit_status = -1;
        buf += "\n[timed out after " + std::to_string(timeout_seconds) + "s]";
    } else if (WIFEXITED(status)) {
        outcome.exit_status = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        outcome.exit_status = 128 + WTERMSIG(status);
    }
    outcome.output = cap_output(std::move(buf));
    return outcome;
}

ExecOutcome ShellBackend::execute(const Command& cmd) {
    if (cmd.channel == Channel::Msfconsole) {
        if (!on_path(msfconsole_)) {
            ExecOutcome o;
            o.spawn_failed = true;
            o.exit_status = -1;
            o.output = "msfconsole not found on PATH; Metasploit commands are unavailable on this host";
            return o;
        }
        return run_process({msfconsole_, "-q", "-x", cmd.raw + "; exit"}, cmd.timeout_seconds);
    }
    return run_process({"/bin/sh", "-c", cmd.raw}, cmd.timeout_seconds);
}

}  // namespace penheal::pentest
