#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "penheal/pentest/commands.hpp"
#include "penheal/sim/sim.hpp"

namespace penheal::pentest {

inline constexpr std::size_t kMaxOutputBytes = 64 * 1024;
inline constexpr std::string_view kOutputTruncatedMarker = "\n[output truncated at 64 KiB]";

struct ExecOutcome {
    std::string output;
    int exit_status = 0;
    bool timed_out = false;
    bool spawn_failed = false;
};

/// Caps output at kMaxOutputBytes including the marker.
std::string cap_output(std::string output);

class ExecutorBackend {
public:
    virtual ~ExecutorBackend() = default;
    virtual ExecOutcome execute(const Command& cmd) = 0;
    virtual std::string name() const = 0;
};

/// Runs commands through the in-process simulator, carrying its state
/// between calls.
class SimBackend : public ExecutorBackend {
public:
    explicit SimBackend(sim::Simulator simulator);
    ExecOutcome execute(const Command& cmd) override;
    std::string name() const override { return "target-sim"; }

    const sim::SimState& state() const { return state_; }
    const sim::Simulator& simulator() const { return sim_; }

private:
    sim::Simulator sim_;
    sim::SimState state_;
    std::mutex mutex_;
};

/// Real subprocess harness: /bin/sh -c with merged stdout/stderr and a
/// kill-on-timeout watchdog. Msfconsole batches go to
/// `msfconsole -q -x "<batch>; exit"` when that binary is on PATH.
class ShellBackend : public ExecutorBackend {
public:
    explicit ShellBackend(std::string msfconsole_path = "msfconsole");
    ExecOutcome execute(const Command& cmd) override;
    std::string name() const override { return "shell"; }

    /// Runs `argv` directly; used by execute() and by tests.
    static ExecOutcome run_process(const std::vector<std::string>& argv, int timeout_seconds);

private:
    std::string msfconsole_;
};

}  // namespace penheal::pentest
