#pragma once

#include "gtdp/simulator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gtdp {

struct SessionResult {
    ExecutionState state;
    /// Every test recommended and answered, in order.
    std::vector<ProbeStep> steps;
    bool completed = false;
    bool quit = false;
    /// Lines that were rejected and re-prompted.
    Count rejected_inputs = 0;
};

/// Interactive pooling session over a line protocol.
///
/// Each round prints the recommended group and reads one line: `+` (the
/// pool tested positive), `-` (negative), `state` (dump the execution
/// state) or `quit`. Anything else is rejected without changing state. The
/// same loop serves a terminal and a scripted transcript file; with
/// `echo_input` each line read is written back after the prompt, which keeps
/// scripted transcripts readable.
SessionResult run_session(const Policy& policy, Count n, std::istream& in, std::ostream& out,
                          bool echo_input = false);

/// Multi-line description of an execution state, as printed by `state`.
std::string describe_state(const ExecutionState& state);

} // namespace gtdp
