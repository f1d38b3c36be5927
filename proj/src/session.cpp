#include "gtdp/session.hpp"

#include "gtdp/errors.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace gtdp {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string tests_phrase(Count tests)
{
    return std::to_string(tests) + (tests == 1 ? " test" : " tests");
}

void print_progress(std::ostream& out, const ExecutionState& state)
{
    out << "  classified: " << state.classified_good.size() << " good, "
        << state.classified_defective.size() << " defective; tests so far: " << state.tests_used
        << '\n';
}

} // namespace

std::string describe_state(const ExecutionState& state)
{
    std::ostringstream s;
    s << "  pool:          " << format_labels(state.pool) << " (" << state.pool.size() << ")\n";
    s << "  defective set: " << format_labels(state.defective_set) << " ("
      << state.defective_set.size() << ")\n";
    s << "  pending:       ";
    if (state.pending.empty()) s << "none";
    for (std::size_t i = 0; i < state.pending.size(); ++i) {
        s << (i ? " | " : "") << format_labels(state.pending[i]);
    }
    s << '\n';
    s << "  good:          " << format_labels(state.classified_good) << " ("
      << state.classified_good.size() << ")\n";
    s << "  defective:     " << format_labels(state.classified_defective) << " ("
      << state.classified_defective.size() << ")\n";
    s << "  tests used:    " << state.tests_used << '\n';
    return s.str();
}

SessionResult run_session(const Policy& policy, Count n, std::istream& in, std::ostream& out,
                          bool echo_input)
{
    if (n > policy.n_top()) {
        throw RangeError("session population " + std::to_string(n) + " exceeds table size " +
                         std::to_string(policy.n_top()));
    }
    SessionResult result;
    result.state = start_state(n);
    ExecutionState& state = result.state;

    out << "session: procedure " << to_string(policy.procedure()) << ", q=" << std::setprecision(10)
        << policy.prevalence().q() << ", n=" << n << ", expected " << std::fixed
        << std::setprecision(5) << policy.expected_tests(n) << " tests\n";
    out.unsetf(std::ios::floatfield);
    out << "answer + (positive), - (negative), state, or quit\n";

    for (;;) {
        const Count known_bad = state.classified_defective.size();
        const auto group = next_group(state, policy);
        if (state.classified_defective.size() > known_bad) {
            out << "  identified defective without a test; defective so far: "
                << format_labels(state.classified_defective) << '\n';
        }
        if (!group) {
            result.completed = true;
            out << "complete after " << tests_phrase(state.tests_used) << "; defective: "
                << (state.classified_defective.empty() ? std::string("none")
                                                       : format_labels(state.classified_defective))
                << '\n';
            return result;
        }

        out << "test " << state.tests_used + 1 << ": " << format_labels(*group) << " ("
            << group->size() << (group->size() == 1 ? " unit" : " units") << ")\n";

        for (;;) {
            out << "> " << std::flush;
            std::string line;
            if (!std::getline(in, line)) {
                out << "\ninput ended before the session completed\n";
                return result;
            }
            const std::string token = trim(line);
            if (echo_input) out << token << '\n';
            if (token == "+" || token == "-") {
                const bool positive = token == "+";
                apply_outcome(state, *group, positive, policy.procedure());
                result.steps.push_back({*group, positive});
                if (positive) {
                    out << "  positive: " << format_labels(*group) << " holds a defective\n";
                } else {
                    out << "  negative: " << format_labels(*group) << " good\n";
                }
                print_progress(out, state);
                break;
            }
            if (token == "state") {
                out << describe_state(state);
                continue;
            }
            if (token == "quit") {
                result.quit = true;
                out << "quit after " << tests_phrase(state.tests_used) << '\n';
                return result;
            }
            ++result.rejected_inputs;
            out << "  unrecognised input '" << token << "'; expected +, -, state or quit\n";
        }
    }
}

} // namespace gtdp
