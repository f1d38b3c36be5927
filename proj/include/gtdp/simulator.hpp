#pragma once

#include "gtdp/engine_r1.hpp"
#include "gtdp/engine_r3.hpp"
#include "gtdp/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gtdp {

using Label = std::uint32_t;

/// Ordered set of unit labels stored as sorted, disjoint, non-adjacent
/// half-open intervals. Groups of thousands of consecutive units stay O(1).
class LabelSet {
public:
    LabelSet() = default;
    LabelSet(const LabelSet&) = default;
    LabelSet& operator=(const LabelSet&) = default;
    LabelSet(LabelSet&& other) noexcept
        : runs_(std::move(other.runs_)), size_(std::exchange(other.size_, 0))
    {
        other.runs_.clear();
    }
    LabelSet& operator=(LabelSet&& other) noexcept
    {
        if (this == &other) return *this;
        runs_ = std::move(other.runs_);
        other.runs_.clear();
        size_ = std::exchange(other.size_, 0);
        return *this;
    }
    /// All labels in [first, last).
    static LabelSet range(Label first, Label last);
    static LabelSet of(std::span<const Label> labels);

    Count size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }
    bool contains(Label label) const noexcept;
    /// True if any of the sorted labels lies in this set.
    bool intersects(std::span<const Label> sorted_labels) const noexcept;

    /// The first k labels in ascending order.
    LabelSet front(Count k) const;
    /// Removes and returns the first k labels.
    LabelSet take_front(Count k);
    void insert(const LabelSet& other);
    void insert(Label label) { insert(range(label, label + 1)); }

    std::vector<Label> to_vector() const;
    const std::vector<std::pair<Label, Label>>& intervals() const noexcept { return runs_; }

    friend bool operator==(const LabelSet&, const LabelSet&) = default;

private:
    std::vector<std::pair<Label, Label>> runs_;
    Count size_ = 0;
};

/// Human form with 1-based unit names, e.g. "u1-u5,u9"; "{}" when empty.
std::string format_labels(const LabelSet& labels);

/// Next-group function induced by an engine's choice tables. Holds a
/// reference: the table must outlive the policy.
class Policy {
public:
    explicit Policy(const R1Table& table) : r1_(&table) {}
    explicit Policy(const R3Table& table) : r3_(&table) {}

    Procedure procedure() const noexcept { return r1_ ? Procedure::R1 : Procedure::R3; }
    Count n_top() const noexcept { return r1_ ? r1_->n_top() : r3_->n_top(); }
    const Prevalence& prevalence() const noexcept
    {
        return r1_ ? r1_->prevalence() : r3_->prevalence();
    }
    double expected_tests(Count n) const { return r1_ ? r1_->binomial(n) : r3_->expected(n); }

    Count binomial_choice(Count pool) const;
    /// R3 ignores the pool size: the defective set is resolved in isolation.
    Count defective_choice(Count m, Count pool) const;

private:
    const R1Table* r1_ = nullptr;
    const R3Table* r3_ = nullptr;
};

/// Everything known while a policy runs on a labeled population. Every
/// label is in exactly one of pool, defective_set, a pending pool,
/// classified_good or classified_defective.
struct ExecutionState {
    LabelSet pool;
    LabelSet defective_set;
    /// Isolated remainders waiting their turn (restricted procedure only), LIFO.
    std::vector<LabelSet> pending;
    LabelSet classified_good;
    LabelSet classified_defective;
    Count tests_used = 0;

    /// Group emitted by next_group and not yet answered.
    std::optional<LabelSet> outstanding;
    bool outstanding_from_defective = false;
};

ExecutionState start_state(Count n);

bool is_complete(const ExecutionState& state) noexcept;

/// Checks the label partition over [0, n).
bool partition_holds(const ExecutionState& state, Count n);

/// Units to test next, or nullopt once every unit is classified. A defective
/// set of one unit is classified without a test; an empty pool pulls the
/// most recent pending remainder. Asking again before an outcome is applied
/// returns the same group.
std::optional<LabelSet> next_group(ExecutionState& state, const Policy& policy);

/// Records the outcome of the outstanding group. Throws ProtocolError if
/// `group` is not the group next_group emitted.
void apply_outcome(ExecutionState& state, const LabelSet& group, bool positive,
                   Procedure procedure);

struct ProbeStep {
    LabelSet group;
    bool positive = false;
};

struct ProbeResult {
    std::vector<ProbeStep> steps;
    ExecutionState final_state;
    bool classification_correct = false;
};

/// Runs the policy to completion on a fixed truth vector (true = defective).
ProbeResult run_probe(const Policy& policy, const std::vector<bool>& defective);

struct SimEstimate {
    double mean = 0.0;
    /// Sample standard deviation over sqrt(trials); 0 for a single trial.
    double std_error = 0.0;
    Count trials = 0;
    std::uint64_t seed = 0;
    /// Trials whose final classification differed from the drawn truth.
    Count misclassified = 0;
};

/// Truth for one trial: sorted labels of the defective units. Each unit is
/// defective with probability 1 - q, from a stream keyed by (seed, trial) so
/// a trial's population does not depend on scheduling.
std::vector<Label> draw_defectives(const Prevalence& prevalence, Count n, std::uint64_t seed,
                                   std::uint64_t trial);

/// Monte Carlo estimate of the policy's test count on n units. The result
/// is bitwise identical for any thread count.
SimEstimate simulate(const Policy& policy, Count n, Count trials, std::uint64_t seed,
                     unsigned threads = 1);

} // namespace gtdp
