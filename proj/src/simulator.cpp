#include "gtdp/simulator.hpp"

#include "gtdp/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <string>
#include <thread>

namespace gtdp {

// ---------------------------------------------------------------- LabelSet

LabelSet LabelSet::range(Label first, Label last)
{
    LabelSet set;
    if (last > first) {
        set.runs_.emplace_back(first, last);
        set.size_ = last - first;
    }
    return set;
}

LabelSet LabelSet::of(std::span<const Label> labels)
{
    std::vector<Label> sorted(labels.begin(), labels.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    LabelSet set;
    for (Label l : sorted) {
        if (!set.runs_.empty() && set.runs_.back().second == l) {
            ++set.runs_.back().second;
        } else {
            set.runs_.emplace_back(l, l + 1);
        }
    }
    set.size_ = sorted.size();
    return set;
}

bool LabelSet::contains(Label label) const noexcept
{
    auto it = std::upper_bound(runs_.begin(), runs_.end(), label,
                               [](Label l, const auto& run) { return l < run.first; });
    if (it == runs_.begin()) return false;
    --it;
    return label < it->second;
}

bool LabelSet::intersects(std::span<const Label> sorted_labels) const noexcept
{
    for (const auto& [lo, hi] : runs_) {
        auto it = std::lower_bound(sorted_labels.begin(), sorted_labels.end(), lo);
        if (it != sorted_labels.end() && *it < hi) return true;
    }
    return false;
}

LabelSet LabelSet::front(Count k) const
{
    LabelSet out;
    for (const auto& [lo, hi] : runs_) {
        if (out.size_ == k) break;
        const Count take = std::min<Count>(hi - lo, k - out.size_);
        out.runs_.emplace_back(lo, lo + static_cast<Label>(take));
        out.size_ += take;
    }
    return out;
}

LabelSet LabelSet::take_front(Count k)
{
    LabelSet out = front(k);
    Count left = k;
    std::size_t drop = 0;
    while (left > 0 && drop < runs_.size()) {
        auto& run = runs_[drop];
        const Count len = run.second - run.first;
        if (len <= left) {
            left -= len;
            ++drop;
        } else {
            run.first += static_cast<Label>(left);
            left = 0;
        }
    }
    runs_.erase(runs_.begin(), runs_.begin() + static_cast<std::ptrdiff_t>(drop));
    size_ -= out.size_;
    return out;
}

void LabelSet::insert(const LabelSet& other)
{
    if (other.empty()) return;
    std::vector<std::pair<Label, Label>> merged;
    merged.reserve(runs_.size() + other.runs_.size());
    std::merge(runs_.begin(), runs_.end(), other.runs_.begin(), other.runs_.end(),
               std::back_inserter(merged));
    runs_.clear();
    size_ = 0;
    for (const auto& run : merged) {
        if (!runs_.empty() && run.first <= runs_.back().second) {
            runs_.back().second = std::max(runs_.back().second, run.second);
        } else {
            runs_.push_back(run);
        }
    }
    for (const auto& [lo, hi] : runs_) size_ += hi - lo;
}

std::vector<Label> LabelSet::to_vector() const
{
    std::vector<Label> out;
    out.reserve(size_);
    for (const auto& [lo, hi] : runs_) {
        for (Label l = lo; l < hi; ++l) out.push_back(l);
    }
    return out;
}

std::string format_labels(const LabelSet& labels)
{
    if (labels.empty()) return "{}";
    std::string out;
    for (const auto& [lo, hi] : labels.intervals()) {
        if (!out.empty()) out += ',';
        out += 'u' + std::to_string(lo + 1);
        if (hi - lo > 1) out += "-u" + std::to_string(hi);
    }
    return out;
}

// ------------------------------------------------------------------ Policy

Count Policy::binomial_choice(Count pool) const
{
    return r1_ ? r1_->choice_binomial(pool) : r3_->choice_binomial(pool);
}

Count Policy::defective_choice(Count m, Count pool) const
{
    return r1_ ? r1_->choice_defective(m, pool) : r3_->choice_defective(m);
}

// --------------------------------------------------------------- executor

ExecutionState start_state(Count n)
{
    ExecutionState state;
    state.pool = LabelSet::range(0, static_cast<Label>(n));
    return state;
}

bool is_complete(const ExecutionState& state) noexcept
{
    return state.pool.empty() && state.defective_set.empty() && state.pending.empty();
}

bool partition_holds(const ExecutionState& state, Count n)
{
    std::vector<std::pair<Label, Label>> runs;
    auto add = [&runs](const LabelSet& s) {
        runs.insert(runs.end(), s.intervals().begin(), s.intervals().end());
    };
    add(state.pool);
    add(state.defective_set);
    for (const auto& p : state.pending) add(p);
    add(state.classified_good);
    add(state.classified_defective);
    std::sort(runs.begin(), runs.end());
    Label expect = 0;
    for (const auto& [lo, hi] : runs) {
        if (lo != expect) return false;
        expect = hi;
    }
    return expect == n;
}

std::optional<LabelSet> next_group(ExecutionState& state, const Policy& policy)
{
    if (state.outstanding) return state.outstanding;
    for (;;) {
        const Count m = state.defective_set.size();
        if (m == 1) {
            state.classified_defective.insert(state.defective_set);
            state.defective_set = LabelSet{};
            continue;
        }
        if (m >= 2) {
            const Count x = policy.defective_choice(m, state.pool.size());
            if (x == 0 || x >= m) {
                throw ContractError("policy chose a subtest of " + std::to_string(x) +
                                    " from a defective set of " + std::to_string(m));
            }
            state.outstanding = state.defective_set.front(x);
            state.outstanding_from_defective = true;
            return state.outstanding;
        }
        if (!state.pool.empty()) {
            const Count x = policy.binomial_choice(state.pool.size());
            state.outstanding = state.pool.front(x);
            state.outstanding_from_defective = false;
            return state.outstanding;
        }
        if (!state.pending.empty()) {
            state.pool = std::move(state.pending.back());
            state.pending.pop_back();
            continue;
        }
        return std::nullopt;
    }
}

void apply_outcome(ExecutionState& state, const LabelSet& group, bool positive,
                   Procedure procedure)
{
    if (!state.outstanding) throw ProtocolError("no test is outstanding");
    if (!(group == *state.outstanding)) {
        throw ProtocolError("outcome reported for " + format_labels(group) +
                            " but the outstanding test is " + format_labels(*state.outstanding));
    }
    LabelSet& source = state.outstanding_from_defective ? state.defective_set : state.pool;
    LabelSet taken = source.take_front(group.size());
    if (!positive) {
        state.classified_good.insert(taken);
    } else if (state.outstanding_from_defective) {
        LabelSet rest = std::move(state.defective_set);
        state.defective_set = std::move(taken);
        if (procedure == Procedure::R1) {
            state.pool.insert(rest);
        } else {
            state.pending.push_back(std::move(rest));
        }
    } else {
        state.defective_set = std::move(taken);
    }
    state.outstanding.reset();
    ++state.tests_used;
}

// -------------------------------------------------------------- simulation

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct TrialOutcome {
    Count tests;
    bool correct;
};

TrialOutcome run_trial(const Policy& policy, Count n, std::span<const Label> defectives)
{
    ExecutionState state = start_state(n);
    const Procedure procedure = policy.procedure();
    while (auto group = next_group(state, policy)) {
        const bool positive = group->intersects(defectives);
        apply_outcome(state, *group, positive, procedure);
        assert(partition_holds(state, n));
    }
    const bool correct = state.classified_defective == LabelSet::of(defectives) &&
                         state.classified_good.size() + defectives.size() == n;
    return {state.tests_used, correct};
}

void check_population(const Policy& policy, Count n)
{
    if (n > policy.n_top()) {
        throw RangeError("population " + std::to_string(n) + " exceeds table size " +
                         std::to_string(policy.n_top()));
    }
}

} // namespace

ProbeResult run_probe(const Policy& policy, const std::vector<bool>& defective)
{
    const Count n = defective.size();
    check_population(policy, n);
    std::vector<Label> truth;
    for (Count i = 0; i < n; ++i) {
        if (defective[i]) truth.push_back(static_cast<Label>(i));
    }
    ProbeResult result;
    ExecutionState state = start_state(n);
    while (auto group = next_group(state, policy)) {
        const bool positive = group->intersects(truth);
        result.steps.push_back({*group, positive});
        apply_outcome(state, *group, positive, policy.procedure());
    }
    result.classification_correct = state.classified_defective == LabelSet::of(truth) &&
                                    partition_holds(state, n);
    result.final_state = std::move(state);
    return result;
}

std::vector<Label> draw_defectives(const Prevalence& prevalence, Count n, std::uint64_t seed,
                                   std::uint64_t trial)
{
    std::mt19937_64 engine(splitmix64(seed ^ splitmix64(trial)));
    // Gaps between defectives are geometric, which is the same law as n
    // independent Bernoulli draws but costs one draw per defective.
    std::geometric_distribution<std::uint64_t> gap(prevalence.p());
    std::vector<Label> out;
    std::uint64_t pos = gap(engine);
    while (pos < n) {
        out.push_back(static_cast<Label>(pos));
        pos += 1 + gap(engine);
    }
    return out;
}

SimEstimate simulate(const Policy& policy, Count n, Count trials, std::uint64_t seed,
                     unsigned threads)
{
    if (trials == 0) throw DomainError("simulate needs at least one trial");
    check_population(policy, n);
    threads = std::max(1u, threads);

    std::vector<std::uint32_t> tests(trials);
    std::vector<std::uint8_t> correct(trials);
    auto work = [&](Count begin, Count end) {
        for (Count t = begin; t < end; ++t) {
            const auto truth = draw_defectives(policy.prevalence(), n, seed, t);
            const TrialOutcome outcome = run_trial(policy, n, truth);
            tests[t] = static_cast<std::uint32_t>(outcome.tests);
            correct[t] = outcome.correct ? 1 : 0;
        }
    };
    if (threads == 1) {
        work(0, trials);
    } else {
        std::vector<std::jthread> pool;
        const Count chunk = (trials + threads - 1) / threads;
        for (Count begin = 0; begin < trials; begin += chunk) {
            pool.emplace_back(work, begin, std::min(trials, begin + chunk));
        }
    }

    // Integer sums make the reduction independent of how trials were split.
    unsigned __int128 sum = 0;
    unsigned __int128 sum_sq = 0;
    SimEstimate est;
    est.trials = trials;
    est.seed = seed;
    for (Count t = 0; t < trials; ++t) {
        sum += tests[t];
        sum_sq += static_cast<unsigned __int128>(tests[t]) * tests[t];
        if (!correct[t]) ++est.misclassified;
    }
    const long double count = static_cast<long double>(trials);
    const long double mean = static_cast<long double>(sum) / count;
    est.mean = static_cast<double>(mean);
    if (trials > 1) {
        // N * sum(x^2) - (sum x)^2 is exact in 128-bit integers.
        const unsigned __int128 scaled = static_cast<unsigned __int128>(trials) * sum_sq - sum * sum;
        const long double variance = static_cast<long double>(scaled) / (count * (count - 1));
        est.std_error = static_cast<double>(std::sqrt(variance / count));
    }
    return est;
}

} // namespace gtdp
