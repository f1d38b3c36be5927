#include "gtdp/oracle.hpp"

#include "gtdp/errors.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace gtdp {

namespace {

void check_budget(Count n, Count limit, const char* what)
{
    if (n > limit) {
        throw BudgetError(std::string(what) + " is limited to n <= " + std::to_string(limit) +
                          ", got " + std::to_string(n));
    }
}

// A situation in the size-based state graph. Kind::Pool is n binomial units
// (H for R1, E for R3). Kind::Set is a defective set of `a` units; for R1 it
// sits next to a pool of `b` units, for R3 it is isolated and b is 0.
struct Node {
    enum class Kind : std::uint8_t { Pool, Set };
    Kind kind;
    Count a;
    Count b;
};

struct Branch {
    double weight;
    Node node;
};

// Policy enumeration over one state-graph class. `Graph` supplies:
//   terminal(node), choices(node), expand(node, x) -> list of weighted
//   successors (weights need not sum to one: R3 adds independent parts).
template <class Graph>
class Enumerator {
public:
    Enumerator(const Graph& graph, Count n)
        : graph_(graph), n_(n), assignment_(slots(), 0), memo_(slots(), 0.0),
          fresh_(slots(), 0)
    {
    }

    OracleResult run()
    {
        best_ = std::numeric_limits<double>::infinity();
        policies_ = 0;
        dfs({Node{Node::Kind::Pool, n_, 0}});
        return {best_, policies_};
    }

private:
    std::size_t slots() const { return 2 * (n_ + 1) * (n_ + 1); }

    std::size_t slot(const Node& v) const
    {
        const std::size_t base = v.kind == Node::Kind::Pool ? 0 : (n_ + 1) * (n_ + 1);
        return base + v.a * (n_ + 1) + v.b;
    }

    void dfs(std::vector<Node> work)
    {
        while (!work.empty() &&
               (graph_.terminal(work.back()) || assignment_[slot(work.back())] != 0)) {
            work.pop_back();
        }
        if (work.empty()) {
            ++policies_;
            ++epoch_;
            const double value = evaluate(Node{Node::Kind::Pool, n_, 0});
            if (value < best_) best_ = value;
            return;
        }
        const Node v = work.back();
        work.pop_back();
        const Count options = graph_.choices(v);
        for (Count x = 1; x <= options; ++x) {
            assignment_[slot(v)] = x;
            std::vector<Node> next = work;
            for (const Branch& br : graph_.expand(v, x)) next.push_back(br.node);
            dfs(std::move(next));
        }
        assignment_[slot(v)] = 0;
    }

    double evaluate(const Node& v)
    {
        if (graph_.terminal(v)) return 0.0;
        const std::size_t s = slot(v);
        if (fresh_[s] == epoch_) return memo_[s];
        double value = 1.0;
        for (const Branch& br : graph_.expand(v, assignment_[s])) {
            value += br.weight * evaluate(br.node);
        }
        memo_[s] = value;
        fresh_[s] = epoch_;
        return value;
    }

    const Graph& graph_;
    Count n_;
    std::vector<Count> assignment_;
    std::vector<double> memo_;
    std::vector<std::uint64_t> fresh_;
    std::uint64_t epoch_ = 0;
    double best_ = 0.0;
    std::uint64_t policies_ = 0;
};

struct Probabilities {
    double q;
    double pow(Count k) const { return std::pow(q, static_cast<double>(k)); }
    // P(subtest of x from a defective set of m is negative) = (q^x - q^m)/(1 - q^m)
    double negative(Count m, Count x) const { return (pow(x) - pow(m)) / (1.0 - pow(m)); }
    double positive(Count m, Count x) const { return (1.0 - pow(x)) / (1.0 - pow(m)); }
};

// Nested graph: remainders of a defective set rejoin the pool.
struct NestedGraph {
    Probabilities prob;

    static Node normalise(Count m, Count pool)
    {
        // A single unit known to carry a defective is identified for free.
        if (m == 1) return Node{Node::Kind::Pool, pool, 0};
        return Node{Node::Kind::Set, m, pool};
    }

    bool terminal(const Node& v) const { return v.kind == Node::Kind::Pool && v.a == 0; }

    Count choices(const Node& v) const { return v.kind == Node::Kind::Pool ? v.a : v.a - 1; }

    std::vector<Branch> expand(const Node& v, Count x) const
    {
        if (v.kind == Node::Kind::Pool) {
            const double neg = prob.pow(x);
            return {{neg, Node{Node::Kind::Pool, v.a - x, 0}},
                    {1.0 - neg, normalise(x, v.a - x)}};
        }
        const Count m = v.a;
        return {{prob.negative(m, x), normalise(m - x, v.b)},
                {prob.positive(m, x), normalise(x, m - x + v.b)}};
    }
};

// Restricted graph: a pool test splits off an independent remainder pool,
// and a positive subtest sends the untested remainder to its own pool.
struct RestrictedGraph {
    Probabilities prob;

    bool terminal(const Node& v) const
    {
        return (v.kind == Node::Kind::Pool && v.a == 0) || (v.kind == Node::Kind::Set && v.a == 1);
    }

    Count choices(const Node& v) const { return v.kind == Node::Kind::Pool ? v.a : v.a - 1; }

    std::vector<Branch> expand(const Node& v, Count x) const
    {
        if (v.kind == Node::Kind::Pool) {
            return {{1.0, Node{Node::Kind::Pool, v.a - x, 0}},
                    {1.0 - prob.pow(x), Node{Node::Kind::Set, x, 0}}};
        }
        const Count m = v.a;
        const double pos = prob.positive(m, x);
        return {{prob.negative(m, x), Node{Node::Kind::Set, m - x, 0}},
                {pos, Node{Node::Kind::Set, x, 0}},
                {pos, Node{Node::Kind::Pool, m - x, 0}}};
    }
};

} // namespace

OracleResult exhaustive_min_r1(const Prevalence& prevalence, Count n)
{
    check_budget(n, kOracleMaxN, "nested policy enumeration");
    if (n == 0) return {0.0, 1};
    const NestedGraph graph{{prevalence.q()}};
    return Enumerator<NestedGraph>(graph, n).run();
}

OracleResult exhaustive_min_r3(const Prevalence& prevalence, Count n)
{
    check_budget(n, kOracleMaxN, "restricted policy enumeration");
    if (n == 0) return {0.0, 1};
    const RestrictedGraph graph{{prevalence.q()}};
    return Enumerator<RestrictedGraph>(graph, n).run();
}

namespace {

class LabeledSearch {
public:
    LabeledSearch(double q, Count n)
        : n_(n), full_((1u << n) - 1), weight_(std::size_t{1} << n),
          memo_(std::size_t{1} << (2 * n), std::numeric_limits<double>::quiet_NaN())
    {
        for (unsigned t = 0; t <= full_; ++t) {
            const int bad = std::popcount(t);
            weight_[t] = std::pow(1.0 - q, bad) * std::pow(q, static_cast<int>(n) - bad);
        }
    }

    double solve() { return value(full_, 0); }

private:
    // Probability that `test` is positive given that `known` (if non-empty)
    // contains a defective; truth vectors are bitmasks of defective units.
    double positive_probability(unsigned known, unsigned test) const
    {
        double total = 0.0;
        double positive = 0.0;
        for (unsigned t = 0; t <= full_; ++t) {
            if (known != 0 && (t & known) == 0) continue;
            total += weight_[t];
            if ((t & test) != 0) positive += weight_[t];
        }
        return positive / total;
    }

    double value(unsigned pool, unsigned known)
    {
        if (std::popcount(known) == 1) known = 0;
        if (pool == 0 && known == 0) return 0.0;
        double& slot = memo_[(static_cast<std::size_t>(pool) << n_) | known];
        if (!std::isnan(slot)) return slot;

        double best = std::numeric_limits<double>::infinity();
        if (known != 0) {
            // Proper, non-empty subsets of the defective set.
            for (unsigned test = (known - 1) & known; test != 0; test = (test - 1) & known) {
                const double pos = positive_probability(known, test);
                const unsigned rest = known & ~test;
                const double v = 1.0 + (1.0 - pos) * value(pool, rest) + pos * value(pool | rest, test);
                if (v < best) best = v;
            }
        } else {
            for (unsigned test = pool; test != 0; test = (test - 1) & pool) {
                const double pos = positive_probability(0, test);
                const unsigned rest = pool & ~test;
                const double v = 1.0 + (1.0 - pos) * value(rest, 0) + pos * value(rest, test);
                if (v < best) best = v;
            }
        }
        slot = best;
        return best;
    }

    Count n_;
    unsigned full_;
    std::vector<double> weight_;
    std::vector<double> memo_;
};

} // namespace

double labeled_min_nested(const Prevalence& prevalence, Count n)
{
    check_budget(n, kLabeledMaxN, "labeled nested search");
    if (n == 0) return 0.0;
    return LabeledSearch(prevalence.q(), n).solve();
}

} // namespace gtdp
