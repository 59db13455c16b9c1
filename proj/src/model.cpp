#include "bnh/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <sstream>

#include "bnh/errors.hpp"

namespace bnh {

namespace {

constexpr double kRowSumTolerance = 1e-4;
constexpr double kEntryUpperSlack = 1e-9;

struct TopoOutcome {
    std::vector<int> order;
    std::vector<char> done;
    bool complete = false;
};

// Kahn's algorithm with a min-heap, so ties break by ascending id.
TopoOutcome kahn(const BayesianNetwork& net) {
    const int n = net.num_variables();
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> children(n);
    for (const Cpt& cpt : net.cpts) {
        for (int p : cpt.parents) {
            children[p].push_back(cpt.child);
            ++indegree[cpt.child];
        }
    }
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.push(v);

    TopoOutcome out;
    out.order.reserve(n);
    out.done.assign(n, 0);
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        out.order.push_back(v);
        out.done[v] = 1;
        for (int c : children[v])
            if (--indegree[c] == 0) ready.push(c);
    }
    out.complete = static_cast<int>(out.order.size()) == n;
    return out;
}

// Walks parents within the unfinished set until a node repeats; the arc that
// closes the walk lies on a cycle.
std::pair<int, int> find_cycle_arc(const BayesianNetwork& net, const std::vector<char>& done) {
    const int n = net.num_variables();
    int start = -1;
    for (int v = 0; v < n; ++v)
        if (!done[v]) { start = v; break; }

    std::vector<char> on_path(n, 0);
    int current = start;
    on_path[current] = 1;
    for (;;) {
        int parent = -1;
        for (int p : net.cpts[current].parents)
            if (!done[p]) { parent = p; break; }
        if (on_path[parent]) return {parent, current};
        on_path[parent] = 1;
        current = parent;
    }
}

bool structure_ok(const BayesianNetwork& net) {
    const int n = net.num_variables();
    if (static_cast<int>(net.cpts.size()) != n) return false;
    for (int i = 0; i < n; ++i) {
        if (net.cpts[i].child != i) return false;
        for (int p : net.cpts[i].parents)
            if (p < 0 || p >= n) return false;
    }
    return true;
}

}  // namespace

int bit_width(int cardinality) {
    if (cardinality < 1)
        throw std::invalid_argument("invalid cardinality " + std::to_string(cardinality));
    return std::bit_width(static_cast<unsigned>(cardinality - 1));
}

std::vector<int> topological_order(const BayesianNetwork& net) {
    TopoOutcome t = kahn(net);
    if (!t.complete) {
        auto [from, to] = find_cycle_arc(net, t.done);
        throw ValidationError("cycle detected through arc " + std::to_string(from) + " -> " +
                              std::to_string(to));
    }
    return t.order;
}

double joint_probability(const BayesianNetwork& net, std::span<const int> config) {
    const int n = net.num_variables();
    if (static_cast<int>(config.size()) != n)
        throw std::invalid_argument("configuration assigns " + std::to_string(config.size()) +
                                    " variables, network has " + std::to_string(n));
    for (int v = 0; v < n; ++v)
        if (config[v] < 0 || config[v] >= net.cardinality(v))
            throw std::invalid_argument("state " + std::to_string(config[v]) +
                                        " out of range for variable " + std::to_string(v));
    double p = 1.0;
    for (const Cpt& cpt : net.cpts) {
        const double factor = net.cpt_entry(cpt, config);
        if (factor == 0.0) return 0.0;
        p *= factor;
    }
    return p;
}

std::vector<Violation> validate(const BayesianNetwork& net) {
    std::vector<Violation> out;
    const int n = net.num_variables();

    for (int i = 0; i < n; ++i) {
        if (net.variables[i].id != i)
            out.push_back({"variable at index " + std::to_string(i) + " carries id " +
                               std::to_string(net.variables[i].id),
                           i, -1});
        if (net.variables[i].cardinality < 1)
            out.push_back({"variable " + std::to_string(i) + " has cardinality " +
                               std::to_string(net.variables[i].cardinality),
                           i, -1});
    }
    if (static_cast<int>(net.cpts.size()) != n) {
        out.push_back({"network has " + std::to_string(net.cpts.size()) + " CPTs for " +
                           std::to_string(n) + " variables",
                       -1, -1});
        return out;
    }

    bool shape_ok = true;
    for (int i = 0; i < n; ++i) {
        const Cpt& cpt = net.cpts[i];
        if (cpt.child != i) {
            out.push_back({"CPT at index " + std::to_string(i) + " is for child " +
                               std::to_string(cpt.child),
                           i, -1});
            shape_ok = false;
            continue;
        }
        bool dangling = false;
        for (int p : cpt.parents)
            if (p < 0 || p >= n) {
                out.push_back({"CPT of variable " + std::to_string(i) +
                                   " references unknown parent " + std::to_string(p),
                               i, -1});
                dangling = true;
            }
        if (dangling || net.variables[i].cardinality < 1) {
            shape_ok = false;
            continue;
        }

        const std::size_t card = static_cast<std::size_t>(net.cardinality(i));
        std::size_t rows = 1;
        bool parents_ok = true;
        for (int p : cpt.parents) {
            if (net.variables[p].cardinality < 1) { parents_ok = false; break; }
            rows *= static_cast<std::size_t>(net.cardinality(p));
        }
        if (!parents_ok) { shape_ok = false; continue; }
        if (cpt.table.size() != rows * card) {
            out.push_back({"CPT of variable " + std::to_string(i) + " has " +
                               std::to_string(cpt.table.size()) + " entries, expected " +
                               std::to_string(rows * card),
                           i, -1});
            shape_ok = false;
            continue;
        }
        for (std::size_t row = 0; row < rows; ++row) {
            double sum = 0.0;
            for (std::size_t s = 0; s < card; ++s) {
                const double p = cpt.table[row * card + s];
                if (p < 0.0 || p > 1.0 + kEntryUpperSlack)
                    out.push_back({"CPT of variable " + std::to_string(i) + " row " +
                                       std::to_string(row) + " holds out-of-range entry " +
                                       std::to_string(p),
                                   i, static_cast<long long>(row)});
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance)
                out.push_back({"CPT of variable " + std::to_string(i) + " row " +
                                   std::to_string(row) + " sums to " + std::to_string(sum),
                               i, static_cast<long long>(row)});
        }
    }

    if (shape_ok && structure_ok(net)) {
        TopoOutcome t = kahn(net);
        if (!t.complete) {
            auto [from, to] = find_cycle_arc(net, t.done);
            out.push_back({"cycle detected through arc " + std::to_string(from) + " -> " +
                               std::to_string(to),
                           to, -1});
        }
    }
    return out;
}

void require_valid(const BayesianNetwork& net) {
    const std::vector<Violation> violations = validate(net);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "network fails validation with " << violations.size() << " violation"
        << (violations.size() == 1 ? "" : "s") << ":";
    const std::size_t shown = std::min<std::size_t>(violations.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) msg << "\n  - " << violations[i].message;
    if (shown < violations.size()) msg << "\n  - ...";
    throw ValidationError(msg.str());
}

void validate_evidence(const BayesianNetwork& net, const Evidence& evidence) {
    for (const auto& [var, state] : evidence) {
        if (var < 0 || var >= net.num_variables())
            throw ValidationError("evidence references unknown variable " + std::to_string(var));
        if (state < 0 || state >= net.cardinality(var))
            throw ValidationError("evidence state " + std::to_string(state) +
                                  " out of range for variable " + std::to_string(var) +
                                  " (cardinality " + std::to_string(net.cardinality(var)) + ")");
    }
}

BayesianNetwork reclassify_zeros(BayesianNetwork net, double epsilon) {
    if (epsilon <= 0.0) return net;
    for (Cpt& cpt : net.cpts)
        for (double& p : cpt.table)
            if (std::abs(p) <= epsilon) p = 0.0;
    return net;
}

}  // namespace bnh
