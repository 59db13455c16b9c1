#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bnh {

// Discrete random variable with states 0 .. cardinality-1.
struct Variable {
    int id = 0;
    int cardinality = 1;
    std::string name;  // optional label
};

// Conditional probability table of one child variable. The table is flat:
// one row per parent configuration (parents in declared order, the last
// parent varying fastest), child state varying fastest within a row.
struct Cpt {
    int child = 0;
    std::vector<int> parents;
    std::vector<double> table;
};

// Observed assignment: variable id -> state.
using Evidence = std::map<int, int>;

struct Violation {
    std::string message;
    int variable = -1;   // variable or CPT child concerned, -1 if global
    long long row = -1;  // CPT row when applicable
};

struct BayesianNetwork {
    std::vector<Variable> variables;
    std::vector<Cpt> cpts;  // one per variable, cpts[i].child == i

    int num_variables() const { return static_cast<int>(variables.size()); }
    int cardinality(int var) const { return variables[var].cardinality; }

    // Row index of the parent configuration of `cpt` under `config`.
    std::size_t cpt_row(const Cpt& cpt, std::span<const int> config) const {
        std::size_t row = 0;
        for (int p : cpt.parents)
            row = row * static_cast<std::size_t>(variables[p].cardinality) +
                  static_cast<std::size_t>(config[p]);
        return row;
    }

    double cpt_entry(const Cpt& cpt, std::span<const int> config) const {
        const std::size_t card = static_cast<std::size_t>(variables[cpt.child].cardinality);
        return cpt.table[cpt_row(cpt, config) * card + static_cast<std::size_t>(config[cpt.child])];
    }
};

// ceil(log2(cardinality)): Boolean variables needed to address the states.
// Cardinality 1 needs none. Throws std::invalid_argument on cardinality < 1.
int bit_width(int cardinality);

// Deterministic topological order (ties broken by ascending variable id).
// Throws ValidationError identifying one arc on a cycle if none exists.
std::vector<int> topological_order(const BayesianNetwork& net);

// Product of CPT entries for a full configuration; exactly 0 as soon as any
// factor is 0. Throws std::invalid_argument on out-of-range states.
double joint_probability(const BayesianNetwork& net, std::span<const int> config);

// All invariant violations, empty iff the network is well formed.
std::vector<Violation> validate(const BayesianNetwork& net);

// Throws ValidationError summarizing the violations, if any.
void require_valid(const BayesianNetwork& net);

// Throws ValidationError if any observed variable or state is out of range.
void validate_evidence(const BayesianNetwork& net, const Evidence& evidence);

// Copy with every entry of magnitude <= epsilon replaced by exactly 0.0.
// No-op for epsilon <= 0.
BayesianNetwork reclassify_zeros(BayesianNetwork net, double epsilon);

}  // namespace bnh
