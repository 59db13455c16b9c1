#pragma once

#include <utility>
#include <vector>

#include "bnh/model.hpp"

namespace bnh {

// Boolean variable indices backing each network variable, least significant
// bit first. Indices are contiguous from 1; cardinality-1 variables get none.
struct BitMapping {
    std::vector<std::vector<int>> bits;  // per variable id
    int n_bool = 0;
};

enum class ClauseFamily { cpt, variable, evidence };

struct Clause {
    std::vector<int> literals;  // signed DIMACS literals, ascending variable index
    ClauseFamily family = ClauseFamily::cpt;
};

struct CnfFormula {
    int n_bool = 0;
    std::vector<Clause> clauses;
};

enum class Hardness { easy, moderate, hard, intractable };

const char* to_string(Hardness h);

struct KTestResult {
    long long n = 0;   // Boolean variable count
    long long m = 0;   // k-test clause count
    int k = 0;         // maximum constraint width
    double r = 0.0;    // clause density m/n
    double ratio = 0.0;  // r / (2^k / k)
    Hardness hardness = Hardness::easy;
    // contribution breakdown
    long long evidence_constraints = 0;   // evidence variables counted in m
    long long variable_clauses = 0;       // clauses excluding out-of-range bit patterns
    long long zero_entries = 0;           // structural zeros across all CPTs
    long long evidence_unit_clauses = 0;  // unit clauses the CNF encoding emits
};

// ratio < 0.005: easy; < 0.1: moderate; <= 0.2: hard; else intractable.
Hardness classify(double ratio);

// Clause count m, width k and density r = m/n of the CNF encoding, computed
// directly from the network in one linear pass (no clauses materialized).
KTestResult k_test(const BayesianNetwork& net, const Evidence& evidence);

BitMapping make_bit_mapping(const BayesianNetwork& net);

// Full CNF over the log-encoded variables. Clause families, in emission
// order: cpt (one clause per zero entry, negating the entry's full bit
// assignment), variable (excluding bit patterns that decode to values >=
// cardinality), evidence (unit clauses pinning each observed variable's
// bits). Satisfying assignments decode to exactly the configurations with
// positive probability that agree with the evidence.
std::pair<CnfFormula, BitMapping> encode(const BayesianNetwork& net, const Evidence& evidence);

struct DecodeResult {
    bool valid = false;
    std::vector<int> config;    // full configuration when valid
    int invalid_variable = -1;  // first variable decoding out of range
};

// Reads each variable's bits (LSB first) from `assignment`, indexed by
// DIMACS variable (index 0 unused). Throws std::invalid_argument if the
// assignment does not cover the mapping.
DecodeResult decode(const std::vector<bool>& assignment, const BitMapping& mapping,
                    const BayesianNetwork& net);

}  // namespace bnh
