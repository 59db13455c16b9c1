#include "bnh/ktest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "bnh/errors.hpp"

namespace bnh {

namespace {

long long total_bits(const BayesianNetwork& net) {
    long long n = 0;
    for (const Variable& v : net.variables) n += bit_width(v.cardinality);
    return n;
}

void require_nondegenerate(long long n_bool) {
    if (n_bool == 0)
        throw ValidationError("degenerate network: every variable has cardinality 1");
}

int sign_for(bool bit_set) { return bit_set ? 1 : -1; }

}  // namespace

const char* to_string(Hardness h) {
    switch (h) {
        case Hardness::easy: return "easy";
        case Hardness::moderate: return "moderate";
        case Hardness::hard: return "hard";
        case Hardness::intractable: return "intractable";
    }
    return "?";
}

Hardness classify(double ratio) {
    if (!(ratio >= 0.0))
        throw std::invalid_argument("k-test ratio must be nonnegative");
    if (ratio < 0.005) return Hardness::easy;
    if (ratio < 0.1) return Hardness::moderate;
    if (ratio <= 0.2) return Hardness::hard;
    return Hardness::intractable;
}

KTestResult k_test(const BayesianNetwork& net, const Evidence& evidence) {
    validate_evidence(net, evidence);

    KTestResult res;
    res.n = total_bits(net);
    require_nondegenerate(res.n);

    // Each observed variable counts as one constraint of width equal to its
    // bit count; cardinality-1 variables constrain nothing.
    for (const auto& [var, state] : evidence) {
        (void)state;
        const int w = bit_width(net.cardinality(var));
        if (w == 0) continue;
        ++res.evidence_constraints;
        res.evidence_unit_clauses += w;
        res.k = std::max(res.k, w);
    }
    res.m = res.evidence_constraints;

    for (const Variable& v : net.variables) {
        // One clause per zero bit of cardinality-1 below its leading one-bit,
        // of width k_i counted down as the bits are scanned LSB first.
        int ki = bit_width(v.cardinality);
        for (unsigned b = static_cast<unsigned>(v.cardinality) - 1; b > 0; b >>= 1, --ki) {
            if ((b & 1u) == 0) {
                ++res.m;
                ++res.variable_clauses;
                res.k = std::max(res.k, ki);
            }
        }

        const Cpt& cpt = net.cpts[v.id];
        int k_max = bit_width(v.cardinality);
        for (int p : cpt.parents) k_max += bit_width(net.cardinality(p));
        if (k_max == 0) continue;  // scope of cardinality-1 variables constrains nothing
        for (double pr : cpt.table) {
            if (pr == 0.0) {
                ++res.m;
                ++res.zero_entries;
                res.k = std::max(res.k, k_max);
            }
        }
    }

    res.r = static_cast<double>(res.m) / static_cast<double>(res.n);
    res.ratio = res.m == 0
                    ? 0.0
                    : std::ldexp(static_cast<double>(res.m) * res.k / static_cast<double>(res.n),
                                 -res.k);
    res.hardness = classify(res.ratio);
    return res;
}

BitMapping make_bit_mapping(const BayesianNetwork& net) {
    BitMapping mapping;
    mapping.bits.resize(net.variables.size());
    int next = 1;
    for (const Variable& v : net.variables) {
        const int w = bit_width(v.cardinality);
        mapping.bits[v.id].reserve(w);
        for (int t = 0; t < w; ++t) mapping.bits[v.id].push_back(next++);
    }
    mapping.n_bool = next - 1;
    return mapping;
}

std::pair<CnfFormula, BitMapping> encode(const BayesianNetwork& net, const Evidence& evidence) {
    validate_evidence(net, evidence);
    BitMapping mapping = make_bit_mapping(net);
    require_nondegenerate(mapping.n_bool);

    CnfFormula cnf;
    cnf.n_bool = mapping.n_bool;

    // CPT clauses: negate the full bit assignment of (parents, child state)
    // for every zero entry.
    for (const Cpt& cpt : net.cpts) {
        const int child_card = net.cardinality(cpt.child);
        for (std::size_t idx = 0; idx < cpt.table.size(); ++idx) {
            if (cpt.table[idx] != 0.0) continue;
            Clause clause;
            clause.family = ClauseFamily::cpt;

            const int child_state = static_cast<int>(idx % static_cast<std::size_t>(child_card));
            std::size_t row = idx / static_cast<std::size_t>(child_card);
            for (int t = 0; t < bit_width(child_card); ++t)
                clause.literals.push_back(-sign_for((child_state >> t) & 1) *
                                          mapping.bits[cpt.child][t]);
            for (std::size_t j = cpt.parents.size(); j-- > 0;) {
                const int parent = cpt.parents[j];
                const int state = static_cast<int>(row % static_cast<std::size_t>(net.cardinality(parent)));
                row /= static_cast<std::size_t>(net.cardinality(parent));
                for (int t = 0; t < bit_width(net.cardinality(parent)); ++t)
                    clause.literals.push_back(-sign_for((state >> t) & 1) *
                                              mapping.bits[parent][t]);
            }
            if (clause.literals.empty()) continue;  // all scope variables have one state
            std::sort(clause.literals.begin(), clause.literals.end(),
                      [](int a, int b) { return std::abs(a) < std::abs(b); });
            cnf.clauses.push_back(std::move(clause));
        }
    }

    // Variable clauses: with 1 b_{w-1} .. b_1 the binary form of
    // cardinality-1, each zero bit b_k yields
    //   (X_w = 1 and X_j = b_j for j > k)  ->  X_k = 0.
    for (const Variable& v : net.variables) {
        const int w = bit_width(v.cardinality);
        if (w == 0) continue;
        const unsigned top = static_cast<unsigned>(v.cardinality) - 1;
        for (int k = w - 1; k >= 1; --k) {
            if ((top >> (k - 1)) & 1u) continue;
            Clause clause;
            clause.family = ClauseFamily::variable;
            clause.literals.push_back(-mapping.bits[v.id][k - 1]);
            for (int j = k + 1; j < w; ++j)
                clause.literals.push_back(-sign_for((top >> (j - 1)) & 1) * mapping.bits[v.id][j - 1]);
            clause.literals.push_back(-mapping.bits[v.id][w - 1]);
            std::sort(clause.literals.begin(), clause.literals.end(),
                      [](int a, int b) { return std::abs(a) < std::abs(b); });
            cnf.clauses.push_back(std::move(clause));
        }
    }

    // Evidence clauses: one unit per bit of each observed state.
    for (const auto& [var, state] : evidence) {
        const int w = bit_width(net.cardinality(var));
        for (int t = 0; t < w; ++t) {
            Clause unit;
            unit.family = ClauseFamily::evidence;
            unit.literals.push_back(sign_for((state >> t) & 1) * mapping.bits[var][t]);
            cnf.clauses.push_back(std::move(unit));
        }
    }

    return {std::move(cnf), std::move(mapping)};
}

DecodeResult decode(const std::vector<bool>& assignment, const BitMapping& mapping,
                    const BayesianNetwork& net) {
    if (static_cast<int>(assignment.size()) < mapping.n_bool + 1)
        throw std::invalid_argument("assignment covers " + std::to_string(assignment.size()) +
                                    " entries, mapping needs " + std::to_string(mapping.n_bool + 1));
    DecodeResult out;
    out.config.assign(net.variables.size(), 0);
    for (const Variable& v : net.variables) {
        int value = 0;
        const auto& bits = mapping.bits[v.id];
        for (std::size_t t = 0; t < bits.size(); ++t)
            value |= static_cast<int>(assignment[bits[t]]) << t;
        if (value >= v.cardinality) {
            out.valid = false;
            out.invalid_variable = v.id;
            out.config.clear();
            return out;
        }
        out.config[v.id] = value;
    }
    out.valid = true;
    return out;
}

}  // namespace bnh
