#pragma once

#include <string>
#include <string_view>

#include "bnh/ktest.hpp"
#include "bnh/model.hpp"
#include "bnh/sampler.hpp"

namespace bnh {

// A parsed network together with its source text, for error reporting.
struct NetworkDocument {
    std::string source;  // file path or "<memory>"
    std::string text;
    BayesianNetwork net;
};

// UAI Bayes format: token stream of `BAYES`, variable count N, N
// cardinalities, factor count F (= N), F scope lines `s v_1 .. v_s` with the
// child last, then F tables `T p_1 .. p_T` with the rightmost scope variable
// fastest. Lines starting with `#` or `c` are comments. The result passes
// validate(); violations raise ValidationError, format problems ParseError.
BayesianNetwork parse_uai(std::string_view text, bool strict = true);

// Serializes in the same dialect parse_uai accepts (factor per variable in
// child-id order, shortest round-trip number formatting).
std::string write_uai(const BayesianNetwork& net);

// `k v_1 s_1 .. v_k s_k` pairs of variable id and observed state.
Evidence parse_evidence(std::string_view text);

// DIMACS CNF with `c bnvar <id> bit <j> -> <var>` mapping comments (bits
// LSB first, j from 1). Output is byte-deterministic.
std::string write_dimacs(const CnfFormula& cnf, const BitMapping& mapping);

enum class ReportFormat { csv, json };

// CSV columns: network,case,evidence_size,n,m,k,r,ratio,class,samples,
// rejected,rejection_rate,pe_estimate,seed; one row per case in index order,
// then an aggregate `ALL` row when any case exists. JSON mirrors the field
// names and adds the pooled rejection rate.
std::string write_report(const ExperimentReport& report, ReportFormat format);

NetworkDocument load_network(const std::string& path, bool strict = true);
Evidence load_evidence(const std::string& path);

}  // namespace bnh
