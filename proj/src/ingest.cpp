#include "bnh/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "bnh/errors.hpp"

namespace bnh {

namespace {

struct Token {
    std::string_view text;
    std::size_t ordinal;
};

// Whitespace-separated tokens; lines whose first non-blank character is '#'
// or 'c' are comments.
std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t ordinal = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;

        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string_view::npos) continue;
        if (line[i] == '#' || line[i] == 'c') continue;
        while (i < line.size()) {
            const std::size_t end = line.find_first_of(" \t\r", i);
            const std::size_t len = (end == std::string_view::npos ? line.size() : end) - i;
            if (len > 0) tokens.push_back({line.substr(i, len), ordinal++});
            i = end == std::string_view::npos ? line.size() : end + 1;
        }
    }
    return tokens;
}

class TokenReader {
public:
    explicit TokenReader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    bool done() const { return pos_ >= tokens_.size(); }
    std::size_t offset() const { return pos_ < tokens_.size() ? tokens_[pos_].ordinal : tokens_.size(); }
    std::size_t remaining() const { return tokens_.size() - pos_; }

    const Token& next(const std::string& what) {
        if (done()) throw ParseError("unexpected end of input, expected " + what, offset());
        return tokens_[pos_++];
    }

    long long read_int(const std::string& what) {
        const Token& tok = next(what);
        long long value = 0;
        const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
        if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size())
            throw ParseError("expected integer " + what + ", got '" + std::string(tok.text) + "'",
                             tok.ordinal);
        return value;
    }

    double read_double(const std::string& what) {
        const Token& tok = next(what);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
        if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size())
            throw ParseError("expected number " + what + ", got '" + std::string(tok.text) + "'",
                             tok.ordinal);
        return value;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

constexpr std::size_t kMaxTableEntries = 100'000'000;

std::string format_fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

std::string format_shortest(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

// Value-level rounding to 6 significant digits, ties to even.
double round_sig6(double value) {
    if (value == 0.0 || !std::isfinite(value)) return value;
    const double magnitude = std::floor(std::log10(std::abs(value)));
    const double scale = std::pow(10.0, 5.0 - magnitude);
    return std::nearbyint(value * scale) / scale;
}

}  // namespace

BayesianNetwork parse_uai(std::string_view text, bool strict) {
    TokenReader reader(tokenize(text));

    const Token& header = reader.next("preamble 'BAYES'");
    if (header.text != "BAYES")
        throw ParseError("header mismatch: expected 'BAYES', got '" + std::string(header.text) + "'",
                         header.ordinal);

    const std::size_t count_at = reader.offset();
    const long long n = reader.read_int("variable count");
    if (n < 0 || n > 10'000'000)
        throw ParseError("unreasonable variable count " + std::to_string(n), count_at);

    BayesianNetwork net;
    net.variables.resize(n);
    for (long long v = 0; v < n; ++v) {
        const std::size_t at = reader.offset();
        const long long card = reader.read_int("cardinality of variable " + std::to_string(v));
        if (card < 1 || card > (1ll << 30))
            throw ParseError("invalid cardinality " + std::to_string(card) + " for variable " +
                                 std::to_string(v),
                             at);
        net.variables[v].id = static_cast<int>(v);
        net.variables[v].cardinality = static_cast<int>(card);
    }

    const std::size_t factor_count_at = reader.offset();
    const long long factors = reader.read_int("factor count");
    if (strict && factors != n)
        throw ParseError("factor count " + std::to_string(factors) + " does not match variable count " +
                             std::to_string(n),
                         factor_count_at);
    if (factors < 0)
        throw ParseError("negative factor count", factor_count_at);

    std::vector<std::vector<int>> scopes(factors);
    std::vector<char> has_cpt(n, 0);
    for (long long f = 0; f < factors; ++f) {
        const std::size_t at = reader.offset();
        const long long scope_size = reader.read_int("scope size of factor " + std::to_string(f));
        if (scope_size < 1)
            throw ParseError("factor " + std::to_string(f) + " has empty scope", at);
        scopes[f].resize(scope_size);
        for (long long j = 0; j < scope_size; ++j) {
            const std::size_t id_at = reader.offset();
            const long long id = reader.read_int("scope variable");
            if (id < 0 || id >= n)
                throw ParseError("dangling variable id " + std::to_string(id) + " in factor " +
                                     std::to_string(f),
                                 id_at);
            scopes[f][j] = static_cast<int>(id);
        }
        const int child = scopes[f].back();
        if (has_cpt[child])
            throw ParseError("duplicate child " + std::to_string(child) + " in factor " +
                                 std::to_string(f),
                             at);
        has_cpt[child] = 1;
    }
    for (long long v = 0; v < n; ++v)
        if (!has_cpt[v])
            throw ParseError("no factor declares variable " + std::to_string(v) + " as its child",
                             reader.offset());

    net.cpts.resize(n);
    for (long long f = 0; f < factors; ++f) {
        const int child = scopes[f].back();
        Cpt& cpt = net.cpts[child];
        cpt.child = child;
        cpt.parents.assign(scopes[f].begin(), scopes[f].end() - 1);

        std::size_t expected = 1;
        for (int id : scopes[f]) {
            expected *= static_cast<std::size_t>(net.variables[id].cardinality);
            if (expected > kMaxTableEntries)
                throw ParseError("factor " + std::to_string(f) + " table exceeds " +
                                     std::to_string(kMaxTableEntries) + " entries",
                                 reader.offset());
        }
        const std::size_t at = reader.offset();
        const long long declared = reader.read_int("table size of factor " + std::to_string(f));
        if (declared < 0 || static_cast<std::size_t>(declared) != expected)
            throw ParseError("table size " + std::to_string(declared) + " of factor " +
                                 std::to_string(f) + " does not match scope size " +
                                 std::to_string(expected),
                             at);
        cpt.table.resize(expected);
        for (std::size_t i = 0; i < expected; ++i)
            cpt.table[i] = reader.read_double("table entry");
    }

    if (!reader.done())
        throw ParseError("trailing tokens after the last table", reader.offset());

    require_valid(net);
    return net;
}

std::string write_uai(const BayesianNetwork& net) {
    std::ostringstream out;
    out << "BAYES\n" << net.num_variables() << "\n";
    for (int v = 0; v < net.num_variables(); ++v)
        out << (v ? " " : "") << net.cardinality(v);
    out << "\n" << net.num_variables() << "\n";
    for (const Cpt& cpt : net.cpts) {
        out << cpt.parents.size() + 1;
        for (int p : cpt.parents) out << " " << p;
        out << " " << cpt.child << "\n";
    }
    for (const Cpt& cpt : net.cpts) {
        out << "\n" << cpt.table.size() << "\n";
        const std::size_t card = static_cast<std::size_t>(net.cardinality(cpt.child));
        for (std::size_t i = 0; i < cpt.table.size(); ++i) {
            out << (i % card ? " " : i ? "\n" : "") << format_shortest(cpt.table[i]);
        }
        out << "\n";
    }
    return out.str();
}

Evidence parse_evidence(std::string_view text) {
    TokenReader reader(tokenize(text));
    const long long count = reader.read_int("evidence count");
    if (count < 0) throw ParseError("negative evidence count", 0);

    if (reader.remaining() % 2 != 0)
        throw ParseError("odd token count: evidence pairs are incomplete", reader.offset());
    if (reader.remaining() != static_cast<std::size_t>(2 * count))
        throw ParseError("evidence declares " + std::to_string(count) + " pairs but carries " +
                             std::to_string(reader.remaining() / 2),
                         reader.offset());

    Evidence evidence;
    for (long long i = 0; i < count; ++i) {
        const std::size_t at = reader.offset();
        const long long var = reader.read_int("evidence variable id");
        const long long state = reader.read_int("evidence state");
        if (var < 0 || state < 0)
            throw ParseError("negative evidence value", at);
        if (evidence.count(static_cast<int>(var)))
            throw ParseError("duplicate variable " + std::to_string(var) + " in evidence", at);
        evidence[static_cast<int>(var)] = static_cast<int>(state);
    }
    return evidence;
}

std::string write_dimacs(const CnfFormula& cnf, const BitMapping& mapping) {
    std::size_t mapped = 0;
    for (const auto& bits : mapping.bits) mapped += bits.size();
    if (static_cast<int>(mapped) != mapping.n_bool || mapping.n_bool != cnf.n_bool)
        throw std::invalid_argument("bit mapping covers " + std::to_string(mapped) +
                                    " Boolean variables, formula declares " +
                                    std::to_string(cnf.n_bool));

    std::ostringstream out;
    for (std::size_t v = 0; v < mapping.bits.size(); ++v)
        for (std::size_t j = 0; j < mapping.bits[v].size(); ++j)
            out << "c bnvar " << v << " bit " << j + 1 << " -> " << mapping.bits[v][j] << "\n";
    out << "p cnf " << cnf.n_bool << " " << cnf.clauses.size() << "\n";
    for (const Clause& clause : cnf.clauses) {
        for (int lit : clause.literals) {
            if (lit == 0 || std::abs(lit) > cnf.n_bool)
                throw std::invalid_argument("unmapped Boolean variable in literal " +
                                            std::to_string(lit));
            out << lit << " ";
        }
        out << "0\n";
    }
    return out.str();
}

std::string write_report(const ExperimentReport& report, ReportFormat format) {
    if (format == ReportFormat::csv) {
        std::ostringstream out;
        out << "network,case,evidence_size,n,m,k,r,ratio,class,samples,rejected,"
               "rejection_rate,pe_estimate,seed\n";
        for (const CaseResult& row : report.cases) {
            out << report.network << "," << row.index << "," << row.evidence.size() << ","
                << row.ktest.n << "," << row.ktest.m << "," << row.ktest.k << ","
                << format_fixed6(row.ktest.r) << "," << format_fixed6(row.ktest.ratio) << ","
                << to_string(row.ktest.hardness) << "," << row.stats.total << ","
                << row.stats.rejected << "," << format_fixed6(row.stats.rejection_rate) << ","
                << format_fixed6(row.stats.pe_estimate) << "," << row.seed << "\n";
        }
        if (!report.cases.empty()) {
            out << report.network << ",ALL,,,,,,,," << report.total_samples << ","
                << report.total_rejected << "," << format_fixed6(report.mean_rejection_rate)
                << ",," << report.seed << "\n";
        }
        return out.str();
    }

    nlohmann::ordered_json doc;
    doc["network"] = report.network;
    doc["seed"] = report.seed;
    doc["cases"] = nlohmann::ordered_json::array();
    for (const CaseResult& row : report.cases) {
        nlohmann::ordered_json item;
        item["case"] = row.index;
        item["evidence_size"] = row.evidence.size();
        nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
        for (const auto& [var, state] : row.evidence) pairs.push_back({var, state});
        item["evidence"] = std::move(pairs);
        item["n"] = row.ktest.n;
        item["m"] = row.ktest.m;
        item["k"] = row.ktest.k;
        item["r"] = round_sig6(row.ktest.r);
        item["ratio"] = round_sig6(row.ktest.ratio);
        item["class"] = to_string(row.ktest.hardness);
        item["samples"] = row.stats.total;
        item["rejected"] = row.stats.rejected;
        item["rejection_rate"] = round_sig6(row.stats.rejection_rate);
        item["pe_estimate"] = round_sig6(row.stats.pe_estimate);
        item["seed"] = row.seed;
        doc["cases"].push_back(std::move(item));
    }
    doc["aggregate"] = {
        {"mean_rejection_rate", round_sig6(report.mean_rejection_rate)},
        {"pooled_rejection_rate", round_sig6(report.pooled_rejection_rate)},
        {"total_samples", report.total_samples},
        {"total_rejected", report.total_rejected},
    };
    return doc.dump(2) + "\n";
}

NetworkDocument load_network(const std::string& path, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open network file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    NetworkDocument doc;
    doc.source = path;
    doc.text = buffer.str();
    doc.net = parse_uai(doc.text, strict);
    return doc;
}

Evidence load_evidence(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open evidence file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_evidence(buffer.str());
}

}  // namespace bnh
