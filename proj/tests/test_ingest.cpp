#include <doctest.h>

#include <string>
#include <vector>

#include "bnh/errors.hpp"
#include "bnh/ingest.hpp"
#include "bnh/ktest.hpp"
#include "bnh/rng.hpp"
#include "testutil.hpp"

using namespace bnh;

TEST_CASE("parse_uai reads the minimal document") {
    const BayesianNetwork net = parse_uai("BAYES 1 2 1 1 0 2 0.3 0.7");
    REQUIRE(net.num_variables() == 1);
    CHECK(net.cardinality(0) == 2);
    CHECK(net.cpts[0].parents.empty());
    CHECK(net.cpts[0].table == std::vector<double>{0.3, 0.7});
}

TEST_CASE("parse_uai reads multi-line documents with comments") {
    const std::string text =
        "# a tiny network\n"
        "BAYES\n"
        "2\n"
        "2 2\n"
        "2\n"
        "c scopes follow\n"
        "1 0\n"
        "2 0 1\n"
        "2\n"
        "0.5 0.5\n"
        "4\n"
        "1.0 0.0 0.5 0.5\n";
    const BayesianNetwork net = parse_uai(text);
    REQUIRE(net.num_variables() == 2);
    CHECK(net.cpts[1].parents == std::vector<int>{0});
    // Pr(B=1 | A=0) sits at row 0, child state 1
    CHECK(net.cpts[1].table[1] == 0.0);
}

TEST_CASE("write_uai then parse_uai reproduces the tiny fixture") {
    const BayesianNetwork net = testutil::tiny_ab();
    const BayesianNetwork back = parse_uai(write_uai(net));
    REQUIRE(back.num_variables() == 2);
    CHECK(back.cpts[1].table[1] == 0.0);
    CHECK(back.cpts[1].table[2] == 0.5);
}

TEST_CASE("parse_uai rejects malformed documents") {
    CHECK_THROWS_AS(parse_uai("MARKOV 1 2 1 1 0 2 0.5 0.5"), ParseError);
    CHECK_THROWS_AS(parse_uai("BAYES 1 2 2 1 0 1 1 2 0.5 0.5"), ParseError);  // F != N
    CHECK_THROWS_AS(parse_uai("BAYES 1 2 1 1 0 2 0.3 0.7 9"), ParseError);    // trailing token
    CHECK_THROWS_AS(parse_uai("BAYES 1 2 1 1 0 3 0.3 0.7 0.0"), ParseError);  // table size
    CHECK_THROWS_AS(parse_uai("BAYES 2 2 2 2 1 0 1 0 2 0.5 0.5 2 0.5 0.5"), ParseError);  // dup child
    CHECK_THROWS_AS(parse_uai("BAYES 1 2 1 2 0 5 2 0.5 0.5"), ParseError);    // dangling id
    CHECK_THROWS_AS(parse_uai("BAYES 1 2 1 1 0 2 0.3"), ParseError);          // truncated
}

TEST_CASE("parse errors carry the offending token offset") {
    try {
        parse_uai("BAYES 1 2 2 1 0 2 0.5 0.5");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.token_offset() == 3);  // the factor count
        CHECK(std::string(e.what()).find("token 3") != std::string::npos);
    }
}

TEST_CASE("parse_uai surfaces row-sum violations as validation errors") {
    CHECK_THROWS_AS(parse_uai("BAYES 1 2 1 1 0 2 0.3 0.3"), ValidationError);
}

TEST_CASE("parse_evidence") {
    CHECK(parse_evidence("0").empty());
    const Evidence one = parse_evidence("1 1 1");
    REQUIRE(one.size() == 1);
    CHECK(one.at(1) == 1);
    CHECK_THROWS_AS(parse_evidence("2 0 1 0 0"), ParseError);  // duplicate variable
    CHECK_THROWS_AS(parse_evidence("1 1"), ParseError);        // odd token count
    CHECK_THROWS_AS(parse_evidence("2 0 1"), ParseError);      // pair count mismatch
    CHECK_THROWS_AS(parse_evidence(""), ParseError);
}

TEST_CASE("round trip preserves the joint distribution") {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        testutil::NetOpts opts;
        opts.max_vars = 5;
        opts.max_card = 4;
        const BayesianNetwork net = testutil::random_net(rng, opts);
        const BayesianNetwork back = parse_uai(write_uai(net));
        REQUIRE(back.num_variables() == net.num_variables());
        testutil::for_each_config(net, [&](const std::vector<int>& config) {
            const double a = joint_probability(net, config);
            const double b = joint_probability(back, config);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        });
    }
}

TEST_CASE("write_dimacs renders the empty formula") {
    BayesianNetwork net;
    net.variables = {{0, 4, ""}};
    net.cpts = {{0, {}, {0.25, 0.25, 0.25, 0.25}}};
    const BitMapping mapping = make_bit_mapping(net);
    CnfFormula cnf;
    cnf.n_bool = mapping.n_bool;
    CHECK(write_dimacs(cnf, mapping) ==
          "c bnvar 0 bit 1 -> 1\n"
          "c bnvar 0 bit 2 -> 2\n"
          "p cnf 2 0\n");
}

TEST_CASE("write_dimacs renders literals in clause order") {
    BayesianNetwork net;
    net.variables = {{0, 8, ""}};
    net.cpts = {{0, {}, std::vector<double>(8, 0.125)}};
    const BitMapping mapping = make_bit_mapping(net);
    CnfFormula cnf;
    cnf.n_bool = mapping.n_bool;
    cnf.clauses.push_back({{-3, -2}, ClauseFamily::variable});
    const std::string text = write_dimacs(cnf, mapping);
    CHECK(text.find("-3 -2 0\n") != std::string::npos);
    CHECK(text.find("p cnf 3 1\n") != std::string::npos);
}

TEST_CASE("write_dimacs for the tiny fixture with evidence B=1") {
    const BayesianNetwork net = testutil::tiny_ab();
    const auto [cnf, mapping] = encode(net, Evidence{{1, 1}});
    CHECK(write_dimacs(cnf, mapping) ==
          "c bnvar 0 bit 1 -> 1\n"
          "c bnvar 1 bit 1 -> 2\n"
          "p cnf 2 2\n"
          "1 -2 0\n"
          "2 0\n");
}

TEST_CASE("write_dimacs is deterministic and rejects unmapped literals") {
    const BayesianNetwork net = testutil::card5();
    const auto [cnf, mapping] = encode(net, Evidence{});
    CHECK(write_dimacs(cnf, mapping) == write_dimacs(cnf, mapping));

    CnfFormula bad = cnf;
    bad.clauses.push_back({{9}, ClauseFamily::cpt});
    CHECK_THROWS_AS(write_dimacs(bad, mapping), std::invalid_argument);
}

TEST_CASE("write_report CSV schema") {
    ExperimentReport report;
    report.network = "tiny";
    report.seed = 7;

    SUBCASE("empty report is the header only") {
        CHECK(write_report(report, ReportFormat::csv) ==
              "network,case,evidence_size,n,m,k,r,ratio,class,samples,rejected,"
              "rejection_rate,pe_estimate,seed\n");
    }

    SUBCASE("rows and the ALL aggregate") {
        CaseResult row;
        row.index = 0;
        row.evidence = {{1, 1}};
        row.ktest.n = 2;
        row.ktest.m = 2;
        row.ktest.k = 2;
        row.ktest.r = 1.0;
        row.ktest.ratio = 0.5;
        row.ktest.hardness = Hardness::intractable;
        row.stats.total = 60000;
        row.stats.rejected = 0;
        row.stats.rejection_rate = 0.0;
        row.stats.pe_estimate = 0.25;
        row.seed = 99;
        report.cases.push_back(row);
        row.index = 1;
        row.stats.rejected = 30000;
        row.stats.rejection_rate = 0.5;
        report.cases.push_back(row);
        report.total_samples = 120000;
        report.total_rejected = 30000;
        report.mean_rejection_rate = 0.25;
        report.pooled_rejection_rate = 0.25;

        const std::string csv = write_report(report, ReportFormat::csv);
        CHECK(csv.find("tiny,0,1,2,2,2,1.000000,0.500000,intractable,60000,0,0.000000,"
                       "0.250000,99\n") != std::string::npos);
        CHECK(csv.find("tiny,ALL,,,,,,,,120000,30000,0.250000,,7\n") != std::string::npos);
    }
}

TEST_CASE("write_report JSON mirrors the field names") {
    ExperimentReport report;
    report.network = "tiny";
    report.seed = 7;
    CaseResult row;
    row.index = 0;
    row.evidence = {{1, 1}};
    row.ktest = {2, 2, 2, 1.0, 0.5, Hardness::intractable, 1, 0, 1, 1};
    row.stats = {60000, 30123, 0.50205, 0.2501234567, 0.0625};
    row.seed = 99;
    report.cases.push_back(row);
    report.total_samples = 60000;
    report.total_rejected = 30123;
    report.mean_rejection_rate = 0.50205;
    report.pooled_rejection_rate = 0.50205;

    const std::string json = write_report(report, ReportFormat::json);
    for (const char* key :
         {"\"network\"", "\"case\"", "\"evidence_size\"", "\"n\"", "\"m\"", "\"k\"", "\"r\"",
          "\"ratio\"", "\"class\"", "\"samples\"", "\"rejected\"", "\"rejection_rate\"",
          "\"pe_estimate\"", "\"seed\"", "\"mean_rejection_rate\"", "\"pooled_rejection_rate\""})
        CHECK(json.find(key) != std::string::npos);
    // six significant digits
    CHECK(json.find("0.250123") != std::string::npos);
}

TEST_CASE("load_network reports missing files as parse errors") {
    CHECK_THROWS_AS(load_network("/nonexistent/net.uai"), ParseError);
    CHECK_THROWS_AS(load_evidence("/nonexistent/net.evid"), ParseError);
}
