#include <doctest.h>

#include <algorithm>
#include <array>
#include <vector>

#include "bnh/errors.hpp"
#include "bnh/model.hpp"
#include "bnh/rng.hpp"
#include "testutil.hpp"

using namespace bnh;

TEST_CASE("bit_width") {
    CHECK(bit_width(5) == 3);
    CHECK(bit_width(2) == 1);
    CHECK(bit_width(1) == 0);
    CHECK(bit_width(4) == 2);
    CHECK(bit_width(8) == 3);
    CHECK(bit_width(9) == 4);
    CHECK_THROWS_AS(bit_width(0), std::invalid_argument);
    CHECK_THROWS_AS(bit_width(-3), std::invalid_argument);
}

TEST_CASE("topological order of a chain is the chain") {
    BayesianNetwork net;
    net.variables = {{0, 2, ""}, {1, 2, ""}, {2, 2, ""}};
    net.cpts = {
        {0, {}, {0.5, 0.5}},
        {1, {0}, {0.5, 0.5, 0.5, 0.5}},
        {2, {1}, {0.5, 0.5, 0.5, 0.5}},
    };
    CHECK(topological_order(net) == std::vector<int>{0, 1, 2});
}

TEST_CASE("topological order breaks ties by ascending id") {
    BayesianNetwork net;
    net.variables = {{0, 2, ""}, {1, 2, ""}};
    net.cpts = {{0, {}, {0.5, 0.5}}, {1, {}, {0.5, 0.5}}};
    CHECK(topological_order(net) == std::vector<int>{0, 1});

    // parent with the larger id still comes after its child's order demands
    BayesianNetwork rev;
    rev.variables = {{0, 2, ""}, {1, 2, ""}};
    rev.cpts = {{0, {1}, {0.5, 0.5, 0.5, 0.5}}, {1, {}, {0.5, 0.5}}};
    CHECK(topological_order(rev) == std::vector<int>{1, 0});
}

TEST_CASE("two-cycle is rejected with an arc on the cycle") {
    BayesianNetwork net;
    net.variables = {{0, 2, ""}, {1, 2, ""}};
    net.cpts = {
        {0, {1}, {0.5, 0.5, 0.5, 0.5}},
        {1, {0}, {0.5, 0.5, 0.5, 0.5}},
    };
    CHECK_THROWS_WITH_AS(topological_order(net), doctest::Contains("cycle"), ValidationError);
}

TEST_CASE("topological order is a fixed point") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const BayesianNetwork net = testutil::random_net(rng, {});
        const std::vector<int> a = topological_order(net);
        const std::vector<int> b = topological_order(net);
        CHECK(a == b);
        // every variable after all of its parents
        std::vector<int> position(net.num_variables());
        for (std::size_t i = 0; i < a.size(); ++i) position[a[i]] = static_cast<int>(i);
        for (const Cpt& cpt : net.cpts)
            for (int p : cpt.parents) CHECK(position[p] < position[cpt.child]);
    }
}

TEST_CASE("joint probability of independent fair coins") {
    BayesianNetwork net;
    net.variables = {{0, 2, ""}, {1, 2, ""}};
    net.cpts = {{0, {}, {0.5, 0.5}}, {1, {}, {0.5, 0.5}}};
    const std::array<int, 2> config{0, 0};
    CHECK(joint_probability(net, config) == doctest::Approx(0.25));
}

TEST_CASE("joint probability annihilates on a zero factor") {
    const BayesianNetwork net = testutil::tiny_ab();
    CHECK(joint_probability(net, std::array<int, 2>{0, 1}) == 0.0);
    CHECK(joint_probability(net, std::array<int, 2>{1, 1}) == doctest::Approx(0.25));
}

TEST_CASE("joint probability rejects out-of-range states") {
    const BayesianNetwork net = testutil::tiny_ab();
    CHECK_THROWS_AS(joint_probability(net, std::array<int, 2>{0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(joint_probability(net, std::array<int, 1>{0}), std::invalid_argument);
}

TEST_CASE("validate accepts the fixtures") {
    CHECK(validate(testutil::tiny_ab()).empty());
    CHECK(validate(testutil::card5()).empty());
}

TEST_CASE("validate flags a row summing away from 1") {
    BayesianNetwork net = testutil::tiny_ab();
    net.cpts[1].table = {1.0, 0.0, 0.5, 0.4};  // second row sums to 0.9
    const std::vector<Violation> violations = validate(net);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].variable == 1);
    CHECK(violations[0].row == 1);
    CHECK(violations[0].message.find("sums to") != std::string::npos);
}

TEST_CASE("validate flags a table shape mismatch") {
    BayesianNetwork net = testutil::tiny_ab();
    net.cpts[1].table = {1.0, 0.0, 0.5};
    const std::vector<Violation> violations = validate(net);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].variable == 1);
    CHECK(violations[0].message.find("entries") != std::string::npos);
}

TEST_CASE("validate flags negative entries and unknown parents") {
    BayesianNetwork net = testutil::tiny_ab();
    net.cpts[1].table = {1.0, 0.0, 1.5, -0.5};
    CHECK(validate(net).size() == 2);  // two out-of-range entries

    BayesianNetwork dangling = testutil::tiny_ab();
    dangling.cpts[1].parents = {7};
    CHECK_FALSE(validate(dangling).empty());
}

TEST_CASE("validate tolerates row sums within 1e-4") {
    BayesianNetwork net = testutil::tiny_ab();
    net.cpts[0].table = {0.50004, 0.5};
    CHECK(validate(net).empty());
    net.cpts[0].table = {0.5002, 0.5};
    CHECK_FALSE(validate(net).empty());
}

TEST_CASE("joint probability sums to 1 over all configurations") {
    Rng rng(23);
    for (int trial = 0; trial < 15; ++trial) {
        const BayesianNetwork net = testutil::random_net(rng, {});
        double total = 0.0;
        testutil::for_each_config(net, [&](const std::vector<int>& config) {
            total += joint_probability(net, config);
        });
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("joint probability is invariant under consistent relabeling") {
    Rng rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        const BayesianNetwork net = testutil::random_net(rng, {});
        const int n = net.num_variables();

        // reverse the ids: old v becomes n-1-v
        std::vector<int> remap(n);
        for (int v = 0; v < n; ++v) remap[v] = n - 1 - v;

        BayesianNetwork relabeled;
        relabeled.variables.resize(n);
        relabeled.cpts.resize(n);
        for (int v = 0; v < n; ++v) {
            relabeled.variables[remap[v]] = {remap[v], net.cardinality(v), ""};
            Cpt cpt = net.cpts[v];
            cpt.child = remap[v];
            for (int& p : cpt.parents) p = remap[p];
            relabeled.cpts[remap[v]] = std::move(cpt);
        }

        testutil::for_each_config(net, [&](const std::vector<int>& config) {
            std::vector<int> permuted(n);
            for (int v = 0; v < n; ++v) permuted[remap[v]] = config[v];
            CHECK(joint_probability(net, config) ==
                  doctest::Approx(joint_probability(relabeled, permuted)).epsilon(1e-12));
        });
    }
}

TEST_CASE("evidence validation") {
    const BayesianNetwork net = testutil::tiny_ab();
    CHECK_NOTHROW(validate_evidence(net, Evidence{{1, 1}}));
    CHECK_THROWS_AS(validate_evidence(net, Evidence{{1, 2}}), ValidationError);
    CHECK_THROWS_AS(validate_evidence(net, Evidence{{5, 0}}), ValidationError);
}

TEST_CASE("reclassify_zeros rewrites tiny entries only") {
    BayesianNetwork net = testutil::tiny_ab();
    net.cpts[1].table = {1.0 - 1e-9, 1e-9, 0.5, 0.5};
    const BayesianNetwork cleaned = reclassify_zeros(net, 1e-6);
    CHECK(cleaned.cpts[1].table[1] == 0.0);
    CHECK(cleaned.cpts[1].table[2] == 0.5);
    const BayesianNetwork untouched = reclassify_zeros(net, 0.0);
    CHECK(untouched.cpts[1].table[1] == 1e-9);
}
