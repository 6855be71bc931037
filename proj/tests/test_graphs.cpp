#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "cliquebound/graphs.hpp"

using namespace cqb;

TEST_CASE("p=1 forces the complete k-partite graph") {
    auto g = sample_kpartite({2, 2, Rational(1), 7});
    REQUIRE(g.edge_count() == 4);
    REQUIRE(count_k_cliques(g) == 4);
}

TEST_CASE("invalid p rejected") {
    REQUIRE_THROWS_AS(sample_kpartite({2, 2, Rational(0), 1}), ContractError);
    REQUIRE_THROWS_AS(sample_kpartite({2, 2, make_rational(3, 2), 1}), ContractError);
    REQUIRE_THROWS_AS(sample_kpartite({2, 2, make_rational(-1, 2), 1}), ContractError);
}

TEST_CASE("sampling is deterministic per seed") {
    auto a = sample_kpartite({4, 3, make_rational(1, 2), 123});
    auto b = sample_kpartite({4, 3, make_rational(1, 2), 123});
    auto c = sample_kpartite({4, 3, make_rational(1, 2), 124});
    REQUIRE(a.edges() == b.edges());
    REQUIRE(a.edges() != c.edges());  // 24 pairs, collision essentially impossible
}

TEST_CASE("no intra-block edge can be added") {
    KPartiteGraph g(3, 2);
    REQUIRE_THROWS_AS(g.add_edge({0, 0}, {0, 1}), ContractError);
}

TEST_CASE("mean edge count over many seeds is within 3 sigma") {
    // n=3, k=3, p=1/2: Binomial(27, 1/2), mean 13.5, sigma = sqrt(27)/2
    const int samples = 10000;
    double total = 0;
    for (int s = 0; s < samples; ++s)
        total += sample_kpartite({3, 3, make_rational(1, 2), static_cast<std::uint64_t>(s)})
                     .edge_count();
    double mean = total / samples;
    double sigma_of_mean = std::sqrt(27.0 / 4.0) / std::sqrt(double(samples));
    REQUIRE(std::abs(mean - 13.5) <= 3 * sigma_of_mean);
}

TEST_CASE("per-pair empirical inclusion frequency within 4 sigma") {
    const int samples = 10000;
    Rational p = make_rational(1, 3);
    KPartiteGraph dims(2, 2);
    std::vector<int> hits(dims.num_cross_pairs(), 0);
    for (int s = 0; s < samples; ++s) {
        auto g = sample_kpartite({2, 2, p, static_cast<std::uint64_t>(s) + 777});
        for (std::uint64_t i = 0; i < g.num_cross_pairs(); ++i) {
            auto [u, v] = g.cross_pair(i);
            if (g.has_edge(u, v)) ++hits[i];
        }
    }
    double sigma = std::sqrt(samples * (1.0 / 3) * (2.0 / 3));
    for (int h : hits) REQUIRE(std::abs(h - samples / 3.0) <= 4 * sigma);
}

TEST_CASE("rational_edge_probability exact and approximate cases") {
    REQUIRE(rational_edge_probability(4, Rational(2)) == make_rational(1, 4));
    REQUIRE(rational_edge_probability(2, Rational(2)) == make_rational(1, 2));
    REQUIRE(rational_edge_probability(8, Rational(2)) == make_rational(1, 8));
    REQUIRE(rational_edge_probability(4, Rational(4)) == make_rational(1, 2));
    Rational q = rational_edge_probability(3, Rational(4));
    REQUIRE(std::abs(rat_to_double(q) - 1.0 / std::sqrt(3.0)) <= 1e-9);
    REQUIRE(q.get_den() <= 1000000000);
}

TEST_CASE("is_clique on hand graphs") {
    KPartiteGraph g(2, 2);
    g.add_edge({0, 0}, {1, 0});
    REQUIRE(is_clique(g, {0, 0}));
    REQUIRE_FALSE(is_clique(g, {0, 1}));
    REQUIRE_THROWS_AS(is_clique(g, {0, 5}), ContractError);
    REQUIRE_THROWS_AS(is_clique(g, {0}), ContractError);
}

TEST_CASE("count_k_cliques small cases") {
    KPartiteGraph complete(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) complete.add_edge({0, i}, {1, j});
    REQUIRE(count_k_cliques(complete) == 4);
    KPartiteGraph empty(2, 2);
    REQUIRE(count_k_cliques(empty) == 0);
    KPartiteGraph one(2, 2);
    one.add_edge({0, 1}, {1, 0});
    REQUIRE(count_k_cliques(one) == 1);
}

TEST_CASE("count_k_cliques equals brute tuple scan on random graphs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto g = sample_kpartite({3, 3, make_rational(1, 2), seed});
        std::uint64_t brute = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c)
                    if (is_clique(g, {a, b, c})) ++brute;
        REQUIRE(count_k_cliques(g) == brute);
    }
}

TEST_CASE("common neighborhood size") {
    KPartiteGraph complete(3, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) complete.add_edge({0, i}, {1, j});
    REQUIRE(common_neighborhood_size(complete, {}, 0) == 3);
    REQUIRE(common_neighborhood_size(complete, {{1, 0}}, 0) == 3);
    KPartiteGraph empty(3, 2);
    REQUIRE(common_neighborhood_size(empty, {{1, 0}}, 0) == 0);

    KPartiteGraph g(2, 2);  // edges a1b1, a2b1 (0-based: (0,0)-(1,0), (0,1)-(1,0))
    g.add_edge({0, 0}, {1, 0});
    g.add_edge({0, 1}, {1, 0});
    REQUIRE(common_neighborhood_size(g, {{1, 0}}, 0) == 2);
    REQUIRE_THROWS_AS(common_neighborhood_size(g, {{0, 0}}, 0), ContractError);
}

TEST_CASE("graph JSON and edge-list round trips") {
    auto g = sample_kpartite({3, 3, make_rational(1, 3), 99});
    auto j = graph_to_json(g);
    auto back = graph_from_json(j);
    REQUIRE(back.edges() == g.edges());
    REQUIRE(back.sample_p == g.sample_p);
    REQUIRE(back.sample_seed == g.sample_seed);

    std::stringstream ss;
    write_edge_list(g, ss);
    auto again = read_edge_list(ss);
    REQUIRE(again.edges() == g.edges());
}

TEST_CASE("neighborhood report runs and flags nothing on complete graphs") {
    KPartiteGraph complete(4, 3);
    for (int b1 = 0; b1 < 3; ++b1)
        for (int b2 = b1 + 1; b2 < 3; ++b2)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) complete.add_edge({b1, i}, {b2, j});
    // p=1 would make the window [n,n] exactly; use the report with p close to 1
    auto rep = neighborhood_report(complete, Rational(1), Rational(8));
    REQUIRE(rep.checked > 0);
    REQUIRE(rep.violations == 0);
}
