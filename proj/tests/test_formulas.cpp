#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "cliquebound/formulas.hpp"
#include "cliquebound/rng.hpp"

using namespace cqb;

namespace {

KPartiteGraph one_edge_graph() {
    KPartiteGraph g(2, 2);
    g.add_edge({0, 0}, {1, 0});
    return g;
}

bool clique_exists(const KPartiteGraph& g) { return count_k_cliques(g) > 0; }

KPartiteGraph graph_from_mask(int n, int k, std::uint64_t mask) {
    KPartiteGraph g(n, k);
    for (std::uint64_t i = 0; i < g.num_cross_pairs(); ++i)
        if (mask >> i & 1) {
            auto [u, v] = g.cross_pair(i);
            g.add_edge(u, v);
        }
    return g;
}

}  // namespace

TEST_CASE("plain clique formula") {
    OrdinaryGraph two_isolated = OrdinaryGraph::from_edges(2, {});
    auto f1 = gen_clique_plain(two_isolated, 1);
    REQUIRE(f1.clauses.size() == 1);
    REQUIRE(brute_force_sat(f1).has_value());

    auto f2 = gen_clique_plain(two_isolated, 2);
    REQUIRE_FALSE(brute_force_sat(f2).has_value());

    // triangle has a 3-clique
    OrdinaryGraph tri = OrdinaryGraph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
    REQUIRE(brute_force_sat(gen_clique_plain(tri, 3)).has_value());

    // clause count recount: C(k,2) * (ordered non-adjacent pairs incl. u=v) + k blocks
    auto f = gen_clique_plain(tri, 2);
    std::size_t expect = 0;
    for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v)
            if (u == v || !tri.has_edge(u, v)) ++expect;
    REQUIRE(f.clauses.size() == expect + 2);
}

TEST_CASE("unary bclique structure") {
    auto inst = gen_bclique(one_edge_graph(), BcliqueEncoding::unary);
    REQUIRE(inst.formula.num_vars == 4);
    REQUIRE(inst.formula.clauses.size() == 5);  // 3 edge + 2 block
    REQUIRE(brute_force_sat(inst.formula).has_value());
}

TEST_CASE("binary bclique structure") {
    KPartiteGraph complete(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) complete.add_edge({0, i}, {1, j});
    auto inst = gen_bclique(complete, BcliqueEncoding::binary);
    REQUIRE(inst.formula.num_vars == 2);  // one bit per block
    REQUIRE(inst.formula.clauses.empty());
    REQUIRE(brute_force_sat(inst.formula).has_value());

    // n=3 needs forbidding clauses for out-of-range codes
    KPartiteGraph g3(3, 2);
    auto inst3 = gen_bclique(g3, BcliqueEncoding::binary);
    REQUIRE(inst3.formula.num_vars == 4);
    bool has_forbid = false;
    for (const auto& c : inst3.formula.clauses)
        if (c.size() == 2 && c[0] < 0 && c[1] < 0) has_forbid = true;
    REQUIRE(has_forbid);
    REQUIRE_FALSE(brute_force_sat(inst3.formula).has_value());  // empty graph, no clique
}

TEST_CASE("cary(1) coincides with unary clause for clause") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto g = sample_kpartite({3, 2, make_rational(1, 2), seed});
        auto unary = gen_bclique(g, BcliqueEncoding::unary);
        auto cary = gen_bclique(g, BcliqueEncoding::cary, {.c = 1});
        REQUIRE(unary.formula.clauses == cary.formula.clauses);
        REQUIRE(unary.formula.num_vars == cary.formula.num_vars);
    }
}

TEST_CASE("encoding equivalence and witness property, exhaustive tiny graphs") {
    auto unrank = [](int n, int k, std::uint64_t r) {
        Tuple t(k);
        for (int i = 0; i < k; ++i) {
            t[i] = static_cast<int>(r % n);
            r /= n;
        }
        return t;
    };
    for (auto [n, k] : {std::pair{2, 2}, std::pair{3, 2}}) {
        KPartiteGraph dims(n, k);
        std::uint64_t graphs = std::uint64_t{1} << dims.num_cross_pairs();
        for (std::uint64_t mask = 0; mask < graphs; ++mask) {
            auto g = graph_from_mask(n, k, mask);
            bool expect = clique_exists(g);
            std::vector<BcliqueInstance> insts;
            insts.push_back(gen_bclique(g, BcliqueEncoding::unary));
            insts.push_back(gen_bclique(g, BcliqueEncoding::binary));
            for (int c = 1; c <= std::max(1, detail::ceil_log2(n)); ++c)
                insts.push_back(gen_bclique(g, BcliqueEncoding::cary, {.c = c}));
            for (const auto& inst : insts) {
                REQUIRE(brute_force_sat(inst.formula).has_value() == expect);
                for (std::uint64_t r = 0; r < tuple_space_size(n, k); ++r) {
                    Tuple t = unrank(n, k, r);
                    REQUIRE(eval_formula(inst.formula, inst.witness.assignment(t)) ==
                            is_clique(g, t));
                }
            }
        }
    }
}

TEST_CASE("witness assignments are injective over the tuple space") {
    auto unrank = [](int n, int k, std::uint64_t r) {
        Tuple t(k);
        for (int i = 0; i < k; ++i) {
            t[i] = static_cast<int>(r % n);
            r /= n;
        }
        return t;
    };
    KPartiteGraph g(3, 3);
    for (auto enc : {BcliqueEncoding::unary, BcliqueEncoding::binary, BcliqueEncoding::cary}) {
        auto inst = gen_bclique(g, enc, {.c = 2});
        std::vector<std::vector<std::uint8_t>> seen;
        for (std::uint64_t r = 0; r < 27; ++r) {
            auto a = inst.witness.assignment(unrank(3, 3, r));
            for (const auto& prev : seen) REQUIRE(prev != a);
            seen.push_back(a);
        }
    }

    // spec example: unary witness of t=(a1,b2) over n=2,k=2
    auto u = gen_bclique(KPartiteGraph(2, 2), BcliqueEncoding::unary);
    auto a = u.witness.assignment({0, 1});
    REQUIRE(a == std::vector<std::uint8_t>{1, 0, 0, 1});
}

TEST_CASE("php formulas") {
    auto k21 = BipartiteGraph::complete(2, 1);
    auto f = gen_php(k21);
    REQUIRE(f.clauses.size() == 3);  // 2 pigeon + 1 hole
    REQUIRE_FALSE(brute_force_sat(f).has_value());

    BipartiteGraph isolated{2, 1, {{0, 0}}};
    auto fi = gen_php(isolated);
    bool has_empty = false;
    for (const auto& c : fi.clauses) has_empty |= c.empty();
    REQUIRE(has_empty);
    REQUIRE_FALSE(brute_force_sat(fi).has_value());

    auto k43 = BipartiteGraph::complete(4, 3);
    REQUIRE_FALSE(brute_force_sat(gen_php(k43)).has_value());
}

TEST_CASE("tseitin formulas") {
    OrdinaryGraph single = OrdinaryGraph::from_edges(1, {});
    auto f1 = gen_tseitin(single, {1});
    REQUIRE(f1.clauses.size() == 1);
    REQUIRE(f1.clauses[0].empty());

    OrdinaryGraph tri = OrdinaryGraph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
    REQUIRE_FALSE(brute_force_sat(gen_tseitin(tri, {1, 0, 0})).has_value());
    REQUIRE(brute_force_sat(gen_tseitin(tri, {1, 1, 0})).has_value());

    // per-vertex clause count is exactly 2^(deg-1)
    OrdinaryGraph star = OrdinaryGraph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
    auto fs = gen_tseitin(star, {1, 0, 0, 0});
    // vertex 0 degree 3 -> 4 clauses, three leaves degree 1 -> 1 clause each
    REQUIRE(fs.clauses.size() == 4 + 3);
}

TEST_CASE("lift formula") {
    CnfFormula unit;
    unit.num_vars = 1;
    unit.add_clause({1});
    auto lifted = lift_formula(unit, Gadget::from_name("xor2"));
    REQUIRE(lifted.num_vars == 2);
    REQUIRE(lifted.clauses.size() == 2);  // CNF of x1 xor x2 = 1

    auto same = lift_formula(unit, Gadget::from_name("id"));
    REQUIRE(same.clauses == unit.clauses);

    auto php = gen_php(BipartiteGraph::complete(2, 1));
    auto lifted_php = lift_formula(php, Gadget::from_name("xor2"));
    REQUIRE_FALSE(brute_force_sat(lifted_php).has_value());
    auto lifted_php_maj = lift_formula(php, Gadget::from_name("maj3"));
    REQUIRE_FALSE(brute_force_sat(lifted_php_maj).has_value());
}

TEST_CASE("lift preserves satisfiability on satisfiable inputs") {
    CnfFormula f;
    f.num_vars = 2;
    f.add_clause({1, -2});
    f.add_clause({2});
    REQUIRE(brute_force_sat(f).has_value());
    REQUIRE(brute_force_sat(lift_formula(f, Gadget::from_name("xor2"))).has_value());
    REQUIRE(brute_force_sat(lift_formula(f, Gadget::from_name("and2"))).has_value());
}

TEST_CASE("dimacs round trip") {
    auto g = sample_kpartite({3, 2, make_rational(1, 2), 4});
    auto inst = gen_bclique(g, BcliqueEncoding::unary);
    std::string text = to_dimacs(inst.formula);
    std::istringstream in(text);
    auto back = from_dimacs(in);
    REQUIRE(back == inst.formula);
    REQUIRE(back.var_names == inst.formula.var_names);
    REQUIRE(to_dimacs(back) == text);

    CnfFormula empty;
    REQUIRE(to_dimacs(empty) == "p cnf 0 0\n");

    std::istringstream bad("p cnf 2 1\n1 2\n");
    REQUIRE_THROWS_AS(from_dimacs(bad), ContractError);
}

TEST_CASE("brute force sat basics") {
    CnfFormula f;
    f.num_vars = 2;
    f.add_clause({});
    REQUIRE_FALSE(brute_force_sat(f).has_value());
    CnfFormula g;
    g.num_vars = 3;
    auto model = brute_force_sat(g);
    REQUIRE(model.has_value());
    REQUIRE(*model == std::vector<std::uint8_t>{0, 0, 0});
}

TEST_CASE("width3 output is 3-CNF and equisatisfiable") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto g = sample_kpartite({4, 2, make_rational(1, 2), seed});
        for (auto enc : {BcliqueEncoding::unary, BcliqueEncoding::binary}) {
            auto plain = gen_bclique(g, enc);
            auto narrow = gen_bclique(g, enc, {.width3 = true});
            for (const auto& c : narrow.formula.clauses) REQUIRE(c.size() <= 3);
            REQUIRE(brute_force_sat(plain.formula).has_value() ==
                    brute_force_sat(narrow.formula).has_value());
        }
    }
}

TEST_CASE("template restriction equals the direct generator clause for clause") {
    for (auto enc : {BcliqueEncoding::unary, BcliqueEncoding::binary, BcliqueEncoding::cary}) {
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            KPartiteGraph dims(3, 2);
            auto tmpl = gen_bclique(dims, enc, {.c = 2, .with_template = true});
            auto g = sample_kpartite({3, 2, make_rational(1, 2), seed});
            auto restricted = restrict_template(tmpl, g);
            auto direct = gen_bclique(g, enc, {.c = 2});
            REQUIRE(restricted.formula == direct.formula);
            REQUIRE(restricted.formula.var_names == direct.formula.var_names);
        }
    }
}

TEST_CASE("template clauses carry at most one y literal") {
    KPartiteGraph dims(3, 3);
    auto tmpl = gen_bclique(dims, BcliqueEncoding::unary, {.with_template = true});
    int num_x = tmpl.witness.num_x_vars();
    for (const auto& c : tmpl.formula.clauses) {
        int y_lits = 0;
        for (int lit : c)
            if (std::abs(lit) > num_x) {
                ++y_lits;
                REQUIRE(lit > 0);  // positive y literal
            }
        REQUIRE(y_lits <= 1);
    }
}
