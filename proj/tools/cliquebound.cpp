// Experiment harness: generate benchmark CNFs, sample k-partite graphs,
// evaluate the pseudo-measure, run goodness reports, certify tree-like
// refutations, and spot-check VC dimensions.
//
// Exit codes: 0 ok, 1 usage error, 2 verification failure, 3 budget.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cliquebound/formulas.hpp"
#include "cliquebound/graphs.hpp"
#include "cliquebound/measure.hpp"
#include "cliquebound/patterns.hpp"
#include "cliquebound/proofs.hpp"
#include "cliquebound/rng.hpp"
#include "cliquebound/vcdim.hpp"

using namespace cqb;
using nlohmann::json;

namespace {

std::string timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractError("cannot open '" + path + "' for writing");
    out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContractError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Rational parse_rat(const std::string& s) { return rat_from_string(s); }

// named ordinary graphs: triangle, complete:N, cycle:N, path:N, star:N
OrdinaryGraph named_graph(const std::string& spec) {
    auto parse_n = [&](const std::string& s) {
        std::size_t colon = s.find(':');
        if (colon == std::string::npos) throw ContractError("graph spec '" + s + "' needs :N");
        return std::stoi(s.substr(colon + 1));
    };
    std::vector<std::pair<int, int>> edges;
    if (spec == "triangle") return OrdinaryGraph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
    if (spec.rfind("complete:", 0) == 0) {
        int n = parse_n(spec);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
        return OrdinaryGraph::from_edges(n, std::move(edges));
    }
    if (spec.rfind("cycle:", 0) == 0) {
        int n = parse_n(spec);
        for (int u = 0; u < n; ++u) edges.emplace_back(u, (u + 1) % n);
        return OrdinaryGraph::from_edges(n, std::move(edges));
    }
    if (spec.rfind("path:", 0) == 0) {
        int n = parse_n(spec);
        for (int u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
        return OrdinaryGraph::from_edges(n, std::move(edges));
    }
    if (spec.rfind("star:", 0) == 0) {
        int n = parse_n(spec);
        for (int u = 1; u < n; ++u) edges.emplace_back(0, u);
        return OrdinaryGraph::from_edges(n, std::move(edges));
    }
    throw ContractError("unknown graph spec '" + spec + "'");
}

std::vector<int> parse_charge(const std::string& spec, int vertices) {
    std::vector<int> charge(vertices, 0);
    if (spec == "odd") {
        charge[0] = 1;
    } else if (spec == "even") {
        // all zero
    } else {
        if (static_cast<int>(spec.size()) != vertices)
            throw ContractError("charge string length must equal vertex count");
        for (int i = 0; i < vertices; ++i) {
            if (spec[i] != '0' && spec[i] != '1') throw ContractError("charge must be 0/1");
            charge[i] = spec[i] - '0';
        }
    }
    return charge;
}

std::optional<bool> decide_sat(const CnfFormula& f) {
    if (f.num_vars > 20) return std::nullopt;
    return brute_force_sat(f).has_value();
}

struct GlobalOpts {
    std::uint64_t seed = 0;
    int jobs = 1;
    std::uint64_t budget = 0;
    std::string out;
};

void run_parallel(int jobs, std::size_t count, const std::function<void(std::size_t)>& work) {
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                work(i);
            }
        });
    for (auto& th : pool) th.join();
}

// --- gen -----------------------------------------------------------------

int cmd_gen_bclique(const GlobalOpts& g, const std::string& enc_name, int n, int k, int c,
                    bool width3, bool with_template, const std::string& p_str,
                    const std::string& graph_file, bool refute) {
    BcliqueEncoding enc = enc_name == "unary"    ? BcliqueEncoding::unary
                          : enc_name == "binary" ? BcliqueEncoding::binary
                          : enc_name == "cary"   ? BcliqueEncoding::cary
                                                 : throw ContractError("bad encoding");
    KPartiteGraph graph = [&] {
        if (!graph_file.empty()) {
            return graph_from_json(json::parse(slurp(graph_file)));
        }
        Rational p = parse_rat(p_str);
        return sample_kpartite({n, k, p, g.seed});
    }();
    BcliqueOptions opts{c, width3, with_template};
    auto inst = gen_bclique(graph, enc, opts);
    std::string prefix = g.out.empty() ? ("bclique_" + enc_name + "_n" + std::to_string(graph.n()) +
                                          "_k" + std::to_string(graph.k()) + "_s" +
                                          std::to_string(g.seed))
                                       : g.out;
    write_text(prefix + ".cnf", to_dimacs(inst.formula));
    json manifest{{"family", "bclique"},
                  {"encoding", enc_name},
                  {"n", graph.n()},
                  {"k", graph.k()},
                  {"c", enc == BcliqueEncoding::cary ? c : 1},
                  {"width3", width3},
                  {"template", with_template},
                  {"seed", g.seed},
                  {"clause_count", inst.formula.clauses.size()},
                  {"var_count", inst.formula.num_vars},
                  {"generated_at", timestamp()}};
    if (graph.sample_p) manifest["p"] = rat_to_string(*graph.sample_p);
    if (auto sat = decide_sat(inst.formula)) manifest["sat"] = *sat;
    write_json(prefix + ".graph.json", graph_to_json(graph));
    if (refute && !with_template) {
        if (auto res = tree_resolution_refute(inst.formula)) {
            auto pi = resolution_to_semantic(*res, inst.formula);
            write_json(prefix + ".proof.json", refutation_to_json(pi));
            manifest["proof"] = prefix + ".proof.json";
        } else {
            manifest["proof"] = nullptr;  // satisfiable
        }
    }
    write_json(prefix + ".json", manifest);
    std::cout << prefix << ".cnf " << prefix << ".json\n";
    return 0;
}

int cmd_gen_named(const GlobalOpts& g, const std::string& family, const std::string& graph_spec,
                  const std::string& charge_spec, int pigeons, int holes,
                  const std::string& input, const std::string& gadget_name, bool refute) {
    CnfFormula f;
    json manifest{{"family", family}, {"generated_at", timestamp()}, {"seed", g.seed}};
    std::string prefix = g.out.empty() ? family : g.out;
    if (family == "php") {
        auto bg = BipartiteGraph::complete(pigeons, holes);
        f = gen_php(bg);
        manifest["pigeons"] = pigeons;
        manifest["holes"] = holes;
    } else if (family == "tseitin") {
        auto graph = named_graph(graph_spec);
        auto charge = parse_charge(charge_spec, graph.num_vertices);
        f = gen_tseitin(graph, charge);
        manifest["graph"] = graph_spec;
        std::string cs;
        for (int c : charge) cs += static_cast<char>('0' + c);
        manifest["charge"] = cs;
    } else if (family == "clique") {
        auto graph = named_graph(graph_spec);
        f = gen_clique_plain(graph, pigeons);  // pigeons doubles as k here
        manifest["graph"] = graph_spec;
        manifest["k"] = pigeons;
    } else if (family == "lift") {
        std::istringstream in(slurp(input));
        CnfFormula base = from_dimacs(in);
        f = lift_formula(base, Gadget::from_name(gadget_name));
        manifest["input"] = input;
        manifest["gadget"] = gadget_name;
    } else {
        throw ContractError("unknown family '" + family + "'");
    }
    manifest["clause_count"] = f.clauses.size();
    manifest["var_count"] = f.num_vars;
    if (auto sat = decide_sat(f)) manifest["sat"] = *sat;
    write_text(prefix + ".cnf", to_dimacs(f));
    if (refute) {
        if (auto res = tree_resolution_refute(f)) {
            auto pi = resolution_to_semantic(*res, f);
            write_json(prefix + ".proof.json", refutation_to_json(pi));
            manifest["proof"] = prefix + ".proof.json";
        } else {
            manifest["proof"] = nullptr;
        }
    }
    write_json(prefix + ".json", manifest);
    std::cout << prefix << ".cnf " << prefix << ".json\n";
    return 0;
}

// --- sample ----------------------------------------------------------------

int cmd_sample(const GlobalOpts& g, int n, int k, const std::string& p_str,
               const std::string& d_str, int count, bool stats) {
    Rational p = d_str.empty() ? parse_rat(p_str) : rational_edge_probability(n, parse_rat(d_str));
    json report{{"command", "sample"},
                {"generated_at", timestamp()},
                {"config", {{"n", n},
                            {"k", k},
                            {"p", rat_to_string(p)},
                            {"seed", g.seed},
                            {"count", count}}}};
    json samples = json::array();
    for (int i = 0; i < count; ++i) {
        auto graph = sample_kpartite({n, k, p, derive_seed(g.seed, static_cast<std::uint64_t>(i))});
        json row{{"index", i}, {"graph", graph_to_json(graph)}, {"edges", graph.edge_count()}};
        if (stats) {
            if (tuple_space_size(n, k) <= enumeration_budget())
                row["cliques"] = count_k_cliques(graph);
            auto rep = neighborhood_report(graph, p, Rational(8));
            row["neighborhood_checked"] = rep.checked;
            row["neighborhood_violations"] = rep.violations;
        }
        samples.push_back(std::move(row));
    }
    report["samples"] = samples;
    if (!g.out.empty())
        write_json(g.out, report);
    else
        std::cout << report.dump(2) << "\n";
    return 0;
}

// --- measure ------------------------------------------------------------------

json measure_one_sample(const MeasureContext& ctx, const CoreTable* goodness_table) {
    const KPartiteGraph& graph = ctx.graph();
    int n = graph.n(), k = graph.k();
    json row;
    row["edges"] = graph.edge_count();
    row["mu_T"] = rat_to_string(mu_whole_space(ctx));
    json ruled = json::array();
    std::vector<TupleSet> q_family;
    for (std::uint64_t idx = 0; idx < graph.num_cross_pairs(); ++idx) {
        auto [u, v] = graph.cross_pair(idx);
        if (graph.has_edge(u, v)) continue;
        TupleSet q = tuples_through_edge(n, k, u, v);
        Rational mu = mu_set(ctx, q);
        ruled.push_back({{"edge", {u.block, u.index, v.block, v.index}},
                         {"mu", rat_to_string(mu)},
                         {"boundary_equal",
                          mu_ruled_out_boundary(ctx, q, u, v) == mu}});
        q_family.push_back(std::move(q));
    }
    row["ruled_out"] = ruled;
    if (goodness_table != nullptr) {
        auto rep = goodness_check(ctx, q_family, *goodness_table);
        row["goodness_pairs"] = rep.pairs_checked;
        std::size_t passed = 0;
        for (const auto& r : rep.rows)
            if (r.pass) ++passed;
        row["goodness_passed"] = passed;
        row["good"] = rep.good;
    }
    return row;
}

int cmd_measure(const GlobalOpts& g, int n, int k, const std::string& p_str,
                const std::string& d_str, int d, int samples, bool exhaustive, bool per_tuple,
                int q_count) {
    Rational p = d_str.empty() ? parse_rat(p_str) : rational_edge_probability(n, parse_rat(d_str));
    Rational big_d = d_str.empty() ? Rational(2) : parse_rat(d_str);
    json report{{"command", "measure"},
                {"generated_at", timestamp()},
                {"config", {{"n", n},
                            {"k", k},
                            {"p", rat_to_string(p)},
                            {"D", rat_to_string(big_d)},
                            {"d", d},
                            {"seed", g.seed},
                            {"samples", samples},
                            {"exhaustive", exhaustive},
                            {"jobs", g.jobs}}}};
    if (exhaustive) {
        json rows = json::array();
        bool all_ok = true;
        for (int i = 0; i < q_count; ++i) {
            std::vector<Tuple> ts;
            std::uint64_t total = tuple_space_size(n, k);
            for (std::uint64_t r = 0; r < total; ++r)
                if (rng_at(derive_seed(g.seed, static_cast<std::uint64_t>(i)), r) & 1)
                    ts.push_back(TupleSet::unrank(n, k, r));
            TupleSet q = TupleSet::from_tuples(n, k, ts);
            auto chk = exhaustive_expectation_check(n, k, p, d, q);
            all_ok = all_ok && chk.ok;
            rows.push_back({{"q_size", q.size()},
                            {"mean", rat_to_string(chk.mean)},
                            {"expected", rat_to_string(chk.expected)},
                            {"ok", chk.ok}});
        }
        report["expectation_checks"] = rows;
        report["all_ok"] = all_ok;
        if (!g.out.empty())
            write_json(g.out, report);
        else
            std::cout << report.dump(2) << "\n";
        std::cout << (all_ok ? "exhaustive expectation: ok\n" : "exhaustive expectation: FAILED\n");
        return all_ok ? 0 : 2;
    }

    long table_d = static_cast<long>(rat_to_double(big_d / 4));
    CoreTable goodness_table(k, static_cast<int>(table_d));
    std::vector<json> rows(static_cast<std::size_t>(samples));
    run_parallel(g.jobs, rows.size(), [&](std::size_t i) {
        auto graph = sample_kpartite({n, k, p, derive_seed(g.seed, i)});
        MeasureContext ctx(graph, p, d, big_d, make_rational(1, 2));
        json row = measure_one_sample(ctx, &goodness_table);
        row["index"] = i;
        row["seed"] = derive_seed(g.seed, i);
        if (per_tuple) {
            json mus = json::array();
            for (std::uint64_t r = 0; r < tuple_space_size(n, k); ++r)
                mus.push_back(rat_to_string(mu_tuple_naive(ctx, TupleSet::unrank(n, k, r))));
            row["per_tuple"] = mus;
        }
        rows[i] = std::move(row);
    });
    report["samples"] = rows;
    if (!g.out.empty())
        write_json(g.out, report);
    else
        std::cout << report.dump(2) << "\n";
    return 0;
}

// --- good -----------------------------------------------------------------------

int cmd_good(const GlobalOpts& g, int n, int k, const std::string& d_cap_str,
             const std::string& delta_str, int d, int samples, const std::string& csv_path) {
    Rational big_d = parse_rat(d_cap_str);
    Rational delta = parse_rat(delta_str);
    Rational p = rational_edge_probability(n, big_d);
    long table_d = static_cast<long>(rat_to_double(big_d / 4));
    CoreTable table(k, static_cast<int>(table_d));

    std::vector<json> rows(static_cast<std::size_t>(samples));
    std::vector<std::string> csv_rows(static_cast<std::size_t>(samples));
    run_parallel(g.jobs, rows.size(), [&](std::size_t i) {
        auto graph = sample_kpartite({n, k, p, derive_seed(g.seed, i)});
        MeasureContext ctx(graph, p, d, big_d, delta);
        std::vector<TupleSet> q_family;
        for (std::uint64_t idx = 0; idx < graph.num_cross_pairs(); ++idx) {
            auto [u, v] = graph.cross_pair(idx);
            if (!graph.has_edge(u, v)) q_family.push_back(tuples_through_edge(n, k, u, v));
        }
        auto rep = goodness_check(ctx, q_family, table);
        Rational mu_t = mu_whole_space(ctx);
        std::size_t passed = 0;
        std::ostringstream csv;
        for (const auto& r : rep.rows) {
            if (r.pass) ++passed;
            csv << i << ',' << r.q_index << ',' << mask_to_string(r.core) << ',' << r.core_edges
                << ',' << r.core_vc << ',' << rat_to_string(r.abs_sum) << ',' << r.threshold << ','
                << (r.pass ? 1 : 0) << ',' << r.threshold_alt << ',' << (r.pass_alt ? 1 : 0)
                << '\n';
        }
        csv_rows[i] = csv.str();
        rows[i] = json{{"index", i},
                       {"edges", graph.edge_count()},
                       {"mu_T", rat_to_string(mu_t)},
                       {"mu_T_in_band", mu_t >= make_rational(1, 2) && mu_t <= make_rational(3, 2)},
                       {"pairs", rep.pairs_checked},
                       {"passed", passed},
                       {"good", rep.good}};
    });

    std::size_t good_count = 0, band_count = 0, pairs_total = 0, pairs_passed = 0;
    for (const auto& row : rows) {
        if (row.at("good").get<bool>()) ++good_count;
        if (row.at("mu_T_in_band").get<bool>()) ++band_count;
        pairs_total += row.at("pairs").get<std::size_t>();
        pairs_passed += row.at("passed").get<std::size_t>();
    }
    json report{{"command", "good"},
                {"generated_at", timestamp()},
                {"config", {{"n", n},
                            {"k", k},
                            {"D", rat_to_string(big_d)},
                            {"delta", rat_to_string(delta)},
                            {"d", d},
                            {"p", rat_to_string(p)},
                            {"seed", g.seed},
                            {"samples", samples},
                            {"jobs", g.jobs}}},
                {"samples", rows},
                {"fraction_good", samples ? static_cast<double>(good_count) / samples : 1.0},
                {"fraction_pairs_bounded",
                 pairs_total ? static_cast<double>(pairs_passed) / pairs_total : 1.0},
                {"fraction_mu_T_in_band",
                 samples ? static_cast<double>(band_count) / samples : 1.0}};
    if (!csv_path.empty()) {
        std::string csv = "sample,q_index,core_mask,core_edges,core_vc,abs_sum,log2_s,pass,log2_s_alt,pass_alt\n";
        for (const auto& s : csv_rows) csv += s;
        write_text(csv_path, csv);
    }
    if (!g.out.empty())
        write_json(g.out, report);
    else
        std::cout << report.dump(2) << "\n";
    std::cout << "fraction_good " << report["fraction_good"] << " fraction_mu_T_in_band "
              << report["fraction_mu_T_in_band"] << "\n";
    return 0;
}

// --- certify ---------------------------------------------------------------------

int cmd_certify(const GlobalOpts& g, const std::string& formula_path, const std::string& proof_path,
                const std::string& graph_path, const std::string& enc_name, int d,
                const std::string& p_str) {
    std::istringstream fin(slurp(formula_path));
    CnfFormula formula = from_dimacs(fin);
    TreeRefutation pi = refutation_from_json(json::parse(slurp(proof_path)), formula);
    auto check = verify_tree_refutation(pi, formula);
    if (!check.ok) {
        std::cerr << "refutation invalid at node " << check.node_id << ": " << check.message;
        if (check.witness) std::cerr << " (witness assignment " << *check.witness << ")";
        std::cerr << "\n";
        return 2;
    }
    auto tree = balance_extract(pi, formula);
    auto search = verify_search_tree(tree, formula);
    if (!search.ok) {
        std::cerr << "extracted tree fails search verification at assignment "
                  << *search.counterexample << "\n";
        return 2;
    }

    WitnessMap wm;
    std::optional<KPartiteGraph> graph;
    Rational p = make_rational(1, 2);
    if (!graph_path.empty()) {
        graph = graph_from_json(json::parse(slurp(graph_path)));
        BcliqueEncoding enc = enc_name == "unary"    ? BcliqueEncoding::unary
                              : enc_name == "binary" ? BcliqueEncoding::binary
                              : enc_name == "cary"   ? BcliqueEncoding::cary
                                                     : throw ContractError("bad encoding");
        auto inst = gen_bclique(*graph, enc);
        if (!(inst.formula == formula))
            throw ContractError("formula file does not match the graph + encoding");
        wm = inst.witness;
        if (graph->sample_p) p = *graph->sample_p;
        if (!p_str.empty()) p = parse_rat(p_str);
    } else {
        // measure frame for arbitrary formulas: one block, unary witnesses
        wm.enc = BcliqueEncoding::unary;
        wm.n = formula.num_vars;
        wm.k = 1;
        wm.c = 1;
        wm.m = formula.num_vars;
        graph = KPartiteGraph(formula.num_vars, 1);
        d = 0;
    }
    MeasureContext ctx(*graph, p, d);
    auto cert = certify_leaf_lower_bound(tree, ctx, wm);
    json out{{"command", "certify"},
             {"generated_at", timestamp()},
             {"config", {{"formula", formula_path},
                         {"proof", proof_path},
                         {"graph", graph_path},
                         {"encoding", enc_name},
                         {"d", d},
                         {"p", rat_to_string(p)}}},
             {"proof_size", pi.size()},
             {"tree", decision_tree_to_json(tree)},
             {"certificate", certificate_to_json(cert)}};
    if (!g.out.empty())
        write_json(g.out, out);
    else
        std::cout << out.dump(2) << "\n";
    std::cout << "leaves " << cert.leaf_count << " depth " << cert.depth << " bound "
              << (cert.bound ? cert.bound->get_str() : std::string("-")) << " mu_T "
              << rat_to_string(cert.mu_total) << "\n";
    return 0;
}

// --- vc -------------------------------------------------------------------------

int cmd_vc(const GlobalOpts& g, const std::string& kind, int dim, int degree, int bound) {
    auto fam = reference_line_family(kind, dim, degree, bound);
    auto chk = sauer_shelah_check(fam);
    std::ostringstream csv;
    csv << "kind,dim,degree,coeff_bound,family_size,vc,sauer_ok\n";
    csv << kind << ',' << dim << ',' << degree << ',' << bound << ',' << fam.members.size() << ','
        << chk.vc << ',' << (chk.ok ? 1 : 0) << '\n';
    if (!g.out.empty())
        write_text(g.out, csv.str());
    else
        std::cout << csv.str();
    return chk.ok ? 0 : 2;
}

// --- selftest ----------------------------------------------------------------------

int cmd_selftest() {
    CoreTable t31(3, 1);
    CoreTable t42(4, 2);
    auto table = std::make_shared<CoreTable>(3, 1);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto g = sample_kpartite({3, 3, make_rational(1, 2), seed});
        MeasureContext ctx(g, make_rational(1, 2), 1);
        ctx.attach_core_table(table);
        for (std::uint64_t r = 0; r < 27; ++r) {
            Tuple t = TupleSet::unrank(3, 3, r);
            if (mu_tuple_naive(ctx, t) != mu_tuple_core_factored(ctx, t))
                throw VerificationError("selftest: measure oracle mismatch");
        }
    }
    auto php = gen_php(BipartiteGraph::complete(3, 2));
    auto res = tree_resolution_refute(php);
    if (!res) throw VerificationError("selftest: php refutation missing");
    auto pi = resolution_to_semantic(*res, php);
    if (!verify_tree_refutation(pi, php).ok) throw VerificationError("selftest: bad refutation");
    auto tree = balance_extract(pi, php);
    if (!verify_search_tree(tree, php).ok) throw VerificationError("selftest: bad search tree");
    if (vc_dimension(halfspace_traces(2, 4)) != 3)
        throw VerificationError("selftest: halfspace VC dimension");
    std::cout << "selftest ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clique formulas, pseudo-measures and tree-like refutation certificates"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--seed", g.seed, "base RNG seed");
    app.add_option("--jobs", g.jobs, "worker threads for sample loops");
    app.add_option("--budget", g.budget, "enumeration budget override");
    app.add_option("--out", g.out, "output file or prefix");

    // gen
    auto* gen = app.add_subcommand("gen", "generate benchmark CNF formulas");
    gen->require_subcommand(1);
    std::string enc = "unary", p_str = "1/2", graph_file, graph_spec = "triangle";
    std::string charge = "odd", lift_input, gadget = "xor2";
    int n = 4, k = 3, c = 1, pigeons = 2, holes = 1;
    bool width3 = false, with_template = false, refute = false;
    auto* gb = gen->add_subcommand("bclique", "block k-clique formulas");
    gb->add_option("--enc", enc, "unary|binary|cary");
    gb->add_option("-n,--n", n, "vertices per block");
    gb->add_option("-k,--k", k, "number of blocks");
    gb->add_option("--c", c, "cary arity");
    gb->add_option("-p,--p", p_str, "edge probability (rational)");
    gb->add_option("--graph-file", graph_file, "graph JSON instead of sampling");
    gb->add_flag("--width3", width3, "rewrite wide clauses as 3-CNF");
    gb->add_flag("--template", with_template, "emit the two-sided bclique(X,Y) form");
    gb->add_flag("--refute", refute, "attach a tree resolution refutation when feasible");
    auto* gp = gen->add_subcommand("php", "graph pigeonhole principle");
    gp->add_option("--pigeons", pigeons, "number of pigeons");
    gp->add_option("--holes", holes, "number of holes");
    gp->add_flag("--refute", refute, "attach a tree resolution refutation when feasible");
    auto* gt = gen->add_subcommand("tseitin", "Tseitin contradictions");
    gt->add_option("--graph", graph_spec, "triangle|complete:N|cycle:N|path:N|star:N");
    gt->add_option("--charge", charge, "odd|even|bitstring");
    gt->add_flag("--refute", refute, "attach a tree resolution refutation when feasible");
    auto* gc = gen->add_subcommand("clique", "plain clique formula");
    gc->add_option("--graph", graph_spec, "named graph");
    gc->add_option("-k,--k", pigeons, "clique size");
    auto* gl = gen->add_subcommand("lift", "gadget-lifted formula");
    gl->add_option("--input", lift_input, "base CNF (DIMACS)")->required();
    gl->add_option("--gadget", gadget, "id|not|xor2|and2|or2|maj3");

    // sample
    auto* sample = app.add_subcommand("sample", "sample G(n,k,p) graphs");
    std::string sp = "1/2", sd;
    int scount = 1;
    bool sstats = false;
    sample->add_option("-n,--n", n, "vertices per block");
    sample->add_option("-k,--k", k, "blocks");
    sample->add_option("-p,--p", sp, "edge probability (rational)");
    sample->add_option("-D,--D", sd, "use p = n^(-2/D)");
    sample->add_option("--count", scount, "number of graphs");
    sample->add_flag("--stats", sstats, "include clique count and neighborhood report");

    // measure
    auto* measure = app.add_subcommand("measure", "pseudo-measure reports");
    std::string mp = "1/2", md;
    int d = 1, msamples = 1, q_count = 20;
    bool exhaustive = false, per_tuple = false;
    measure->add_option("-n,--n", n, "vertices per block");
    measure->add_option("-k,--k", k, "blocks");
    measure->add_option("-p,--p", mp, "edge probability (rational)");
    measure->add_option("-D,--D", md, "use p = n^(-2/D)");
    measure->add_option("-d,--d", d, "vertex cover budget of the measure");
    measure->add_option("--samples", msamples, "number of sampled graphs");
    measure->add_option("--q-count", q_count, "random tuple sets in exhaustive mode");
    measure->add_flag("--exhaustive", exhaustive, "average over all graphs exactly");
    measure->add_flag("--per-tuple", per_tuple, "emit every tuple's measure");

    // good
    auto* good = app.add_subcommand("good", "goodness Monte-Carlo report");
    std::string gd = "2", gdelta = "1/2", gcsv;
    int gsamples = 100;
    good->add_option("-n,--n", n, "vertices per block");
    good->add_option("-k,--k", k, "blocks");
    good->add_option("-D,--D", gd, "goodness exponent parameter");
    good->add_option("--delta", gdelta, "goodness delta");
    good->add_option("-d,--d", d, "measure vc budget for mu(T)");
    good->add_option("--samples", gsamples, "number of sampled graphs");
    good->add_option("--csv", gcsv, "per-(Q,F) rows as CSV");

    // certify
    auto* certify = app.add_subcommand("certify", "verify + extract + certify a refutation");
    std::string formula_path, proof_path, cgraph, cenc = "unary", cp;
    certify->add_option("--formula", formula_path, "DIMACS file")->required();
    certify->add_option("--proof", proof_path, "TreeRefutation JSON")->required();
    certify->add_option("--graph", cgraph, "graph JSON for the clique measure frame");
    certify->add_option("--enc", cenc, "encoding of the formula (with --graph)");
    certify->add_option("-d,--d", d, "measure vc budget (with --graph)");
    certify->add_option("-p,--p", cp, "override p (with --graph)");

    // vc
    auto* vc = app.add_subcommand("vc", "VC dimension spot checks");
    std::string kind = "halfspace";
    int dim = 2, degree = 1, bound = 4;
    vc->add_option("--kind", kind, "halfspace|f2_affine|ptf");
    vc->add_option("--dim", dim, "dimension");
    vc->add_option("--degree", degree, "ptf degree");
    vc->add_option("--bound", bound, "coefficient bound");

    auto* selftest = app.add_subcommand("selftest", "quick internal consistency checks");
    (void)selftest;

    auto enable_fallthrough = [](auto&& self, CLI::App* cmd) -> void {
        cmd->fallthrough(true);
        for (CLI::App* sub : cmd->get_subcommands({})) self(self, sub);
    };
    enable_fallthrough(enable_fallthrough, &app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (g.budget > 0) set_enumeration_budget(g.budget);
        if (gb->parsed()) return cmd_gen_bclique(g, enc, n, k, c, width3, with_template, p_str,
                                                 graph_file, refute);
        if (gp->parsed()) return cmd_gen_named(g, "php", "", "", pigeons, holes, "", "", refute);
        if (gt->parsed())
            return cmd_gen_named(g, "tseitin", graph_spec, charge, 0, 0, "", "", refute);
        if (gc->parsed())
            return cmd_gen_named(g, "clique", graph_spec, "", pigeons, 0, "", "", false);
        if (gl->parsed())
            return cmd_gen_named(g, "lift", "", "", 0, 0, lift_input, gadget, false);
        if (sample->parsed()) return cmd_sample(g, n, k, sp, sd, scount, sstats);
        if (measure->parsed())
            return cmd_measure(g, n, k, mp, md, d, msamples, exhaustive, per_tuple, q_count);
        if (good->parsed()) return cmd_good(g, n, k, gd, gdelta, d, gsamples, gcsv);
        if (certify->parsed())
            return cmd_certify(g, formula_path, proof_path, cgraph, cenc, d, cp);
        if (vc->parsed()) return cmd_vc(g, kind, dim, degree, bound);
        if (selftest->parsed()) return cmd_selftest();
    } catch (const BudgetError& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return 3;
    } catch (const VerificationError& e) {
        std::cerr << "verification: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
