#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cliquebound/common.hpp"
#include "cliquebound/graphs.hpp"

namespace cqb {

// --- basic CNF machinery -----------------------------------------------------

// Clauses are sorted by variable index; duplicate variables and tautologies
// are rejected at insertion. Literal v > 0 is the variable, -v its negation.
struct CnfFormula {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;
    std::vector<std::string> var_names;  // var_names[v-1] names variable v ("" = unnamed)

    void set_var_name(int var, std::string name) {
        if (var < 1 || var > num_vars) throw ContractError("set_var_name: variable out of range");
        if (static_cast<int>(var_names.size()) < num_vars) var_names.resize(num_vars);
        var_names[var - 1] = std::move(name);
    }

    void add_clause(std::vector<int> lits) {
        std::sort(lits.begin(), lits.end(),
                  [](int a, int b) { return std::abs(a) < std::abs(b); });
        for (std::size_t i = 0; i < lits.size(); ++i) {
            int v = std::abs(lits[i]);
            if (lits[i] == 0 || v > num_vars)
                throw ContractError("add_clause: literal out of range");
            if (i + 1 < lits.size() && std::abs(lits[i + 1]) == v)
                throw ContractError(lits[i + 1] == lits[i] ? "add_clause: duplicate literal"
                                                           : "add_clause: tautological clause");
        }
        clauses.push_back(std::move(lits));
    }

    friend bool operator==(const CnfFormula& a, const CnfFormula& b) {
        return a.num_vars == b.num_vars && a.clauses == b.clauses;
    }
};

inline bool clause_satisfied(const std::vector<int>& clause, const std::vector<std::uint8_t>& assign) {
    for (int lit : clause) {
        bool val = assign[static_cast<std::size_t>(std::abs(lit)) - 1];
        if ((lit > 0) == val) return true;
    }
    return false;
}

inline bool eval_formula(const CnfFormula& f, const std::vector<std::uint8_t>& assign) {
    if (static_cast<int>(assign.size()) != f.num_vars)
        throw ContractError("eval_formula: assignment size mismatch");
    for (const auto& c : f.clauses)
        if (!clause_satisfied(c, assign)) return false;
    return true;
}

// Exhaustive SAT oracle; returns the lexicographically first model
// (variable 1 = least significant bit of the search counter).
inline std::optional<std::vector<std::uint8_t>> brute_force_sat(const CnfFormula& f) {
    if (f.num_vars > 26) throw BudgetError("brute_force_sat: more than 26 variables");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> masks;  // (positive, negative)
    masks.reserve(f.clauses.size());
    for (const auto& c : f.clauses) {
        std::uint32_t pos = 0, neg = 0;
        for (int lit : c) {
            std::uint32_t bit = 1u << (std::abs(lit) - 1);
            (lit > 0 ? pos : neg) |= bit;
        }
        masks.emplace_back(pos, neg);
        if (c.empty()) return std::nullopt;
    }
    std::uint64_t space = std::uint64_t{1} << f.num_vars;
    for (std::uint64_t s = 0; s < space; ++s) {
        bool ok = true;
        for (const auto& [pos, neg] : masks) {
            if ((s & pos) == 0 && (~s & neg) == 0) { ok = false; break; }
        }
        if (ok) {
            std::vector<std::uint8_t> model(f.num_vars);
            for (int v = 0; v < f.num_vars; ++v) model[v] = (s >> v) & 1;
            return model;
        }
    }
    return std::nullopt;
}

// --- ordinary / bipartite graphs ---------------------------------------------

struct OrdinaryGraph {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;  // u < v, sorted

    static OrdinaryGraph from_edges(int nv, std::vector<std::pair<int, int>> es) {
        OrdinaryGraph g;
        g.num_vertices = nv;
        for (auto& [u, v] : es) {
            if (u == v || u < 0 || v < 0 || u >= nv || v >= nv)
                throw ContractError("OrdinaryGraph: bad edge");
            if (u > v) std::swap(u, v);
        }
        std::sort(es.begin(), es.end());
        es.erase(std::unique(es.begin(), es.end()), es.end());
        g.edges = std::move(es);
        return g;
    }

    bool has_edge(int u, int v) const {
        if (u > v) std::swap(u, v);
        return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
    }

    std::vector<int> incident(int v) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (edges[i].first == v || edges[i].second == v) out.push_back(static_cast<int>(i));
        return out;
    }
};

struct BipartiteGraph {
    int num_left = 0;   // pigeons
    int num_right = 0;  // holes
    std::vector<std::pair<int, int>> edges;  // (pigeon, hole), sorted

    static BipartiteGraph complete(int left, int right) {
        BipartiteGraph g{left, right, {}};
        for (int p = 0; p < left; ++p)
            for (int h = 0; h < right; ++h) g.edges.emplace_back(p, h);
        return g;
    }
};

// --- plain clique formula ------------------------------------------------------

// clique(G,k) over variables x[v,i]: v is the i-th clique member. The
// i != j, u = v axioms keep one vertex from filling two member slots.
inline CnfFormula gen_clique_plain(const OrdinaryGraph& g, int k) {
    if (k < 1) throw ContractError("gen_clique_plain: need k >= 1");
    CnfFormula f;
    f.num_vars = g.num_vertices * k;
    f.var_names.resize(f.num_vars);
    auto var = [&](int v, int i) { return v * k + i + 1; };
    for (int v = 0; v < g.num_vertices; ++v)
        for (int i = 0; i < k; ++i)
            f.var_names[var(v, i) - 1] = "x[" + std::to_string(v) + "," + std::to_string(i) + "]";
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            for (int u = 0; u < g.num_vertices; ++u)
                for (int v = 0; v < g.num_vertices; ++v)
                    if (u == v || !g.has_edge(u, v)) f.add_clause({-var(u, i), -var(v, j)});
    for (int i = 0; i < k; ++i) {
        std::vector<int> block;
        for (int v = 0; v < g.num_vertices; ++v) block.push_back(var(v, i));
        f.add_clause(std::move(block));
    }
    return f;
}

// --- block encodings of the k-clique claim -------------------------------------

enum class BcliqueEncoding { unary, binary, cary };

inline std::string encoding_name(BcliqueEncoding e) {
    switch (e) {
        case BcliqueEncoding::unary: return "unary";
        case BcliqueEncoding::binary: return "binary";
        case BcliqueEncoding::cary: return "cary";
    }
    return "?";
}

struct BcliqueOptions {
    int c = 1;                 // cary arity
    bool width3 = false;       // rewrite wide clauses as 3-CNF ladders
    bool with_template = false;  // emit the two-sided bclique(X,Y) form
};

// Tuple <-> X-assignment correspondence rho_t. Variable layouts (0-based
// blocks/bits/digits, DIMACS indices 1-based):
//   unary:  x[b,v]   = b*n + v + 1
//   binary: x[i,bit] = i*bits + bit + 1, bit 0 = least significant,
//           vertex v encoded as the number v (codes n..2^bits-1 forbidden)
//   cary:   x[i,j,a] = (i*c + j)*m + a + 1, digit j of v base m (LSD first)
struct WitnessMap {
    BcliqueEncoding enc = BcliqueEncoding::unary;
    int n = 0, k = 0;
    int c = 1;      // cary digits
    int m = 0;      // cary alphabet size
    int bits = 0;   // binary code width

    int num_x_vars() const {
        switch (enc) {
            case BcliqueEncoding::unary: return n * k;
            case BcliqueEncoding::binary: return k * bits;
            case BcliqueEncoding::cary: return k * c * m;
        }
        return 0;
    }

    std::vector<std::uint8_t> assignment(const Tuple& t) const {
        if (static_cast<int>(t.size()) != k) throw ContractError("witness: tuple arity mismatch");
        std::vector<std::uint8_t> a(num_x_vars(), 0);
        for (int b = 0; b < k; ++b) {
            int v = t[b];
            if (v < 0 || v >= n) throw ContractError("witness: tuple entry out of range");
            switch (enc) {
                case BcliqueEncoding::unary:
                    a[static_cast<std::size_t>(b) * n + v] = 1;
                    break;
                case BcliqueEncoding::binary:
                    for (int bit = 0; bit < bits; ++bit)
                        a[static_cast<std::size_t>(b) * bits + bit] = (v >> bit) & 1;
                    break;
                case BcliqueEncoding::cary: {
                    int rem = v;
                    for (int j = 0; j < c; ++j) {
                        a[(static_cast<std::size_t>(b) * c + j) * m + rem % m] = 1;
                        rem /= m;
                    }
                    break;
                }
            }
        }
        return a;
    }

    // rho_t packed as an integer, variable 1 at bit 0 (SemanticLine order).
    std::uint32_t assignment_index(const Tuple& t) const {
        auto a = assignment(t);
        if (a.size() > 31) throw BudgetError("witness index: more than 31 X variables");
        std::uint32_t idx = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i]) idx |= 1u << i;
        return idx;
    }
};

struct BcliqueInstance {
    CnfFormula formula;
    WitnessMap witness;
    BcliqueOptions opts;
    bool is_template = false;
    int num_y_vars = 0;  // template only; y vars follow the X block

    // Pre-split clause stream: X-literals plus the cross-pair index of the
    // appended y literal (-1 = none). Restriction replays this stream.
    std::vector<std::pair<std::vector<int>, std::int64_t>> raw_clauses;
};

namespace detail {

inline int ceil_log2(int n) {
    int b = 0;
    while ((1 << b) < n) ++b;
    return b;
}

inline int cary_alphabet(int n, int c) {
    int m = 1;
    while (true) {
        long pw = 1;
        for (int i = 0; i < c; ++i) pw *= m;
        if (pw >= n) return m;
        ++m;
    }
}

// ladder split: (l1 .. lw) -> (l1 l2 s1)(~s1 l3 s2)...(~s_last l_{w-1} l_w)
inline void emit_width3(CnfFormula& f, const std::vector<int>& lits, int& next_ext, int c_index) {
    if (lits.size() <= 3) {
        f.add_clause(lits);
        return;
    }
    int prev = 0;
    std::size_t i = 0;
    int chunk = 0;
    while (lits.size() - i > 2) {
        int ext = next_ext++;
        if (ext > f.num_vars) {
            f.num_vars = ext;
            f.var_names.resize(f.num_vars);
        }
        f.var_names[ext - 1] =
            "ext[" + std::to_string(c_index) + "," + std::to_string(chunk++) + "]";
        std::vector<int> part;
        if (prev != 0) part.push_back(-prev);
        part.push_back(lits[i]);
        if (prev == 0) part.push_back(lits[++i]);
        part.push_back(ext);
        ++i;
        f.add_clause(std::move(part));
        prev = ext;
    }
    std::vector<int> tail{-prev};
    for (; i < lits.size(); ++i) tail.push_back(lits[i]);
    f.add_clause(std::move(tail));
}

// binary encoding: clause falsified exactly when block i's bits spell code a
inline std::vector<int> binary_code_clause(int i, int a, int bits, int base_one) {
    std::vector<int> lits;
    for (int b = 0; b < bits; ++b) {
        int var = base_one + i * bits + b;
        lits.push_back(((a >> b) & 1) ? -var : var);
    }
    return lits;
}

struct RawStream {
    std::vector<std::pair<std::vector<int>, std::int64_t>> clauses;
    void push(std::vector<int> lits, std::int64_t y_pair = -1) {
        clauses.emplace_back(std::move(lits), y_pair);
    }
};

// Shared clause-stream builder. When graph == nullptr the template stream
// is produced: every potential edge axiom appears, annotated with its
// cross-pair index.
inline RawStream bclique_stream(const KPartiteGraph* graph, int n, int k,
                                BcliqueEncoding enc, const BcliqueOptions& opts,
                                const WitnessMap& wm) {
    RawStream out;
    KPartiteGraph dims(n, k);
    auto pair_index = [&](int b1, int i, int b2, int j) -> std::int64_t {
        std::uint64_t per = static_cast<std::uint64_t>(n) * n;
        std::uint64_t bp = 0;
        for (int x = 0; x < b1; ++x) bp += static_cast<std::uint64_t>(k - 1 - x);
        bp += static_cast<std::uint64_t>(b2 - b1 - 1);
        return static_cast<std::int64_t>(bp * per + static_cast<std::uint64_t>(i) * n + j);
    };
    switch (enc) {
        case BcliqueEncoding::unary: {
            auto var = [&](int b, int v) { return b * n + v + 1; };
            for (int b1 = 0; b1 < k; ++b1)
                for (int b2 = b1 + 1; b2 < k; ++b2)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            if (graph && graph->has_edge({b1, i}, {b2, j})) continue;
                            out.push({-var(b1, i), -var(b2, j)},
                                     graph ? -1 : pair_index(b1, i, b2, j));
                        }
            for (int b = 0; b < k; ++b) {
                std::vector<int> block;
                for (int v = 0; v < n; ++v) block.push_back(var(b, v));
                out.push(std::move(block));
            }
            break;
        }
        case BcliqueEncoding::binary: {
            int bits = wm.bits;
            for (int b1 = 0; b1 < k; ++b1)
                for (int b2 = b1 + 1; b2 < k; ++b2)
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b) {
                            if (graph && graph->has_edge({b1, a}, {b2, b})) continue;
                            std::vector<int> lits = binary_code_clause(b1, a, bits, 1);
                            auto more = binary_code_clause(b2, b, bits, 1);
                            lits.insert(lits.end(), more.begin(), more.end());
                            out.push(std::move(lits), graph ? -1 : pair_index(b1, a, b2, b));
                        }
            for (int i = 0; i < k; ++i)
                for (int a = n; a < (1 << bits); ++a)
                    out.push(binary_code_clause(i, a, bits, 1));
            break;
        }
        case BcliqueEncoding::cary: {
            int c = wm.c, m = wm.m;
            long padded = 1;
            for (int j = 0; j < c; ++j) padded *= m;
            auto code_clause = [&](int i, long v) {
                std::vector<int> lits;
                long rem = v;
                for (int j = 0; j < c; ++j) {
                    lits.push_back(-((i * c + j) * m + static_cast<int>(rem % m) + 1));
                    rem /= m;
                }
                return lits;
            };
            for (int b1 = 0; b1 < k; ++b1)
                for (int b2 = b1 + 1; b2 < k; ++b2)
                    for (long u = 0; u < padded; ++u)
                        for (long v = 0; v < padded; ++v) {
                            bool real = u < n && v < n;
                            if (real && graph &&
                                graph->has_edge({b1, static_cast<int>(u)}, {b2, static_cast<int>(v)}))
                                continue;
                            std::vector<int> lits = code_clause(b1, u);
                            auto more = code_clause(b2, v);
                            lits.insert(lits.end(), more.begin(), more.end());
                            // pad vertices are isolated: their axioms carry no y
                            out.push(std::move(lits),
                                     (graph || !real)
                                         ? -1
                                         : pair_index(b1, static_cast<int>(u), b2,
                                                      static_cast<int>(v)));
                        }
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < c; ++j) {
                    std::vector<int> range;
                    for (int a = 0; a < m; ++a) range.push_back((i * c + j) * m + a + 1);
                    out.push(std::move(range));
                }
            break;
        }
    }
    return out;
}

inline void name_x_vars(CnfFormula& f, const WitnessMap& wm) {
    f.var_names.resize(f.num_vars);
    switch (wm.enc) {
        case BcliqueEncoding::unary:
            for (int b = 0; b < wm.k; ++b)
                for (int v = 0; v < wm.n; ++v)
                    f.var_names[static_cast<std::size_t>(b) * wm.n + v] =
                        "x[" + std::to_string(b) + "," + std::to_string(v) + "]";
            break;
        case BcliqueEncoding::binary:
            for (int i = 0; i < wm.k; ++i)
                for (int b = 0; b < wm.bits; ++b)
                    f.var_names[static_cast<std::size_t>(i) * wm.bits + b] =
                        "x[" + std::to_string(i) + "," + std::to_string(b) + "]";
            break;
        case BcliqueEncoding::cary:
            for (int i = 0; i < wm.k; ++i)
                for (int j = 0; j < wm.c; ++j)
                    for (int a = 0; a < wm.m; ++a)
                        f.var_names[(static_cast<std::size_t>(i) * wm.c + j) * wm.m + a] =
                            "x[" + std::to_string(i) + "," + std::to_string(j) + "," +
                            std::to_string(a) + "]";
            break;
    }
}

inline CnfFormula assemble(const RawStream& stream, const WitnessMap& wm, int num_y,
                           const KPartiteGraph* dims, bool width3) {
    CnfFormula f;
    f.num_vars = wm.num_x_vars() + num_y;
    name_x_vars(f, wm);
    if (num_y > 0 && dims) {
        for (std::int64_t y = 0; y < num_y; ++y) {
            auto [u, v] = dims->cross_pair(static_cast<std::uint64_t>(y));
            f.var_names[wm.num_x_vars() + y] =
                "y[" + std::to_string(u.block) + "," + std::to_string(u.index) + ";" +
                std::to_string(v.block) + "," + std::to_string(v.index) + "]";
        }
    }
    int next_ext = f.num_vars + 1;
    int ci = 0;
    for (const auto& [lits, y_pair] : stream.clauses) {
        std::vector<int> full = lits;
        if (y_pair >= 0) full.push_back(wm.num_x_vars() + static_cast<int>(y_pair) + 1);
        if (width3)
            emit_width3(f, full, next_ext, ci);
        else
            f.add_clause(std::move(full));
        ++ci;
    }
    return f;
}

}  // namespace detail

// Generator for every block encoding. With opts.with_template the graph
// argument only fixes (n,k) and the two-sided bclique(X,Y) form is
// produced; restrict_template substitutes a concrete graph and yields
// exactly the direct generator's clause stream.
inline BcliqueInstance gen_bclique(const KPartiteGraph& g, BcliqueEncoding enc,
                                   BcliqueOptions opts = {}) {
    int n = g.n(), k = g.k();
    WitnessMap wm;
    wm.enc = enc;
    wm.n = n;
    wm.k = k;
    switch (enc) {
        case BcliqueEncoding::unary:
            wm.c = 1;
            wm.m = n;
            break;
        case BcliqueEncoding::binary:
            wm.bits = detail::ceil_log2(n);
            break;
        case BcliqueEncoding::cary: {
            int max_c = std::max(1, detail::ceil_log2(n));
            if (opts.c < 1 || opts.c > max_c)
                throw ContractError("gen_bclique: cary arity c must satisfy 1 <= c <= ceil(log2 n)");
            wm.c = opts.c;
            wm.m = detail::cary_alphabet(n, opts.c);
            break;
        }
    }
    BcliqueInstance inst;
    inst.witness = wm;
    inst.opts = opts;
    inst.is_template = opts.with_template;
    if (opts.with_template) {
        inst.num_y_vars = static_cast<int>(g.num_cross_pairs());
        detail::RawStream stream = detail::bclique_stream(nullptr, n, k, enc, opts, wm);
        inst.raw_clauses = stream.clauses;
        KPartiteGraph dims(n, k);
        inst.formula = detail::assemble(stream, wm, inst.num_y_vars, &dims, opts.width3);
    } else {
        detail::RawStream stream = detail::bclique_stream(&g, n, k, enc, opts, wm);
        inst.raw_clauses = stream.clauses;
        inst.formula = detail::assemble(stream, wm, 0, nullptr, opts.width3);
    }
    return inst;
}

// Substitute a concrete graph into a template: y_e = 1 drops the clause,
// y_e = 0 drops the literal. Clause order is the shared stream order, so
// the result matches the direct generator clause for clause.
inline BcliqueInstance restrict_template(const BcliqueInstance& tmpl, const KPartiteGraph& g) {
    if (!tmpl.is_template) throw ContractError("restrict_template: not a template instance");
    if (g.n() != tmpl.witness.n || g.k() != tmpl.witness.k)
        throw ContractError("restrict_template: graph dimensions mismatch");
    BcliqueInstance inst;
    inst.witness = tmpl.witness;
    inst.opts = tmpl.opts;
    inst.opts.with_template = false;
    detail::RawStream stream;
    for (const auto& [lits, y_pair] : tmpl.raw_clauses) {
        if (y_pair >= 0) {
            auto [u, v] = g.cross_pair(static_cast<std::uint64_t>(y_pair));
            if (g.has_edge(u, v)) continue;  // satisfied edge axiom
        }
        stream.push(lits);
    }
    inst.raw_clauses = stream.clauses;
    inst.formula = detail::assemble(stream, inst.witness, 0, nullptr, inst.opts.width3);
    return inst;
}

inline std::vector<std::uint8_t> witness_assignment(const WitnessMap& wm, const Tuple& t) {
    return wm.assignment(t);
}

// --- pigeonhole ----------------------------------------------------------------

// PHP(G) over x[p,h] per edge; isolated pigeons contribute empty clauses.
inline CnfFormula gen_php(const BipartiteGraph& bg) {
    CnfFormula f;
    f.num_vars = static_cast<int>(bg.edges.size());
    f.var_names.resize(f.num_vars);
    std::vector<std::pair<int, int>> edges = bg.edges;
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 0; i < edges.size(); ++i)
        f.var_names[i] = "x[" + std::to_string(edges[i].first) + "," +
                         std::to_string(edges[i].second) + "]";
    auto var_of = [&](int p, int h) {
        auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(p, h));
        return static_cast<int>(it - edges.begin()) + 1;
    };
    for (int p = 0; p < bg.num_left; ++p) {
        std::vector<int> axiom;
        for (const auto& [ep, eh] : edges)
            if (ep == p) axiom.push_back(var_of(ep, eh));
        f.add_clause(std::move(axiom));
    }
    for (int h = 0; h < bg.num_right; ++h) {
        std::vector<int> pigeons;
        for (const auto& [ep, eh] : edges)
            if (eh == h) pigeons.push_back(ep);
        for (std::size_t a = 0; a < pigeons.size(); ++a)
            for (std::size_t b = a + 1; b < pigeons.size(); ++b)
                f.add_clause({-var_of(pigeons[a], h), -var_of(pigeons[b], h)});
    }
    return f;
}

// --- Tseitin ---------------------------------------------------------------------

// Parity constraint per vertex, 2^(deg-1) clauses each; a charged isolated
// vertex yields the empty clause.
inline CnfFormula gen_tseitin(const OrdinaryGraph& g, const std::vector<int>& charge) {
    if (static_cast<int>(charge.size()) != g.num_vertices)
        throw ContractError("gen_tseitin: charge vector size mismatch");
    CnfFormula f;
    f.num_vars = static_cast<int>(g.edges.size());
    f.var_names.resize(f.num_vars);
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        f.var_names[i] = "x[" + std::to_string(g.edges[i].first) + "-" +
                         std::to_string(g.edges[i].second) + "]";
    for (int v = 0; v < g.num_vertices; ++v) {
        std::vector<int> inc = g.incident(v);
        int deg = static_cast<int>(inc.size());
        if (deg > 12) throw BudgetError("gen_tseitin: degree cap 12 exceeded");
        int want = charge[v] & 1;
        if (deg == 0) {
            if (want == 1) f.add_clause({});
            continue;
        }
        for (std::uint32_t bits = 0; bits < (1u << deg); ++bits) {
            if ((std::popcount(bits) & 1) == want) continue;  // satisfying assignments stay
            std::vector<int> clause;
            for (int i = 0; i < deg; ++i) {
                int var = inc[i] + 1;
                clause.push_back((bits >> i & 1) ? -var : var);
            }
            f.add_clause(std::move(clause));
        }
    }
    return f;
}

// --- lifting ------------------------------------------------------------------------

struct Gadget {
    int arity = 1;
    std::uint16_t table = 0b10;  // identity

    bool eval(std::uint32_t input) const { return (table >> input) & 1; }

    static Gadget from_name(const std::string& name) {
        if (name == "id") return {1, 0b10};
        if (name == "not") return {1, 0b01};
        if (name == "xor2") return {2, 0b0110};
        if (name == "and2") return {2, 0b1000};
        if (name == "or2") return {2, 0b1110};
        if (name == "maj3") return {3, 0b11101000};
        throw ContractError("unknown gadget '" + name + "'");
    }
};

// A o g^n: substitute g on fresh variables for each variable, expanding
// every lifted clause to its canonical CNF (blocking clauses over the
// participating blocks, no auxiliary variables).
inline CnfFormula lift_formula(const CnfFormula& a, const Gadget& g) {
    if (g.arity < 1 || g.arity > 4) throw ContractError("lift_formula: gadget arity must be <= 4");
    for (const auto& c : a.clauses)
        if (c.size() > 6) throw ContractError("lift_formula: clause width cap 6 exceeded");
    CnfFormula f;
    f.num_vars = a.num_vars * g.arity;
    f.var_names.resize(f.num_vars);
    for (int v = 0; v < a.num_vars; ++v) {
        std::string base = (static_cast<int>(a.var_names.size()) > v && !a.var_names[v].empty())
                               ? a.var_names[v]
                               : ("v" + std::to_string(v + 1));
        for (int j = 0; j < g.arity; ++j)
            f.var_names[static_cast<std::size_t>(v) * g.arity + j] =
                base + "@" + std::to_string(j);
    }
    std::vector<std::uint32_t> zero_in, one_in;
    for (std::uint32_t in = 0; in < (1u << g.arity); ++in)
        (g.eval(in) ? one_in : zero_in).push_back(in);

    for (const auto& clause : a.clauses) {
        // falsifying block assignments per literal
        std::vector<const std::vector<std::uint32_t>*> falsify;
        for (int lit : clause) falsify.push_back(lit > 0 ? &zero_in : &one_in);
        std::uint64_t combos = 1;
        for (const auto* fs : falsify) {
            combos *= fs->size();
            check_budget(combos, "lift_formula");
        }
        if (clause.empty()) {
            f.add_clause({});
            continue;
        }
        std::vector<std::size_t> pick(clause.size(), 0);
        for (std::uint64_t step = 0; step < combos; ++step) {
            std::vector<int> lifted;
            for (std::size_t i = 0; i < clause.size(); ++i) {
                int block = std::abs(clause[i]) - 1;
                std::uint32_t beta = (*falsify[i])[pick[i]];
                for (int j = 0; j < g.arity; ++j) {
                    int var = block * g.arity + j + 1;
                    lifted.push_back((beta >> j & 1) ? -var : var);
                }
            }
            f.add_clause(std::move(lifted));
            for (std::size_t i = 0; i < pick.size(); ++i) {
                if (++pick[i] < falsify[i]->size()) break;
                pick[i] = 0;
            }
        }
    }
    return f;
}

// --- DIMACS ----------------------------------------------------------------------

// Header, then one clause per line; structured names ride along as
// "c var <index> <name>" comments, so the round trip is bit-exact.
inline std::string to_dimacs(const CnfFormula& f) {
    std::ostringstream out;
    for (int v = 0; v < f.num_vars; ++v)
        if (static_cast<int>(f.var_names.size()) > v && !f.var_names[v].empty())
            out << "c var " << (v + 1) << ' ' << f.var_names[v] << '\n';
    out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
    for (const auto& c : f.clauses) {
        for (int lit : c) out << lit << ' ';
        out << "0\n";
    }
    return out.str();
}

inline CnfFormula from_dimacs(std::istream& in) {
    CnfFormula f;
    std::string line;
    int line_no = 0;
    bool header = false;
    std::size_t expected_clauses = 0;
    std::vector<std::pair<int, std::string>> names;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == 'c') {
            std::string c, tag;
            ls >> c >> tag;
            if (tag == "var") {
                int idx = 0;
                std::string name;
                if (!(ls >> idx) || !(ls >> name))
                    throw ContractError("dimacs line " + std::to_string(line_no) +
                                        ": malformed var comment");
                names.emplace_back(idx, name);
            }
            continue;
        }
        if (line[0] == 'p') {
            std::string p, cnf;
            long vars = 0, cls = 0;
            if (!(ls >> p >> cnf >> vars >> cls) || cnf != "cnf" || vars < 0 || cls < 0)
                throw ContractError("dimacs line " + std::to_string(line_no) + ": bad header");
            f.num_vars = static_cast<int>(vars);
            f.var_names.resize(f.num_vars);
            expected_clauses = static_cast<std::size_t>(cls);
            header = true;
            continue;
        }
        if (!header)
            throw ContractError("dimacs line " + std::to_string(line_no) + ": clause before header");
        std::vector<int> clause;
        long lit;
        bool terminated = false;
        while (ls >> lit) {
            if (lit == 0) { terminated = true; break; }
            if (std::abs(lit) > f.num_vars)
                throw ContractError("dimacs line " + std::to_string(line_no) +
                                    ": literal out of range");
            clause.push_back(static_cast<int>(lit));
        }
        if (!terminated)
            throw ContractError("dimacs line " + std::to_string(line_no) + ": missing 0");
        f.add_clause(std::move(clause));
    }
    if (!header) throw ContractError("dimacs: no header");
    if (f.clauses.size() != expected_clauses)
        throw ContractError("dimacs: clause count mismatch (header says " +
                            std::to_string(expected_clauses) + ", got " +
                            std::to_string(f.clauses.size()) + ")");
    for (const auto& [idx, name] : names) {
        if (idx < 1 || idx > f.num_vars)
            throw ContractError("dimacs: var comment index out of range");
        f.var_names[idx - 1] = name;
    }
    return f;
}

}  // namespace cqb
