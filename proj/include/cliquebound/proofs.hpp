#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cliquebound/common.hpp"
#include "cliquebound/formulas.hpp"
#include "cliquebound/measure.hpp"

#include <json.hpp>

namespace cqb {

// --- semantic lines -----------------------------------------------------------

// A proof line as the indicator of the assignments it rules out, stored
// as an explicit bit vector over {0,1}^m. Assignment index: variable v
// sits at bit v-1. The systems studied are semantic, so no syntax is kept.
struct SemanticLine {
    int num_vars = 0;
    std::vector<std::uint64_t> bits;

    static std::uint64_t space(int m) { return std::uint64_t{1} << m; }

    static SemanticLine zeros(int m) {
        if (m < 0 || m > 24) throw BudgetError("SemanticLine: need 0 <= m <= 24");
        SemanticLine l;
        l.num_vars = m;
        l.bits.assign((space(m) + 63) / 64, 0);
        return l;
    }

    static SemanticLine ones(int m) {
        SemanticLine l = zeros(m);
        for (auto& w : l.bits) w = ~0ULL;
        std::uint64_t used = space(m) % 64;
        if (used) l.bits.back() = (std::uint64_t{1} << used) - 1;
        return l;
    }

    bool get(std::uint32_t idx) const { return (bits[idx >> 6] >> (idx & 63)) & 1; }
    void set(std::uint32_t idx) { bits[idx >> 6] |= std::uint64_t{1} << (idx & 63); }

    bool is_ones() const { return *this == ones(num_vars); }

    bool subset_of(const SemanticLine& other) const {
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i] & ~other.bits[i]) return false;
        return true;
    }

    friend bool operator==(const SemanticLine&, const SemanticLine&) = default;
};

// Indicator of the assignments falsifying the clause (a subcube).
inline SemanticLine line_from_clause(const std::vector<int>& clause, int m) {
    SemanticLine l = SemanticLine::zeros(m);
    std::uint32_t fixed_mask = 0, fixed_val = 0;
    for (int lit : clause) {
        int v = std::abs(lit);
        if (v < 1 || v > m) throw ContractError("line_from_clause: literal out of range");
        std::uint32_t bit = 1u << (v - 1);
        if (fixed_mask & bit) throw ContractError("line_from_clause: duplicate variable");
        fixed_mask |= bit;
        if (lit < 0) fixed_val |= bit;  // negative literal falsified when var = 1
    }
    std::uint32_t free_mask = static_cast<std::uint32_t>(SemanticLine::space(m) - 1) & ~fixed_mask;
    std::uint32_t sub = 0;
    while (true) {  // enumerate the subcube of falsifying assignments
        l.set(sub | fixed_val);
        if (sub == free_mask) break;
        sub = (sub - free_mask) & free_mask;
    }
    return l;
}

// --- tree-like semantic refutations ---------------------------------------------

struct RefutationNode {
    int axiom = -1;  // clause index into A for leaves, -1 for inferences
    SemanticLine line;
    int left = -1, right = -1;

    bool is_leaf() const { return axiom >= 0; }
};

struct TreeRefutation {
    int num_vars = 0;
    std::vector<RefutationNode> nodes;
    int root = -1;

    std::size_t size() const { return nodes.size(); }
};

struct RefutationCheck {
    bool ok = true;
    int node_id = -1;
    std::optional<std::uint32_t> witness;
    std::string message;
};

// Checks leaf-axiom membership, the per-inference subset condition and
// the constant-1 root; on failure reports the node and an assignment
// witnessing the violation (lowest index first).
inline RefutationCheck verify_tree_refutation(const TreeRefutation& pi, const CnfFormula& a) {
    RefutationCheck res;
    auto fail = [&](int node, std::optional<std::uint32_t> wit, std::string msg) {
        res.ok = false;
        res.node_id = node;
        res.witness = wit;
        res.message = std::move(msg);
        return res;
    };
    if (pi.num_vars != a.num_vars)
        return fail(-1, std::nullopt, "variable count differs from formula");
    if (pi.root < 0 || pi.root >= static_cast<int>(pi.nodes.size()))
        return fail(-1, std::nullopt, "missing root");
    std::vector<int> indegree(pi.nodes.size(), 0);
    for (int id = 0; id < static_cast<int>(pi.nodes.size()); ++id) {
        const RefutationNode& node = pi.nodes[id];
        if (node.line.num_vars != pi.num_vars)
            return fail(id, std::nullopt, "line over wrong variable count");
        for (int child : {node.left, node.right}) {
            if (child == -1) continue;
            if (child < 0 || child >= static_cast<int>(pi.nodes.size()) || child == id)
                return fail(id, std::nullopt, "bad child reference");
            ++indegree[child];
        }
        if (node.is_leaf()) {
            if (node.left != -1 || node.right != -1)
                return fail(id, std::nullopt, "axiom leaf with children");
            if (node.axiom >= static_cast<int>(a.clauses.size()))
                return fail(id, std::nullopt, "axiom index out of range");
            if (node.line != line_from_clause(a.clauses[node.axiom], pi.num_vars))
                return fail(id, std::nullopt, "leaf line does not match its clause");
        } else {
            if (node.left == -1 && node.right == -1)
                return fail(id, std::nullopt, "inference without premises");
            SemanticLine uni = SemanticLine::zeros(pi.num_vars);
            for (int child : {node.left, node.right})
                if (child != -1)
                    for (std::size_t w = 0; w < uni.bits.size(); ++w)
                        uni.bits[w] |= pi.nodes[child].line.bits[w];
            if (!node.line.subset_of(uni)) {
                for (std::uint32_t idx = 0; idx < SemanticLine::space(pi.num_vars); ++idx)
                    if (node.line.get(idx) && !uni.get(idx))
                        return fail(id, idx, "inference is not semantically sound");
            }
        }
    }
    for (int id = 0; id < static_cast<int>(pi.nodes.size()); ++id) {
        if (indegree[id] > 1) return fail(id, std::nullopt, "line used more than once");
        if (indegree[id] == 0 && id != pi.root)
            return fail(id, std::nullopt, "unreachable node");
    }
    if (!pi.nodes[pi.root].line.is_ones()) {
        for (std::uint32_t idx = 0; idx < SemanticLine::space(pi.num_vars); ++idx)
            if (!pi.nodes[pi.root].line.get(idx))
                return fail(pi.root, idx, "root is not the constant-1 line");
    }
    return res;
}

// --- F-decision trees -------------------------------------------------------------

// Internal nodes query a line; the edge label is the value of the line
// read as a formula, so answer 0 means the assignment is ruled out.
struct DecisionNode {
    int clause = -1;  // leaf label
    SemanticLine query;
    int child0 = -1, child1 = -1;

    bool is_leaf() const { return child0 == -1 && child1 == -1; }
};

struct FDecisionTree {
    int num_vars = 0;
    std::vector<DecisionNode> nodes;
    int root = -1;

    int walk(std::uint32_t assignment) const {
        int cur = root;
        while (!nodes[cur].is_leaf())
            cur = nodes[cur].query.get(assignment) ? nodes[cur].child0 : nodes[cur].child1;
        return cur;
    }

    int depth() const { return depth_below(root); }

    std::size_t leaf_count() const {
        std::size_t c = 0;
        for (const auto& n : nodes)
            if (n.is_leaf()) ++c;
        return c;
    }

private:
    int depth_below(int id) const {
        const DecisionNode& n = nodes[id];
        if (n.is_leaf()) return 0;
        return 1 + std::max(depth_below(n.child0), depth_below(n.child1));
    }
};

struct SearchTreeCheck {
    bool ok = true;
    std::optional<std::uint32_t> counterexample;
    int leaf = -1;
};

inline SearchTreeCheck verify_search_tree(const FDecisionTree& t, const CnfFormula& a) {
    SearchTreeCheck res;
    if (t.num_vars != a.num_vars || t.num_vars > 24)
        throw ContractError("verify_search_tree: variable count mismatch or too large");
    std::vector<std::uint8_t> assign(a.num_vars);
    for (std::uint32_t idx = 0; idx < SemanticLine::space(t.num_vars); ++idx) {
        int leaf = t.walk(idx);
        int clause = t.nodes[leaf].clause;
        if (clause < 0 || clause >= static_cast<int>(a.clauses.size())) {
            res.ok = false;
            res.counterexample = idx;
            res.leaf = leaf;
            return res;
        }
        for (int v = 0; v < a.num_vars; ++v) assign[v] = (idx >> v) & 1;
        if (clause_satisfied(a.clauses[clause], assign)) {
            res.ok = false;
            res.counterexample = idx;
            res.leaf = leaf;
            return res;
        }
    }
    return res;
}

// --- Brent-Spira extraction -------------------------------------------------------

namespace detail {

struct WorkNode {
    int axiom = -1;          // >= 0: real axiom leaf
    SemanticLine line;
    int left = -1, right = -1;
    bool pseudo = false;     // contracted subtree, value known true on this branch
};

struct WorkTree {
    std::vector<WorkNode> nodes;
    int root = -1;
};

// Collapse unary inference chains so every internal node has two children
// (a unary parent is a subset of its child, hence redundant for search).
inline int normalize_rec(const TreeRefutation& pi, int id, WorkTree& out) {
    const RefutationNode& n = pi.nodes[id];
    if (n.is_leaf()) {
        out.nodes.push_back({n.axiom, n.line, -1, -1, false});
        return static_cast<int>(out.nodes.size()) - 1;
    }
    if (n.left == -1 || n.right == -1)
        return normalize_rec(pi, n.left == -1 ? n.right : n.left, out);
    int l = normalize_rec(pi, n.left, out);
    int r = normalize_rec(pi, n.right, out);
    out.nodes.push_back({-1, n.line, l, r, false});
    return static_cast<int>(out.nodes.size()) - 1;
}

inline std::uint64_t subtree_size(const WorkTree& t, int id) {
    const WorkNode& n = t.nodes[id];
    if (n.left == -1) return 1;
    return 1 + subtree_size(t, n.left) + subtree_size(t, n.right);
}

inline void collect_preorder(const WorkTree& t, int id, int depth,
                             std::vector<std::pair<int, int>>& out) {
    out.emplace_back(id, depth);
    const WorkNode& n = t.nodes[id];
    if (n.left != -1) {
        collect_preorder(t, n.left, depth + 1, out);
        collect_preorder(t, n.right, depth + 1, out);
    }
}

inline WorkTree copy_subtree(const WorkTree& t, int id) {
    WorkTree out;
    auto rec = [&](auto&& self, int cur) -> int {
        const WorkNode& n = t.nodes[cur];
        if (n.left == -1) {
            out.nodes.push_back(n);
            return static_cast<int>(out.nodes.size()) - 1;
        }
        int l = self(self, n.left);
        int r = self(self, n.right);
        out.nodes.push_back({n.axiom, n.line, l, r, n.pseudo});
        return static_cast<int>(out.nodes.size()) - 1;
    };
    out.root = rec(rec, id);
    return out;
}

inline WorkTree contract_subtree(const WorkTree& t, int contract_id) {
    WorkTree out;
    auto rec = [&](auto&& self, int cur) -> int {
        const WorkNode& n = t.nodes[cur];
        if (cur == contract_id || n.left == -1) {
            WorkNode leaf = n;
            if (cur == contract_id) {
                leaf.left = leaf.right = -1;
                leaf.axiom = -1;
                leaf.pseudo = true;
            }
            out.nodes.push_back(leaf);
            return static_cast<int>(out.nodes.size()) - 1;
        }
        int l = self(self, n.left);
        int r = self(self, n.right);
        out.nodes.push_back({n.axiom, n.line, l, r, n.pseudo});
        return static_cast<int>(out.nodes.size()) - 1;
    };
    out.root = rec(rec, t.root);
    return out;
}

inline int extract_rec(const WorkTree& tree, FDecisionTree& out) {
    std::uint64_t size = subtree_size(tree, tree.root);
    if (size <= 3) {
        // query the remaining real axioms directly; the last one need not
        // be asked since some real leaf must be falsified on this branch
        std::vector<std::pair<int, int>> order;
        collect_preorder(tree, tree.root, 0, order);
        std::vector<int> axioms;
        for (auto [id, depth] : order)
            if (tree.nodes[id].axiom >= 0) axioms.push_back(id);
        if (axioms.empty()) {
            out.nodes.push_back({0, {}, -1, -1});  // branch unreachable by any assignment
            return static_cast<int>(out.nodes.size()) - 1;
        }
        int next = -1;
        for (std::size_t i = axioms.size(); i-- > 0;) {
            const WorkNode& leaf_node = tree.nodes[axioms[i]];
            if (next == -1) {
                out.nodes.push_back({leaf_node.axiom, {}, -1, -1});
                next = static_cast<int>(out.nodes.size()) - 1;
            } else {
                out.nodes.push_back({leaf_node.axiom, {}, -1, -1});
                int hit = static_cast<int>(out.nodes.size()) - 1;
                out.nodes.push_back({-1, leaf_node.line, hit, next});
                next = static_cast<int>(out.nodes.size()) - 1;
            }
        }
        return next;
    }

    std::vector<std::pair<int, int>> order;
    collect_preorder(tree, tree.root, 0, order);
    int pick = -1, pick_depth = -1;
    for (auto [id, depth] : order) {
        std::uint64_t sz = subtree_size(tree, id);
        if (3 * sz < size || 3 * sz > 2 * size) continue;
        if (depth > pick_depth) {  // deepest, then leftmost (preorder keeps first)
            pick = id;
            pick_depth = depth;
        }
    }
    if (pick == -1)
        throw VerificationError("balance_extract: no subtree in the balancing window");

    WorkTree inside = copy_subtree(tree, pick);
    WorkTree outside = contract_subtree(tree, pick);
    int child0 = extract_rec(inside, out);     // answer 0: line rules the assignment out
    int child1 = extract_rec(outside, out);    // answer 1: continue in the pruned proof
    out.nodes.push_back({-1, tree.nodes[pick].line, child0, child1});
    return static_cast<int>(out.nodes.size()) - 1;
}

}  // namespace detail

// Brent-Spira balancing: repeatedly query the line of a subtree holding
// between a third and two thirds of the proof. Depth is at most
// ceil(log_{3/2}|pi|) + 2 and every leaf is an original axiom.
inline FDecisionTree balance_extract(const TreeRefutation& pi, const CnfFormula& a) {
    RefutationCheck chk = verify_tree_refutation(pi, a);
    if (!chk.ok)
        throw ContractError("balance_extract: refutation does not verify: " + chk.message);
    detail::WorkTree work;
    work.root = detail::normalize_rec(pi, pi.root, work);
    FDecisionTree out;
    out.num_vars = pi.num_vars;
    out.root = detail::extract_rec(work, out);
    return out;
}

// Smallest t with (3/2)^t >= s, exactly.
inline int log_three_halves_ceil(std::uint64_t s) {
    BigInt p3 = 1, p2s = s;
    int t = 0;
    while (p3 < p2s) {
        p3 *= 3;
        p2s *= 2;
        ++t;
    }
    return t;
}

// --- the Q-map and leaf certificates ----------------------------------------------

// Tuples whose witnessing assignment the line rules out.
inline TupleSet q_map(const SemanticLine& line, const WitnessMap& wm) {
    if (line.num_vars != wm.num_x_vars())
        throw ContractError("q_map: line variable count does not match the encoding");
    std::uint64_t total = tuple_space_size(wm.n, wm.k);
    check_budget(total, "q_map");
    TupleSet q{wm.n, wm.k, {}};
    for (std::uint64_t r = 0; r < total; ++r) {
        Tuple t = TupleSet::unrank(wm.n, wm.k, r);
        if (line.get(wm.assignment_index(t))) q.ranks.push_back(r);
    }
    return q;
}

// Q_l per leaf: tuples whose witnessing assignment reaches the leaf. The
// walks assign every tuple to exactly one leaf, so the sets partition T.
inline std::vector<std::pair<int, TupleSet>> leaf_tuple_sets(const FDecisionTree& t,
                                                             const WitnessMap& wm) {
    if (t.num_vars != wm.num_x_vars())
        throw ContractError("leaf_tuple_sets: tree is not over the encoding's X variables");
    std::uint64_t total = tuple_space_size(wm.n, wm.k);
    check_budget(total, "leaf_tuple_sets");
    std::map<int, std::vector<std::uint64_t>> buckets;
    for (int id = 0; id < static_cast<int>(t.nodes.size()); ++id)
        if (t.nodes[id].is_leaf()) buckets[id];
    for (std::uint64_t r = 0; r < total; ++r) {
        Tuple tup = TupleSet::unrank(wm.n, wm.k, r);
        buckets[t.walk(wm.assignment_index(tup))].push_back(r);
    }
    std::vector<std::pair<int, TupleSet>> out;
    out.reserve(buckets.size());
    for (auto& [leaf, ranks] : buckets) {
        TupleSet q{wm.n, wm.k, std::move(ranks)};
        out.emplace_back(leaf, std::move(q));
    }
    return out;
}

// Some missing edge of G shared by all tuples of q, in canonical pair
// order; empty optional when the tuples have no common non-edge.
inline std::optional<std::pair<Vertex, Vertex>> detect_missing_edge(const TupleSet& q,
                                                                    const KPartiteGraph& g) {
    if (q.ranks.empty()) throw ContractError("detect_missing_edge: empty tuple set");
    if (q.n != g.n() || q.k != g.k()) throw ContractError("detect_missing_edge: dimensions");
    int k = g.k();
    Tuple first = TupleSet::unrank(q.n, q.k, q.ranks.front());
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            bool common = true;
            for (std::uint64_t r : q.ranks) {
                Tuple t = TupleSet::unrank(q.n, q.k, r);
                if (t[i] != first[i] || t[j] != first[j]) { common = false; break; }
            }
            if (!common) continue;
            Vertex a{i, first[i]}, b{j, first[j]};
            if (!g.has_edge(a, b)) return std::make_pair(a, b);
        }
    }
    return std::nullopt;
}

struct LeafCertificateEntry {
    int leaf_node = -1;
    int clause = -1;
    std::size_t tuples = 0;
    Rational mu;
    std::optional<std::array<int, 4>> missing_edge;  // (block,index,block,index)
};

struct LeafCertificate {
    std::vector<LeafCertificateEntry> leaves;
    Rational mu_total;
    std::optional<BigInt> bound;  // ceil(mu(T) / max mu(Q_l)), when all positive
    std::size_t leaf_count = 0;
    int depth = 0;
};

// Measure-based leaf-count lower bound: the Q_l partition T, their
// measures add up to mu(T) exactly, and when every leaf measure is
// positive no tree can have fewer than mu(T)/max mu(Q_l) leaves.
inline LeafCertificate certify_leaf_lower_bound(const FDecisionTree& t, const MeasureContext& ctx,
                                                const WitnessMap& wm) {
    if (ctx.graph().n() != wm.n || ctx.graph().k() != wm.k)
        throw ContractError("certify_leaf_lower_bound: context does not match encoding");
    LeafCertificate cert;
    cert.depth = t.depth();
    Rational sum(0);
    std::optional<Rational> max_mu;
    bool all_positive = true;
    for (auto& [leaf, q] : leaf_tuple_sets(t, wm)) {
        LeafCertificateEntry entry;
        entry.leaf_node = leaf;
        entry.clause = t.nodes[leaf].clause;
        entry.tuples = q.size();
        entry.mu = mu_set(ctx, q);
        if (!q.ranks.empty()) {
            if (auto e = detect_missing_edge(q, ctx.graph()))
                entry.missing_edge = {{e->first.block, e->first.index, e->second.block,
                                       e->second.index}};
        }
        sum += entry.mu;
        if (entry.mu <= 0) all_positive = false;
        if (!max_mu || entry.mu > *max_mu) max_mu = entry.mu;
        cert.leaves.push_back(std::move(entry));
    }
    cert.leaf_count = cert.leaves.size();
    cert.mu_total = mu_whole_space(ctx);
    if (sum != cert.mu_total)
        throw VerificationError("certify_leaf_lower_bound: leaf measures do not sum to mu(T)");
    if (all_positive && max_mu && *max_mu > 0) {
        Rational ratio = cert.mu_total / *max_mu;
        BigInt b;
        mpz_cdiv_q(b.get_mpz_t(), ratio.get_num().get_mpz_t(), ratio.get_den().get_mpz_t());
        cert.bound = b;
    }
    return cert;
}

// --- resolution front-end -----------------------------------------------------------

struct ResolutionNode {
    std::vector<int> clause;  // sorted by variable
    int left = -1, right = -1;
    int pivot = 0;  // variable resolved on (internal nodes)

    bool is_leaf() const { return left == -1 && right == -1; }
};

struct ResolutionProof {
    int num_vars = 0;
    std::vector<ResolutionNode> nodes;
    int root = -1;
};

namespace detail {

inline std::vector<int> sorted_clause(std::vector<int> c) {
    std::sort(c.begin(), c.end(), [](int a, int b) { return std::abs(a) < std::abs(b); });
    return c;
}

inline std::vector<int> resolve_clauses(const std::vector<int>& c0, const std::vector<int>& c1,
                                        int pivot) {
    std::vector<int> out;
    for (int lit : c0)
        if (lit != pivot) out.push_back(lit);
    for (int lit : c1) {
        if (lit == -pivot) continue;
        bool dup = false;
        for (int seen : out) {
            if (seen == lit) { dup = true; break; }
            if (seen == -lit)
                throw ContractError("resolution: tautological resolvent");
        }
        if (!dup) out.push_back(lit);
    }
    return sorted_clause(out);
}

}  // namespace detail

// Node-for-node conversion of a tree resolution refutation into semantic
// lines; rejects invalid resolution steps and leaves outside A.
inline TreeRefutation resolution_to_semantic(const ResolutionProof& res, const CnfFormula& a) {
    TreeRefutation pi;
    pi.num_vars = a.num_vars;
    pi.nodes.resize(res.nodes.size());
    for (int id = 0; id < static_cast<int>(res.nodes.size()); ++id) {
        const ResolutionNode& n = res.nodes[id];
        RefutationNode& out = pi.nodes[id];
        std::vector<int> clause = detail::sorted_clause(n.clause);
        if (n.is_leaf()) {
            int found = -1;
            for (int ci = 0; ci < static_cast<int>(a.clauses.size()); ++ci)
                if (a.clauses[ci] == clause) { found = ci; break; }
            if (found < 0) throw ContractError("resolution leaf clause is not an axiom of A");
            out.axiom = found;
        } else {
            if (n.left < 0 || n.right < 0 || n.left >= id || n.right >= id)
                throw ContractError("resolution node children must precede it");
            const auto& c0 = res.nodes[n.left].clause;
            const auto& c1 = res.nodes[n.right].clause;
            bool has_pos = std::find(c0.begin(), c0.end(), n.pivot) != c0.end();
            bool has_neg = std::find(c1.begin(), c1.end(), -n.pivot) != c1.end();
            if (n.pivot < 1 || !has_pos || !has_neg)
                throw ContractError("invalid resolution step at node " + std::to_string(id));
            if (detail::resolve_clauses(c0, c1, n.pivot) != clause)
                throw ContractError("resolvent mismatch at node " + std::to_string(id));
            out.left = n.left;
            out.right = n.right;
        }
        out.line = line_from_clause(clause, a.num_vars);
    }
    pi.root = res.root;
    if (pi.root < 0 || !res.nodes[pi.root].clause.empty())
        throw ContractError("resolution proof does not derive the empty clause");
    return pi;
}

// Plain splitting search producing a tree resolution refutation of an
// unsatisfiable formula (first unassigned variable, branch 0 before 1).
// Returns nothing when the formula is satisfiable.
inline std::optional<ResolutionProof> tree_resolution_refute(const CnfFormula& f) {
    if (f.num_vars > 24) throw BudgetError("tree_resolution_refute: more than 24 variables");
    ResolutionProof proof;
    proof.num_vars = f.num_vars;
    std::vector<int> assign(f.num_vars, -1);  // -1 unassigned

    auto falsified = [&](const std::vector<int>& clause) {
        for (int lit : clause) {
            int v = std::abs(lit) - 1;
            if (assign[v] == -1 || assign[v] == (lit > 0 ? 1 : 0)) return false;
        }
        return true;
    };

    // returns node index deriving a clause falsified by the current branch
    auto solve = [&](auto&& self) -> std::optional<int> {
        for (std::size_t ci = 0; ci < f.clauses.size(); ++ci) {
            if (falsified(f.clauses[ci])) {
                proof.nodes.push_back({detail::sorted_clause(f.clauses[ci]), -1, -1, 0});
                return static_cast<int>(proof.nodes.size()) - 1;
            }
        }
        int var = -1;
        for (int v = 0; v < f.num_vars; ++v)
            if (assign[v] == -1) { var = v; break; }
        if (var == -1) return std::nullopt;  // total assignment satisfies f

        assign[var] = 0;
        std::optional<int> n0 = self(self);
        assign[var] = -1;
        if (!n0) return std::nullopt;
        const auto& c0 = proof.nodes[*n0].clause;
        if (std::find(c0.begin(), c0.end(), var + 1) == c0.end()) return n0;

        assign[var] = 1;
        std::optional<int> n1 = self(self);
        assign[var] = -1;
        if (!n1) return std::nullopt;
        const auto& c1 = proof.nodes[*n1].clause;
        if (std::find(c1.begin(), c1.end(), -(var + 1)) == c1.end()) return n1;

        ResolutionNode step;
        step.clause = detail::resolve_clauses(proof.nodes[*n0].clause, c1, var + 1);
        step.left = *n0;
        step.right = *n1;
        step.pivot = var + 1;
        proof.nodes.push_back(std::move(step));
        return static_cast<int>(proof.nodes.size()) - 1;
    };

    std::optional<int> root = solve(solve);
    if (!root) return std::nullopt;
    proof.root = *root;
    return proof;
}

// --- serialization -------------------------------------------------------------------

inline std::string line_to_hex(const SemanticLine& l) {
    std::uint64_t nibbles = (SemanticLine::space(l.num_vars) + 3) / 4;
    std::string out(nibbles, '0');
    for (std::uint64_t i = 0; i < nibbles; ++i) {
        int v = 0;
        for (int b = 0; b < 4; ++b) {
            std::uint64_t idx = i * 4 + b;
            if (idx < SemanticLine::space(l.num_vars) && l.get(static_cast<std::uint32_t>(idx)))
                v |= 1 << b;
        }
        out[nibbles - 1 - i] = "0123456789abcdef"[v];
    }
    return out;
}

inline SemanticLine line_from_hex(const std::string& hex, int m) {
    SemanticLine l = SemanticLine::zeros(m);
    std::uint64_t nibbles = (SemanticLine::space(m) + 3) / 4;
    if (hex.size() != nibbles)
        throw ContractError("line_from_hex: expected " + std::to_string(nibbles) + " hex digits");
    for (std::uint64_t i = 0; i < nibbles; ++i) {
        char c = hex[nibbles - 1 - i];
        int v = c >= '0' && c <= '9' ? c - '0'
              : c >= 'a' && c <= 'f' ? c - 'a' + 10
              : c >= 'A' && c <= 'F' ? c - 'A' + 10
                                     : -1;
        if (v < 0) throw ContractError("line_from_hex: bad hex digit");
        for (int b = 0; b < 4; ++b)
            if (v >> b & 1) l.set(static_cast<std::uint32_t>(i * 4 + b));
    }
    return l;
}

inline nlohmann::json refutation_to_json(const TreeRefutation& pi) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : pi.nodes) {
        nlohmann::json jn;
        if (n.is_leaf()) {
            jn["kind"] = "axiom";
            jn["clause"] = n.axiom;
        } else {
            jn["kind"] = "inference";
            jn["line"] = line_to_hex(n.line);
            nlohmann::json children = nlohmann::json::array();
            if (n.left != -1) children.push_back(n.left);
            if (n.right != -1) children.push_back(n.right);
            jn["children"] = children;
        }
        nodes.push_back(jn);
    }
    return nlohmann::json{{"num_vars", pi.num_vars}, {"root", pi.root}, {"nodes", nodes}};
}

inline TreeRefutation refutation_from_json(const nlohmann::json& j, const CnfFormula& a) {
    TreeRefutation pi;
    pi.num_vars = j.at("num_vars").get<int>();
    pi.root = j.at("root").get<int>();
    for (const auto& jn : j.at("nodes")) {
        RefutationNode n;
        if (jn.at("kind") == "axiom") {
            n.axiom = jn.at("clause").get<int>();
            if (n.axiom < 0 || n.axiom >= static_cast<int>(a.clauses.size()))
                throw ContractError("refutation_from_json: axiom index out of range");
            n.line = line_from_clause(a.clauses[n.axiom], pi.num_vars);
        } else {
            n.line = line_from_hex(jn.at("line").get<std::string>(), pi.num_vars);
            const auto& ch = jn.at("children");
            if (ch.size() >= 1) n.left = ch.at(0).get<int>();
            if (ch.size() >= 2) n.right = ch.at(1).get<int>();
        }
        pi.nodes.push_back(std::move(n));
    }
    return pi;
}

inline nlohmann::json decision_tree_to_json(const FDecisionTree& t) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) {
        nlohmann::json jn;
        if (n.is_leaf()) {
            jn["kind"] = "leaf";
            jn["clause"] = n.clause;
        } else {
            jn["kind"] = "query";
            jn["line"] = line_to_hex(n.query);
            jn["child0"] = n.child0;
            jn["child1"] = n.child1;
        }
        nodes.push_back(jn);
    }
    return nlohmann::json{{"num_vars", t.num_vars}, {"root", t.root}, {"nodes", nodes}};
}

inline nlohmann::json certificate_to_json(const LeafCertificate& cert) {
    nlohmann::json leaves = nlohmann::json::array();
    for (const auto& e : cert.leaves) {
        nlohmann::json jl{{"leaf", e.leaf_node},
                          {"clause", e.clause},
                          {"tuples", e.tuples},
                          {"mu", rat_to_string(e.mu)}};
        if (e.missing_edge) jl["missing_edge"] = *e.missing_edge;
        leaves.push_back(jl);
    }
    nlohmann::json j{{"leaves", leaves},
                     {"mu_total", rat_to_string(cert.mu_total)},
                     {"leaf_count", cert.leaf_count},
                     {"depth", cert.depth}};
    if (cert.bound) j["bound"] = cert.bound->get_str();
    return j;
}

}  // namespace cqb
