#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cliquebound/common.hpp"
#include "cliquebound/rational.hpp"
#include "cliquebound/rng.hpp"

#include <json.hpp>

namespace cqb {

// A vertex of a k-partite graph: (block, local index), both 0-based.
struct Vertex {
    int block = 0;
    int index = 0;
    friend bool operator==(const Vertex&, const Vertex&) = default;
    friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

// One vertex per block, entry i = local index chosen in block i.
using Tuple = std::vector<int>;

struct SampleParams {
    int n = 0;
    int k = 0;
    Rational p = Rational(1, 2);
    std::uint64_t seed = 0;
};

// k-partite graph with blocks of size n. Immutable once built; adjacency
// is a bit matrix over global vertex ids, so edge queries are O(1).
class KPartiteGraph {
public:
    KPartiteGraph(int n, int k) : n_(n), k_(k) {
        if (n < 1 || k < 1) throw ContractError("KPartiteGraph: need n >= 1, k >= 1");
        words_ = (static_cast<std::size_t>(n) * k + 63) / 64;
        adj_.assign(static_cast<std::size_t>(n) * k * words_, 0);
    }

    int n() const { return n_; }
    int k() const { return k_; }
    int num_vertices() const { return n_ * k_; }

    int vertex_id(Vertex v) const {
        if (v.block < 0 || v.block >= k_ || v.index < 0 || v.index >= n_)
            throw ContractError("vertex out of range");
        return v.block * n_ + v.index;
    }
    Vertex vertex_of(int id) const { return {id / n_, id % n_}; }

    void add_edge(Vertex u, Vertex v) {
        int a = vertex_id(u), b = vertex_id(v);
        if (u.block == v.block)
            throw ContractError("intra-block edge rejected");
        if (test_bit(a, b)) return;
        set_bit(a, b);
        set_bit(b, a);
        ++edge_count_;
    }

    bool has_edge(Vertex u, Vertex v) const {
        return test_bit(vertex_id(u), vertex_id(v));
    }
    bool has_edge_ids(int a, int b) const { return test_bit(a, b); }

    int edge_count() const { return edge_count_; }

    // Canonical cross-block pair enumeration: pairs ordered by
    // (b1, b2, i, j) with b1 < b2; this order keys the sampling RNG.
    std::uint64_t num_cross_pairs() const {
        return static_cast<std::uint64_t>(k_) * (k_ - 1) / 2 *
               static_cast<std::uint64_t>(n_) * n_;
    }

    std::array<Vertex, 2> cross_pair(std::uint64_t idx) const {
        std::uint64_t per_block_pair = static_cast<std::uint64_t>(n_) * n_;
        std::uint64_t bp = idx / per_block_pair, r = idx % per_block_pair;
        int b1 = 0;
        std::uint64_t skip = k_ - 1;
        while (bp >= skip) { bp -= skip; ++b1; skip = static_cast<std::uint64_t>(k_ - 1 - b1); }
        int b2 = b1 + 1 + static_cast<int>(bp);
        return {Vertex{b1, static_cast<int>(r / n_)}, Vertex{b2, static_cast<int>(r % n_)}};
    }

    // Edges as sorted (b1,i,b2,j) quadruples, b1 < b2.
    std::vector<std::array<int, 4>> edges() const {
        std::vector<std::array<int, 4>> out;
        for (std::uint64_t idx = 0; idx < num_cross_pairs(); ++idx) {
            auto [u, v] = cross_pair(idx);
            if (has_edge(u, v)) out.push_back({u.block, u.index, v.block, v.index});
        }
        return out;
    }

    // Bitmask (over local indices) of the neighbours of u inside block b.
    std::uint64_t neighbors_in_block_mask(Vertex u, int b) const {
        if (n_ > 64) throw BudgetError("block mask limited to n <= 64");
        int uid = vertex_id(u);
        std::uint64_t mask = 0;
        for (int i = 0; i < n_; ++i)
            if (test_bit(uid, b * n_ + i)) mask |= (1ULL << i);
        return mask;
    }

    std::optional<Rational> sample_p;
    std::optional<std::uint64_t> sample_seed;

private:
    bool test_bit(int a, int b) const {
        return (adj_[static_cast<std::size_t>(a) * words_ + b / 64] >> (b % 64)) & 1;
    }
    void set_bit(int a, int b) {
        adj_[static_cast<std::size_t>(a) * words_ + b / 64] |= (1ULL << (b % 64));
    }

    int n_, k_;
    std::size_t words_;
    std::vector<std::uint64_t> adj_;
    int edge_count_ = 0;
};

// G(n,k,p): every cross-block pair included independently with probability
// p, decided by comparing a per-pair 64-bit draw against the threshold
// ceil(num * 2^64 / den). The acceptance probability is exact whenever
// den divides num * 2^64 (e.g. dyadic p) and off by < 2^-64 otherwise.
inline KPartiteGraph sample_kpartite(const SampleParams& params) {
    if (params.p <= 0 || params.p > 1)
        throw ContractError("sample_kpartite: need 0 < p <= 1");
    KPartiteGraph g(params.n, params.k);
    BigInt scaled = params.p.get_num() << 64;
    BigInt threshold = (scaled + params.p.get_den() - 1) / params.p.get_den();
    bool always = params.p == 1;
    std::uint64_t t64 = always ? ~0ULL : threshold.get_ui();
    if (!always && mpz_sizeinbase(threshold.get_mpz_t(), 2) > 64)
        throw ContractError("sample_kpartite: threshold overflow");
    for (std::uint64_t idx = 0; idx < g.num_cross_pairs(); ++idx) {
        std::uint64_t r = rng_at(params.seed, idx);
        if (always || r < t64) {
            auto [u, v] = g.cross_pair(idx);
            g.add_edge(u, v);
        }
    }
    g.sample_p = params.p;
    g.sample_seed = params.seed;
    return g;
}

// Best rational approximation of n^(-2/D) with |q - n^(-2/D)| <= 1e-9.
// When 2/D reduces to p/q with n a perfect q-th power the value is exact.
inline Rational rational_edge_probability(long n, const Rational& d_param) {
    if (n < 2) throw ContractError("rational_edge_probability: need n >= 2");
    if (d_param <= 0) throw ContractError("rational_edge_probability: need D > 0");
    Rational expo = Rational(2) / d_param;  // q = n^-expo
    expo.canonicalize();
    if (expo.get_num().fits_slong_p() && expo.get_den().fits_slong_p()) {
        long p = expo.get_num().get_si(), q = expo.get_den().get_si();
        long root = std::lround(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(q)));
        for (long cand = std::max(1L, root - 1); cand <= root + 1; ++cand) {
            BigInt pw = int_pow(BigInt(cand), static_cast<unsigned long>(q));
            if (pw == n)
                return make_rational(BigInt(1), int_pow(BigInt(cand), static_cast<unsigned long>(p)));
        }
    }
    long double x = std::exp(-static_cast<long double>(rat_to_double(expo)) *
                             std::log(static_cast<long double>(n)));
    // continued-fraction convergents; stop at the first within tolerance
    long double target = x;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    long double frac = target;
    for (int iter = 0; iter < 64; ++iter) {
        long long a = static_cast<long long>(std::floor(frac));
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > 2'000'000'000LL) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (q1 > 0 && std::abs(static_cast<long double>(p1) / q1 - target) <= 1e-9L) break;
        long double rem = frac - a;
        if (rem < 1e-15L) break;
        frac = 1.0L / rem;
    }
    return make_rational(static_cast<long>(p1), static_cast<long>(q1));
}

inline void validate_tuple(const KPartiteGraph& g, const Tuple& t) {
    if (static_cast<int>(t.size()) != g.k())
        throw ContractError("tuple has wrong number of blocks");
    for (int v : t)
        if (v < 0 || v >= g.n()) throw ContractError("tuple index out of range");
}

inline bool is_clique(const KPartiteGraph& g, const Tuple& t) {
    validate_tuple(g, t);
    for (int b1 = 0; b1 < g.k(); ++b1)
        for (int b2 = b1 + 1; b2 < g.k(); ++b2)
            if (!g.has_edge({b1, t[b1]}, {b2, t[b2]})) return false;
    return true;
}

inline std::uint64_t tuple_space_size(int n, int k) {
    std::uint64_t total = 1;
    for (int i = 0; i < k; ++i) {
        if (total > enumeration_budget() * 2) return ~0ULL;
        total *= static_cast<std::uint64_t>(n);
    }
    return total;
}

// Exact k-clique count by block-wise extension with running common
// neighbourhoods; the n^k budget guards the degenerate worst case.
inline std::uint64_t count_k_cliques(const KPartiteGraph& g) {
    check_budget(tuple_space_size(g.n(), g.k()), "count_k_cliques");
    if (g.n() > 64) throw BudgetError("count_k_cliques: n > 64 unsupported");
    std::uint64_t full = g.n() == 64 ? ~0ULL : ((1ULL << g.n()) - 1);
    std::uint64_t count = 0;
    std::vector<std::pair<int, std::uint64_t>> stack;  // (chosen in block0.., candidates for next)
    // depth-first over blocks; cand[b] = vertices of block b adjacent to all chosen
    std::vector<int> choice(g.k(), -1);
    std::vector<std::uint64_t> cand(g.k() + 1, 0);
    int depth = 0;
    cand[0] = full;
    std::vector<std::uint64_t> iter(g.k(), 0);
    iter[0] = cand[0];
    while (depth >= 0) {
        if (depth == g.k()) { ++count; --depth; continue; }
        if (iter[depth] == 0) { --depth; continue; }
        int v = std::countr_zero(iter[depth]);
        iter[depth] &= iter[depth] - 1;
        choice[depth] = v;
        if (depth + 1 == g.k()) { ++count; continue; }
        std::uint64_t next = full;
        for (int b = 0; b <= depth; ++b)
            next &= g.neighbors_in_block_mask({b, choice[b]}, depth + 1);
        cand[depth + 1] = next;
        iter[depth + 1] = next;
        ++depth;
    }
    return count;
}

// |V_i ∩ ⋂_{u in partial} N(u)| for a partial tuple with at most one
// vertex per block, none of them in block i.
inline int common_neighborhood_size(const KPartiteGraph& g,
                                    const std::vector<Vertex>& partial, int block_i) {
    if (block_i < 0 || block_i >= g.k()) throw ContractError("block index out of range");
    std::vector<bool> used(g.k(), false);
    for (const Vertex& u : partial) {
        g.vertex_id(u);
        if (u.block == block_i) throw ContractError("partial tuple touches target block");
        if (used[u.block]) throw ContractError("partial tuple repeats a block");
        used[u.block] = true;
    }
    if (g.n() > 64) throw BudgetError("common_neighborhood_size: n > 64 unsupported");
    std::uint64_t mask = g.n() == 64 ? ~0ULL : ((1ULL << g.n()) - 1);
    for (const Vertex& u : partial) mask &= g.neighbors_in_block_mask(u, block_i);
    return std::popcount(mask);
}

// Companion report: sweep all a-tuples with 1 <= a <= floor(D/4) and flag
// common neighbourhoods outside the (1 +- 1/k) p^a n window.
struct NeighborhoodReport {
    std::uint64_t checked = 0;
    std::uint64_t violations = 0;
};

inline NeighborhoodReport neighborhood_report(const KPartiteGraph& g, const Rational& p,
                                              const Rational& d_cap) {
    NeighborhoodReport rep;
    long a_max = static_cast<long>(rat_to_double(d_cap / 4));
    int k = g.k(), n = g.n();
    std::vector<int> blocks;
    Rational lo_f = Rational(k - 1, k), hi_f = Rational(k + 1, k);
    for (long a = 1; a <= a_max && a < k; ++a) {
        Rational expectation = rat_pow(p, a) * n;
        Rational lo = lo_f * expectation, hi = hi_f * expectation;
        std::vector<int> combo(a);
        for (int i = 0; i < a; ++i) combo[i] = i;
        while (true) {
            std::vector<int> assign(a, 0);
            while (true) {
                std::vector<Vertex> partial(a);
                for (int i = 0; i < a; ++i) partial[i] = {combo[i], assign[i]};
                for (int bi = 0; bi < k; ++bi) {
                    if (std::find(combo.begin(), combo.end(), bi) != combo.end()) continue;
                    int size = common_neighborhood_size(g, partial, bi);
                    ++rep.checked;
                    if (Rational(size) < lo || Rational(size) > hi) ++rep.violations;
                }
                int pos = a - 1;
                while (pos >= 0 && assign[pos] == n - 1) assign[pos--] = 0;
                if (pos < 0) break;
                ++assign[pos];
            }
            int pos = a - 1;
            while (pos >= 0 && combo[pos] == k - (a - pos)) --pos;
            if (pos < 0) break;
            ++combo[pos];
            for (int i = pos + 1; i < a; ++i) combo[i] = combo[i - 1] + 1;
        }
    }
    return rep;
}

// --- serialization ---------------------------------------------------------

inline nlohmann::json graph_to_json(const KPartiteGraph& g) {
    nlohmann::json j;
    j["n"] = g.n();
    j["k"] = g.k();
    j["edges"] = g.edges();
    if (g.sample_p) j["p"] = rat_to_string(*g.sample_p);
    if (g.sample_seed) j["seed"] = *g.sample_seed;
    return j;
}

inline KPartiteGraph graph_from_json(const nlohmann::json& j) {
    KPartiteGraph g(j.at("n").get<int>(), j.at("k").get<int>());
    for (const auto& e : j.at("edges")) {
        g.add_edge({e.at(0).get<int>(), e.at(1).get<int>()},
                   {e.at(2).get<int>(), e.at(3).get<int>()});
    }
    if (j.contains("p")) g.sample_p = rat_from_string(j.at("p").get<std::string>());
    if (j.contains("seed")) g.sample_seed = j.at("seed").get<std::uint64_t>();
    return g;
}

// Plain text interop: first line "n k", then one "b1 i1 b2 i2" per edge.
inline void write_edge_list(const KPartiteGraph& g, std::ostream& out) {
    out << g.n() << ' ' << g.k() << '\n';
    for (const auto& e : g.edges())
        out << e[0] << ' ' << e[1] << ' ' << e[2] << ' ' << e[3] << '\n';
}

inline KPartiteGraph read_edge_list(std::istream& in) {
    int n = 0, k = 0;
    if (!(in >> n >> k)) throw ContractError("edge list: missing 'n k' header");
    KPartiteGraph g(n, k);
    int b1, i1, b2, i2;
    while (in >> b1 >> i1 >> b2 >> i2) g.add_edge({b1, i1}, {b2, i2});
    return g;
}

}  // namespace cqb
