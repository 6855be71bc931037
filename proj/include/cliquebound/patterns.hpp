#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cliquebound/common.hpp"
#include "cliquebound/rational.hpp"

#include <json.hpp>

namespace cqb {

// Graphs over the block index set [k], k <= 16, stored as a bitmask over
// the (k choose 2) pair slots. Slot order is lexicographic on (min,max):
// slot(a,b) = a*k - a*(a+1)/2 + (b-a-1) for 0 <= a < b < k.
using EdgeMask = unsigned __int128;

constexpr int kMaxPatternK = 16;

inline int num_slots(int k) { return k * (k - 1) / 2; }

inline int slot_index(int k, int a, int b) {
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= k || a == b) throw ContractError("bad pair over [k]");
    return a * k - a * (a + 1) / 2 + (b - a - 1);
}

inline std::pair<int, int> slot_pair(int k, int slot) {
    for (int a = 0; a < k; ++a) {
        int row = k - 1 - a;
        if (slot < row) return {a, a + 1 + slot};
        slot -= row;
    }
    throw ContractError("slot out of range");
}

inline int popcount128(EdgeMask m) {
    return std::popcount(static_cast<std::uint64_t>(m)) +
           std::popcount(static_cast<std::uint64_t>(m >> 64));
}

inline int lowest_bit128(EdgeMask m) {
    auto lo = static_cast<std::uint64_t>(m);
    if (lo) return std::countr_zero(lo);
    return 64 + std::countr_zero(static_cast<std::uint64_t>(m >> 64));
}

inline std::string mask_to_string(EdgeMask m) {
    if (m == 0) return "0";
    std::string s;
    while (m > 0) { s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(m % 10))); m /= 10; }
    return s;
}

struct PatternGraph {
    int k = 0;
    EdgeMask edges = 0;
    friend bool operator==(const PatternGraph&, const PatternGraph&) = default;
};

// All slots incident to vertex v.
inline EdgeMask star_mask(int k, int v) {
    EdgeMask m = 0;
    for (int u = 0; u < k; ++u)
        if (u != v) m |= EdgeMask(1) << slot_index(k, std::min(u, v), std::max(u, v));
    return m;
}

// Non-isolated vertices as a bitmask over [k].
inline std::uint32_t touched_vertices(int k, EdgeMask edges) {
    std::uint32_t verts = 0;
    while (edges) {
        int s = lowest_bit128(edges);
        edges &= edges - 1;
        auto [a, b] = slot_pair(k, s);
        verts |= (1u << a) | (1u << b);
    }
    return verts;
}

// Slots with both endpoints inside the vertex set.
inline EdgeMask slots_within(int k, std::uint32_t verts) {
    EdgeMask m = 0;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            if ((verts >> a & 1) && (verts >> b & 1))
                m |= EdgeMask(1) << slot_index(k, a, b);
    return m;
}

namespace detail {

struct MaskHash {
    std::size_t operator()(EdgeMask m) const {
        auto lo = static_cast<std::uint64_t>(m), hi = static_cast<std::uint64_t>(m >> 64);
        return static_cast<std::size_t>((lo ^ (hi * 0x9e3779b97f4a7c15ULL)) * 0xbf58476d1ce4e5b9ULL);
    }
};

inline int vc_rec(int k, EdgeMask m, std::unordered_map<EdgeMask, int, MaskHash>& memo) {
    if (m == 0) return 0;
    auto it = memo.find(m);
    if (it != memo.end()) return it->second;
    auto [a, b] = slot_pair(k, lowest_bit128(m));
    int va = vc_rec(k, m & ~star_mask(k, a), memo);
    int vb = vc_rec(k, m & ~star_mask(k, b), memo);
    int res = 1 + std::min(va, vb);
    memo.emplace(m, res);
    return res;
}

inline std::unordered_map<EdgeMask, int, MaskHash>& vc_memo(int k) {
    thread_local std::unordered_map<EdgeMask, int, MaskHash> memos[kMaxPatternK + 1];
    return memos[k];
}

}  // namespace detail

inline int vc_size(int k, EdgeMask edges) {
    if (k < 1 || k > kMaxPatternK) throw ContractError("pattern graphs support k <= 16");
    return detail::vc_rec(k, edges, detail::vc_memo(k));
}

inline int vc_size(const PatternGraph& h) { return vc_size(h.k, h.edges); }

// Lexicographic order on vertex sets read as sorted lists: the set owning
// the lowest vertex in the symmetric difference comes first.
inline bool vertex_set_lex_less(std::uint32_t a, std::uint32_t b) {
    std::uint32_t d = a ^ b;
    if (d == 0) return false;
    return a & (d & -d);
}

struct MinCovers {
    int size = 0;
    std::vector<std::uint32_t> covers;  // vertex bitmasks, lexicographically sorted
};

// Exact minimum covers by exhausting subsets in increasing size.
inline MinCovers min_vertex_covers(const PatternGraph& h) {
    if (h.k < 1 || h.k > kMaxPatternK) throw ContractError("min_vertex_covers: k <= 16");
    int target = vc_size(h);
    std::vector<EdgeMask> stars(h.k);
    for (int v = 0; v < h.k; ++v) stars[v] = star_mask(h.k, v);
    MinCovers out;
    out.size = target;
    for (std::uint32_t s = 0; s < (1u << h.k); ++s) {
        if (std::popcount(s) != target) continue;
        EdgeMask covered = 0;
        for (int v = 0; v < h.k; ++v)
            if (s >> v & 1) covered |= stars[v];
        if ((h.edges & ~covered) == 0) out.covers.push_back(s);
    }
    std::sort(out.covers.begin(), out.covers.end(), vertex_set_lex_less);
    return out;
}

// f must be vertex-induced in h: E(f) = E(h) restricted to some vertex set.
inline bool is_vertex_induced(const PatternGraph& f, const PatternGraph& h) {
    if (f.k != h.k) return false;
    if ((f.edges & ~h.edges) != 0) return false;
    std::uint32_t verts = touched_vertices(f.k, f.edges);
    return (h.edges & slots_within(f.k, verts)) == f.edges;
}

inline bool is_core_of(const PatternGraph& f, const PatternGraph& h) {
    if (!is_vertex_induced(f, h))
        throw ContractError("is_core_of: f is not vertex-induced in h");
    MinCovers mc = min_vertex_covers(f);
    std::vector<EdgeMask> stars(h.k);
    for (int v = 0; v < h.k; ++v) stars[v] = star_mask(h.k, v);
    for (std::uint32_t cover : mc.covers) {
        EdgeMask covered = 0;
        for (int v = 0; v < h.k; ++v)
            if (cover >> v & 1) covered |= stars[v];
        if ((h.edges & ~covered) != 0) return false;
    }
    return true;
}

inline bool in_e_boundary(const PatternGraph& h, int a, int b) {
    EdgeMask bit = EdgeMask(1) << slot_index(h.k, a, b);
    return vc_size(h.k, h.edges | bit) > vc_size(h);
}

// Canonical core: among vertex-induced subgraphs F of h with every
// minimum cover of F covering h and |V(E(F))| <= 3 vc(h), take the one
// that keeps the most non-isolated vertices, ties broken by the
// lexicographically lowest kept vertex set. Graphs within the 3 vc
// vertex budget are their own core; beyond it the rule evicts whole
// excess vertices (their edges fall into the star set together), which
// keeps the choice stable across the fiber. Edge-count preferences are
// not fiber-coherent: fewest edges makes two cores claim the same graph
// already at k=5, d=2, and most edges favours keeping a shared leaf once
// two star edges meet at it (k=7, d=2). The choice is a function of h
// alone; fiber and boundary coherence are checked by CoreTable, which
// aborts the build if this rule ever misbehaves.
inline PatternGraph core_of(const PatternGraph& h) {
    int k = h.k;
    int target_vc = vc_size(h);
    bool found = false;
    EdgeMask best = 0;
    std::uint32_t best_touched = 0;
    int best_kept = -1;
    for (std::uint32_t s = 0; s < (1u << k); ++s) {
        EdgeMask f = h.edges & slots_within(k, s);
        std::uint32_t touched = touched_vertices(k, f);
        if (std::popcount(touched) > 3 * target_vc) continue;
        PatternGraph cand{k, f};
        if (!is_core_of(cand, h)) continue;
        int kept = std::popcount(touched);
        if (!found || kept > best_kept ||
            (kept == best_kept && vertex_set_lex_less(touched, best_touched))) {
            found = true;
            best = f;
            best_touched = touched;
            best_kept = kept;
        }
    }
    if (!found)
        throw VerificationError("core_of: no admissible core for pattern graph " +
                                mask_to_string(h.edges));
    return {k, best};
}

// Star edges of a core F: single edges from V(E(F)) to the outside whose
// addition leaves the canonical core unchanged.
inline EdgeMask star_edges_of(const PatternGraph& core) {
    std::uint32_t inside = touched_vertices(core.k, core.edges);
    EdgeMask out = 0;
    for (int a = 0; a < core.k; ++a) {
        for (int b = a + 1; b < core.k; ++b) {
            bool ia = inside >> a & 1, ib = inside >> b & 1;
            if (ia == ib) continue;
            EdgeMask bit = EdgeMask(1) << slot_index(core.k, a, b);
            PatternGraph extended{core.k, core.edges | bit};
            if (core_of(extended).edges == core.edges) out |= bit;
        }
    }
    return out;
}

struct CoreRecord {
    PatternGraph core;
    EdgeMask star_edges = 0;
    int vc = 0;
};

inline CoreRecord core_map(const PatternGraph& h) {
    CoreRecord rec;
    rec.core = core_of(h);
    rec.star_edges = star_edges_of(rec.core);
    rec.vc = vc_size(rec.core);
    if (rec.vc != vc_size(h))
        throw VerificationError("core_map: vertex cover size not preserved");
    if ((h.edges & ~(rec.core.edges | rec.star_edges)) != 0)
        throw VerificationError("core_map: residual edges escape the star set");
    if (std::popcount(touched_vertices(h.k, rec.core.edges)) > 3 * rec.vc)
        throw VerificationError("core_map: core touches more than 3 vc vertices");
    return rec;
}

inline std::vector<PatternGraph> fiber_of_core(const CoreRecord& rec) {
    std::vector<int> slots;
    EdgeMask rest = rec.star_edges;
    while (rest) {
        slots.push_back(lowest_bit128(rest));
        rest &= rest - 1;
    }
    check_budget(std::uint64_t{1} << std::min<std::size_t>(slots.size(), 63), "fiber_of_core");
    std::vector<PatternGraph> fiber;
    fiber.reserve(std::size_t{1} << slots.size());
    for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << slots.size()); ++sub) {
        EdgeMask extra = 0;
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (sub >> i & 1) extra |= EdgeMask(1) << slots[i];
        fiber.push_back({rec.core.k, rec.core.edges | extra});
    }
    return fiber;
}

// All graphs over [k] with vc <= d; include-branch pruning is sound since
// vc is monotone under edge addition.
inline std::vector<EdgeMask> enumerate_vc_bounded(int k, int d) {
    if (k < 1 || k > 12) throw ContractError("enumerate_vc_bounded: need 1 <= k <= 12");
    int slots = num_slots(k);
    std::vector<EdgeMask> out;
    std::uint64_t visited = 0;
    auto dfs = [&](auto&& self, int slot, EdgeMask mask) -> void {
        if (++visited > enumeration_budget())
            throw BudgetError("enumerate_vc_bounded: search exceeds budget");
        if (slot == slots) {
            out.push_back(mask);
            return;
        }
        self(self, slot + 1, mask);
        EdgeMask next = mask | (EdgeMask(1) << slot);
        if (vc_size(k, next) <= d) self(self, slot + 1, next);
    };
    dfs(dfs, 0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

// Distinct cores reached from the vc <= d graphs, sorted by core bitmask.
inline std::vector<CoreRecord> enumerate_cores(int k, int d) {
    std::vector<CoreRecord> records;
    std::unordered_map<EdgeMask, bool, detail::MaskHash> seen;
    for (EdgeMask h : enumerate_vc_bounded(k, d)) {
        PatternGraph core = core_of({k, h});
        if (seen.emplace(core.edges, true).second) {
            CoreRecord rec;
            rec.core = core;
            rec.star_edges = star_edges_of(core);
            rec.vc = vc_size(core);
            records.push_back(rec);
        }
    }
    std::sort(records.begin(), records.end(),
              [](const CoreRecord& a, const CoreRecord& b) { return a.core.edges < b.core.edges; });
    return records;
}

// Verified core decomposition for one (k,d). Construction runs the fiber
// partition and boundary transfer checks and throws rather than return an
// unverified table.
class CoreTable {
public:
    CoreTable(int k, int d) : k_(k), d_(d) {
        graphs_ = enumerate_vc_bounded(k, d);
        records_ = enumerate_cores(k, d);
        verify();
    }

    int k() const { return k_; }
    int d() const { return d_; }
    const std::vector<EdgeMask>& graphs() const { return graphs_; }
    const std::vector<CoreRecord>& records() const { return records_; }
    bool verified() const { return verified_; }

private:
    void verify() {
        std::vector<EdgeMask> covered;
        std::unordered_map<EdgeMask, EdgeMask, detail::MaskHash> core_lookup;
        for (const CoreRecord& rec : records_) {
            if (std::popcount(touched_vertices(k_, rec.core.edges)) > 3 * rec.vc)
                fail("core exceeds 3*vc touched vertices", rec.core.edges);
            std::uint32_t inside = touched_vertices(k_, rec.core.edges);
            EdgeMask rest = rec.star_edges;
            while (rest) {
                int s = lowest_bit128(rest);
                rest &= rest - 1;
                auto [a, b] = slot_pair(k_, s);
                bool ia = inside >> a & 1, ib = inside >> b & 1;
                if (ia == ib) fail("star edge not of inside-outside type", rec.core.edges);
            }
            for (const PatternGraph& member : fiber_of_core(rec)) {
                covered.push_back(member.edges);
                auto [it, fresh] = core_lookup.emplace(member.edges, rec.core.edges);
                if (!fresh) fail("fibers overlap", member.edges);
                if (core_of(member).edges != rec.core.edges)
                    fail("fiber member maps to a different core", member.edges);
                if (vc_size(k_, member.edges) != rec.vc)
                    fail("fiber member changes vc", member.edges);
            }
        }
        std::sort(covered.begin(), covered.end());
        if (covered != graphs_)
            fail("fibers do not partition the vc-bounded graphs", 0);
        for (EdgeMask h : graphs_) {
            EdgeMask core = core_lookup.at(h);
            for (int s = 0; s < num_slots(k_); ++s) {
                auto [a, b] = slot_pair(k_, s);
                PatternGraph hg{k_, h}, cg{k_, core};
                if (in_e_boundary(hg, a, b) != in_e_boundary(cg, a, b))
                    fail("boundary transfer violated", h);
            }
        }
        verified_ = true;
    }

    [[noreturn]] void fail(const std::string& why, EdgeMask mask) const {
        throw VerificationError("CoreTable(k=" + std::to_string(k_) + ",d=" + std::to_string(d_) +
                                "): " + why + " (mask " + mask_to_string(mask) + ")");
    }

    int k_, d_;
    std::vector<EdgeMask> graphs_;
    std::vector<CoreRecord> records_;
    bool verified_ = false;
};

// Count of k-vertex graphs with a size-a cover and at most b non-isolated
// vertices, against the 2^(b(a+log k)) = 2^(ab) * k^b ceiling.
struct CoreCountCheck {
    BigInt count = 0;
    BigInt bound = 0;
    bool ok = false;
};

inline CoreCountCheck core_count_bound_check(int k, int a, int b) {
    CoreCountCheck res;
    for (EdgeMask h : enumerate_vc_bounded(k, a))
        if (std::popcount(touched_vertices(k, h)) <= b) ++res.count;
    res.bound = int_pow(BigInt(2), static_cast<unsigned long>(a) * b) *
                int_pow(BigInt(k), static_cast<unsigned long>(b));
    res.ok = res.count <= res.bound;
    return res;
}

// --- serialization ---------------------------------------------------------

inline nlohmann::json pattern_to_json(const PatternGraph& h) {
    nlohmann::json pairs = nlohmann::json::array();
    EdgeMask rest = h.edges;
    while (rest) {
        int s = lowest_bit128(rest);
        rest &= rest - 1;
        auto [a, b] = slot_pair(h.k, s);
        pairs.push_back({a, b});
    }
    return nlohmann::json{{"k", h.k}, {"edges", pairs}};
}

inline PatternGraph pattern_from_json(const nlohmann::json& j) {
    PatternGraph h{j.at("k").get<int>(), 0};
    for (const auto& e : j.at("edges"))
        h.edges |= EdgeMask(1) << slot_index(h.k, e.at(0).get<int>(), e.at(1).get<int>());
    return h;
}

}  // namespace cqb
