#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cliquebound/common.hpp"
#include "cliquebound/graphs.hpp"
#include "cliquebound/patterns.hpp"
#include "cliquebound/rational.hpp"

namespace cqb {

// Explicit set of tuples. Tuples are identified by their rank
// sum_i t[i] * n^i (block 0 least significant); ranks kept sorted.
struct TupleSet {
    int n = 0;
    int k = 0;
    std::vector<std::uint64_t> ranks;

    static std::uint64_t rank_of(int n, const Tuple& t) {
        std::uint64_t r = 0, mult = 1;
        for (int v : t) {
            r += static_cast<std::uint64_t>(v) * mult;
            mult *= static_cast<std::uint64_t>(n);
        }
        return r;
    }

    static Tuple unrank(int n, int k, std::uint64_t r) {
        Tuple t(k);
        for (int i = 0; i < k; ++i) {
            t[i] = static_cast<int>(r % n);
            r /= n;
        }
        return t;
    }

    static TupleSet from_tuples(int n, int k, const std::vector<Tuple>& tuples) {
        TupleSet q{n, k, {}};
        q.ranks.reserve(tuples.size());
        for (const Tuple& t : tuples) q.ranks.push_back(rank_of(n, t));
        std::sort(q.ranks.begin(), q.ranks.end());
        q.ranks.erase(std::unique(q.ranks.begin(), q.ranks.end()), q.ranks.end());
        return q;
    }

    static TupleSet all(int n, int k) {
        std::uint64_t total = tuple_space_size(n, k);
        check_budget(total, "TupleSet::all");
        TupleSet q{n, k, {}};
        q.ranks.resize(total);
        for (std::uint64_t i = 0; i < total; ++i) q.ranks[i] = i;
        return q;
    }

    bool contains(std::uint64_t rank) const {
        return std::binary_search(ranks.begin(), ranks.end(), rank);
    }
    std::size_t size() const { return ranks.size(); }
};

// All tuples whose blocks i,j pass through the concrete vertex pair e.
inline TupleSet tuples_through_edge(int n, int k, Vertex a, Vertex b) {
    if (a.block == b.block) throw ContractError("edge endpoints share a block");
    std::vector<Tuple> ts;
    std::uint64_t total = tuple_space_size(n, k);
    check_budget(total, "tuples_through_edge");
    for (std::uint64_t r = 0; r < total; ++r) {
        Tuple t = TupleSet::unrank(n, k, r);
        if (t[a.block] == a.index && t[b.block] == b.index) ts.push_back(t);
    }
    return TupleSet::from_tuples(n, k, ts);
}

// Parameters of the pseudo-measure mu_{G,d} plus the goodness knobs D and
// delta. Immutable and freely shareable across threads; the verified core
// table enables the factored fast path.
class MeasureContext {
public:
    MeasureContext(KPartiteGraph graph, Rational p, int d, Rational big_d = Rational(2),
                   Rational delta = Rational(1, 2))
        : graph_(std::move(graph)), p_(std::move(p)), d_(d), big_d_(std::move(big_d)),
          delta_(std::move(delta)) {
        if (p_ <= 0 || p_ >= 1) throw ContractError("MeasureContext: need 0 < p < 1");
        if (d_ < 0) throw ContractError("MeasureContext: need d >= 0");
        if (big_d_ <= 0 || delta_ <= 0) throw ContractError("MeasureContext: need D, delta > 0");
        patterns_ = std::make_shared<std::vector<EdgeMask>>(enumerate_vc_bounded(graph_.k(), d_));
        Rational ratio = (Rational(1) - p_) / p_;
        int slots = num_slots(graph_.k());
        ratio_pow_.reserve(slots + 1);
        ratio_pow_.push_back(Rational(1));
        for (int i = 1; i <= slots; ++i) ratio_pow_.push_back(ratio_pow_.back() * ratio);
    }

    const KPartiteGraph& graph() const { return graph_; }
    const Rational& p() const { return p_; }
    int d() const { return d_; }
    const Rational& big_d() const { return big_d_; }
    const Rational& delta() const { return delta_; }
    const std::vector<EdgeMask>& patterns() const { return *patterns_; }
    const Rational& ratio_pow(int i) const { return ratio_pow_[static_cast<std::size_t>(i)]; }

    void attach_core_table(std::shared_ptr<const CoreTable> table) {
        if (table && (table->k() != graph_.k() || table->d() != d_))
            throw ContractError("core table does not match context (k,d)");
        core_table_ = std::move(table);
    }
    const CoreTable* core_table() const { return core_table_.get(); }

    // Pattern slots (i,j) whose concrete pair {t_i, t_j} is an edge of G.
    EdgeMask present_slots(const Tuple& t) const {
        EdgeMask mask = 0;
        int k = graph_.k();
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                if (graph_.has_edge({i, t[i]}, {j, t[j]}))
                    mask |= EdgeMask(1) << slot_index(k, i, j);
        return mask;
    }

    // chi of a pattern graph applied to t: ((1-p)/p)^present * (-1)^absent.
    Rational chi_applied(EdgeMask pattern, EdgeMask present) const {
        int pr = popcount128(pattern & present);
        int abs = popcount128(pattern) - pr;
        Rational v = ratio_pow(pr);
        return (abs % 2) ? Rational(-v) : v;
    }

private:
    KPartiteGraph graph_;
    Rational p_;
    int d_;
    Rational big_d_, delta_;
    std::shared_ptr<const std::vector<EdgeMask>> patterns_;
    std::vector<Rational> ratio_pow_;
    std::shared_ptr<const CoreTable> core_table_;
};

// Biased character of an explicit cross-block edge set.
inline Rational chi(const MeasureContext& ctx, const std::vector<std::pair<Vertex, Vertex>>& edges) {
    Rational out(1);
    Rational ratio = (Rational(1) - ctx.p()) / ctx.p();
    for (const auto& [u, v] : edges) {
        ctx.graph().vertex_id(u);
        ctx.graph().vertex_id(v);
        if (u.block == v.block) throw ContractError("chi: intra-block pair rejected");
        if (ctx.graph().has_edge(u, v))
            out *= ratio;
        else
            out = -out;
    }
    return out;
}

namespace detail {

// Sum of chi over the context's vc-bounded patterns, not yet n^-k scaled.
inline Rational mu_tuple_raw_naive(const MeasureContext& ctx, const Tuple& t) {
    validate_tuple(ctx.graph(), t);
    EdgeMask present = ctx.present_slots(t);
    int slots = num_slots(ctx.graph().k());
    // bucket patterns by (present, total) so GMP work is O(slots^2)
    std::vector<long> counts(static_cast<std::size_t>(slots + 1) * (slots + 1), 0);
    for (EdgeMask h : ctx.patterns()) {
        int pr = popcount128(h & present);
        int tot = popcount128(h);
        ++counts[static_cast<std::size_t>(tot) * (slots + 1) + pr];
    }
    Rational sum(0);
    for (int tot = 0; tot <= slots; ++tot)
        for (int pr = 0; pr <= tot; ++pr) {
            long c = counts[static_cast<std::size_t>(tot) * (slots + 1) + pr];
            if (c == 0) continue;
            Rational term = ctx.ratio_pow(pr) * c;
            sum += ((tot - pr) % 2) ? Rational(-term) : term;
        }
    return sum;
}

inline Rational mu_tuple_raw_core(const MeasureContext& ctx, const Tuple& t) {
    const CoreTable* table = ctx.core_table();
    if (table == nullptr || !table->verified())
        throw VerificationError("mu_tuple_core_factored: no verified core table attached");
    validate_tuple(ctx.graph(), t);
    EdgeMask present = ctx.present_slots(t);
    Rational sum(0);
    for (const CoreRecord& rec : table->records()) {
        if ((rec.star_edges & ~present) != 0) continue;  // some star edge missing
        int stars = popcount128(rec.star_edges);
        sum += ctx.chi_applied(rec.core.edges, present) * rat_pow(ctx.p(), -stars);
    }
    return sum;
}

inline Rational pow_nk(int n, int k) {
    return make_rational(BigInt(1), int_pow(BigInt(n), static_cast<unsigned long>(k)));
}

}  // namespace detail

// Defining sum: mu(t) = n^-k * sum over E within t with vc(E) <= d of chi_E.
inline Rational mu_tuple_naive(const MeasureContext& ctx, const Tuple& t) {
    return detail::mu_tuple_raw_naive(ctx, t) * detail::pow_nk(ctx.graph().n(), ctx.graph().k());
}

// Core-factored evaluation; must agree with mu_tuple_naive exactly.
inline Rational mu_tuple_core_factored(const MeasureContext& ctx, const Tuple& t) {
    return detail::mu_tuple_raw_core(ctx, t) * detail::pow_nk(ctx.graph().n(), ctx.graph().k());
}

inline Rational mu_set(const MeasureContext& ctx, const TupleSet& q) {
    if (q.n != ctx.graph().n() || q.k != ctx.graph().k())
        throw ContractError("mu_set: tuple set does not match graph dimensions");
    bool factored = ctx.core_table() != nullptr && ctx.core_table()->verified();
    Rational raw(0);
    for (std::uint64_t r : q.ranks) {
        Tuple t = TupleSet::unrank(q.n, q.k, r);
        raw += factored ? detail::mu_tuple_raw_core(ctx, t) : detail::mu_tuple_raw_naive(ctx, t);
    }
    return raw * detail::pow_nk(q.n, q.k);
}

inline Rational mu_whole_space(const MeasureContext& ctx) {
    return mu_set(ctx, TupleSet::all(ctx.graph().n(), ctx.graph().k()));
}

// Boundary form of Lemma bounded-measure: after pairing H with H + {i,j},
// only patterns with vc exactly d that enter the {i,j}-boundary survive.
// Must equal mu_set exactly on any q ruled out by the missing edge e.
inline Rational mu_ruled_out_boundary(const MeasureContext& ctx, const TupleSet& q,
                                      Vertex ea, Vertex eb) {
    const KPartiteGraph& g = ctx.graph();
    if (q.n != g.n() || q.k != g.k())
        throw ContractError("mu_ruled_out_boundary: tuple set mismatch");
    if (ea.block == eb.block) throw ContractError("mu_ruled_out_boundary: not a cross pair");
    if (g.has_edge(ea, eb))
        throw ContractError("mu_ruled_out_boundary: e is an edge of G, not missing");
    for (std::uint64_t r : q.ranks) {
        Tuple t = TupleSet::unrank(q.n, q.k, r);
        if (t[ea.block] != ea.index || t[eb.block] != eb.index)
            throw ContractError("mu_ruled_out_boundary: q is not ruled out by e");
    }
    int k = g.k();
    EdgeMask eslot = EdgeMask(1) << slot_index(k, ea.block, eb.block);
    std::vector<EdgeMask> boundary;
    for (EdgeMask h : ctx.patterns()) {
        if (vc_size(k, h) != ctx.d()) continue;
        if (vc_size(k, h | eslot) > ctx.d()) boundary.push_back(h);
    }
    Rational raw(0);
    for (std::uint64_t r : q.ranks) {
        Tuple t = TupleSet::unrank(q.n, q.k, r);
        EdgeMask present = ctx.present_slots(t);
        for (EdgeMask h : boundary) raw += ctx.chi_applied(h, present);
    }
    return raw * detail::pow_nk(q.n, q.k);
}

// xi weight of Eq. sum:weighted. t_partial carries the chosen vertex per
// block of A = V(E(F)); entries outside A are ignored. Star edges always
// join A to its complement, so presence in G and in G minus G[V_A] agree.
inline Rational xi_weight(const MeasureContext& ctx, const CoreRecord& rec, const TupleSet& q,
                          const Tuple& t_partial) {
    const KPartiteGraph& g = ctx.graph();
    int k = g.k(), n = g.n();
    if (rec.core.k != k) throw ContractError("xi_weight: core has wrong k");
    if (static_cast<int>(t_partial.size()) != k)
        throw ContractError("xi_weight: partial tuple must have k entries");
    std::uint32_t a_set = touched_vertices(k, rec.core.edges);
    for (int i = 0; i < k; ++i)
        if ((a_set >> i & 1) && (t_partial[i] < 0 || t_partial[i] >= n))
            throw ContractError("xi_weight: partial tuple entry out of range");
    std::vector<int> b_blocks;
    for (int i = 0; i < k; ++i)
        if (!(a_set >> i & 1)) b_blocks.push_back(i);

    std::vector<std::pair<int, int>> star;  // block pairs of E*_F
    EdgeMask rest = rec.star_edges;
    while (rest) {
        int s = lowest_bit128(rest);
        rest &= rest - 1;
        star.push_back(slot_pair(k, s));
    }

    std::uint64_t combos = 1;
    for (std::size_t i = 0; i < b_blocks.size(); ++i) {
        check_budget(combos * static_cast<std::uint64_t>(n), "xi_weight");
        combos *= static_cast<std::uint64_t>(n);
    }
    long matches = 0;
    Tuple t = t_partial;
    for (std::uint64_t c = 0; c < combos; ++c) {
        std::uint64_t rem = c;
        for (int b : b_blocks) {
            t[b] = static_cast<int>(rem % n);
            rem /= n;
        }
        bool stars_present = true;
        for (auto [x, y] : star)
            if (!g.has_edge({x, t[x]}, {y, t[y]})) { stars_present = false; break; }
        if (!stars_present) continue;
        if (q.contains(TupleSet::rank_of(n, t))) ++matches;
    }
    return rat_pow(ctx.p(), -popcount128(rec.star_edges)) * matches;
}

// --- goodness --------------------------------------------------------------

struct GoodnessRow {
    std::size_t q_index = 0;
    EdgeMask core = 0;
    int core_edges = 0;
    int core_vc = 0;
    Rational abs_sum;     // n^-k |sum_{t in Q} sum_{H in fiber} chi_{H(t)}|
    double threshold = 0;      // s = n^(2|E(F)|/D - delta vc(F)/10)
    double threshold_alt = 0;  // n^-k-normalized constant from Claim bound-Y
    bool pass = false;
    bool pass_alt = false;
};

struct GoodnessReport {
    std::vector<GoodnessRow> rows;
    std::size_t pairs_checked = 0;
    bool good = true;
};

// (Q, D, delta)-goodness per the definition: every Q in the family must be
// s-bounded over every non-empty core with vc <= D/4. Thresholds have
// irrational exponents, so the comparison runs in log2 space with a 1e-9
// tolerance; the sums themselves are exact.
inline GoodnessReport goodness_check(const MeasureContext& ctx,
                                     const std::vector<TupleSet>& q_family,
                                     const CoreTable& table) {
    const KPartiteGraph& g = ctx.graph();
    int n = g.n(), k = g.k();
    long want_d = static_cast<long>(rat_to_double(ctx.big_d() / 4));
    if (table.k() != k || table.d() != static_cast<int>(want_d))
        throw ContractError("goodness_check: table is not for (k, floor(D/4))");
    if (!table.verified()) throw VerificationError("goodness_check: unverified core table");

    double log2n = std::log2(static_cast<double>(n));
    double dval = rat_to_double(ctx.big_d());
    double delta = rat_to_double(ctx.delta());
    double log2p = rat_log2(ctx.p());

    GoodnessReport rep;
    for (std::size_t qi = 0; qi < q_family.size(); ++qi) {
        const TupleSet& q = q_family[qi];
        if (q.n != n || q.k != k) throw ContractError("goodness_check: tuple set mismatch");
        for (const CoreRecord& rec : table.records()) {
            if (rec.core.edges == 0) continue;
            Rational raw(0);
            int stars = popcount128(rec.star_edges);
            for (std::uint64_t r : q.ranks) {
                Tuple t = TupleSet::unrank(n, k, r);
                EdgeMask present = ctx.present_slots(t);
                if ((rec.star_edges & ~present) != 0) continue;
                raw += ctx.chi_applied(rec.core.edges, present) * rat_pow(ctx.p(), -stars);
            }
            GoodnessRow row;
            row.q_index = qi;
            row.core = rec.core.edges;
            row.core_edges = popcount128(rec.core.edges);
            row.core_vc = rec.vc;
            row.abs_sum = abs(raw * detail::pow_nk(n, k));
            double expo = 2.0 * row.core_edges / dval * log2n - delta * rec.vc / 10.0 * log2n;
            row.threshold = expo;  // stored as log2(s)
            double expo_alt = std::log2(6.0) - row.core_edges * log2p -
                              rec.vc / 4.0 * (2.0 + delta / 2.0 * log2n);
            row.threshold_alt = expo_alt;
            row.pass = row.abs_sum == 0 || rat_log2(row.abs_sum) <= expo + 1e-9;
            row.pass_alt = row.abs_sum == 0 || rat_log2(row.abs_sum) <= expo_alt + 1e-9;
            if (!row.pass) rep.good = false;
            ++rep.pairs_checked;
            rep.rows.push_back(std::move(row));
        }
    }
    return rep;
}

inline GoodnessReport goodness_check(const MeasureContext& ctx,
                                     const std::vector<TupleSet>& q_family) {
    long want_d = static_cast<long>(rat_to_double(ctx.big_d() / 4));
    CoreTable table(ctx.graph().k(), static_cast<int>(want_d));
    return goodness_check(ctx, q_family, table);
}

// --- exhaustive zero-mean check ---------------------------------------------

struct ExpectationCheck {
    Rational mean;
    Rational expected;
    bool ok = false;
};

// Averages mu_G(q) over ALL graphs weighted by their sampling probability
// and compares with |q| n^-k exactly. Runs over a common denominator
// b^M a^slots n^k with integer numerators, so no per-term reduction.
inline ExpectationCheck exhaustive_expectation_check(int n, int k, const Rational& p, int d,
                                                     const TupleSet& q) {
    if (p <= 0 || p >= 1) throw ContractError("exhaustive_expectation_check: need 0 < p < 1");
    if (q.n != n || q.k != k) throw ContractError("exhaustive_expectation_check: q mismatch");
    KPartiteGraph probe(n, k);
    std::uint64_t pairs = probe.num_cross_pairs();
    if (pairs > 20) throw BudgetError("exhaustive_expectation_check: more than 2^20 graphs");
    int slots = num_slots(k);
    std::vector<EdgeMask> patterns = enumerate_vc_bounded(k, d);

    BigInt a = p.get_num(), b = p.get_den(), c = b - a;
    std::vector<BigInt> apow(static_cast<std::size_t>(slots) + pairs + 1),
        cpow(static_cast<std::size_t>(slots) + pairs + 1);
    apow[0] = 1;
    cpow[0] = 1;
    for (std::size_t i = 1; i < apow.size(); ++i) {
        apow[i] = apow[i - 1] * a;
        cpow[i] = cpow[i - 1] * c;
    }

    // per tuple in q and per pattern: which global pair indices H(t) uses
    std::vector<std::vector<std::uint32_t>> tuple_masks(q.size());
    for (std::size_t ti = 0; ti < q.size(); ++ti) {
        Tuple t = TupleSet::unrank(n, k, q.ranks[ti]);
        std::vector<std::uint32_t> slot_bits(slots);
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                std::uint64_t bp = 0;
                bool ok_pair = false;
                for (std::uint64_t idx = 0; idx < pairs; ++idx) {
                    auto [u, v] = probe.cross_pair(idx);
                    if (u.block == i && u.index == t[i] && v.block == j && v.index == t[j]) {
                        bp = idx;
                        ok_pair = true;
                        break;
                    }
                }
                if (!ok_pair) throw ContractError("exhaustive_expectation_check: pair not found");
                slot_bits[slot_index(k, i, j)] = 1u << bp;
            }
        tuple_masks[ti].resize(patterns.size());
        for (std::size_t hi = 0; hi < patterns.size(); ++hi) {
            std::uint32_t m = 0;
            EdgeMask rest = patterns[hi];
            while (rest) {
                int s = lowest_bit128(rest);
                rest &= rest - 1;
                m |= slot_bits[s];
            }
            tuple_masks[ti][hi] = m;
        }
    }
    std::vector<int> pattern_sizes(patterns.size());
    for (std::size_t hi = 0; hi < patterns.size(); ++hi)
        pattern_sizes[hi] = popcount128(patterns[hi]);

    BigInt numerator = 0;
    std::uint32_t graphs = 1u << pairs;
    for (std::uint32_t gmask = 0; gmask < graphs; ++gmask) {
        int ge = std::popcount(gmask);
        BigInt inner = 0;
        for (std::size_t ti = 0; ti < q.size(); ++ti) {
            for (std::size_t hi = 0; hi < patterns.size(); ++hi) {
                int pr = std::popcount(gmask & tuple_masks[ti][hi]);
                int tot = pattern_sizes[hi];
                BigInt term = cpow[pr] * apow[static_cast<std::size_t>(slots - pr)];
                if ((tot - pr) % 2)
                    inner -= term;
                else
                    inner += term;
            }
        }
        numerator += apow[ge] * cpow[pairs - ge] * inner;
    }
    BigInt denom = int_pow(b, static_cast<unsigned long>(pairs)) *
                   int_pow(a, static_cast<unsigned long>(slots)) *
                   int_pow(BigInt(n), static_cast<unsigned long>(k));
    ExpectationCheck out;
    out.mean = make_rational(numerator, denom);
    out.expected = make_rational(BigInt(q.size()), int_pow(BigInt(n), static_cast<unsigned long>(k)));
    out.ok = out.mean == out.expected;
    return out;
}

}  // namespace cqb
