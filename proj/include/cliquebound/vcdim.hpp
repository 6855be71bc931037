#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "cliquebound/common.hpp"
#include "cliquebound/rational.hpp"

namespace cqb {

// Family of subsets of {0,...,ground_size-1}, members as bitmasks.
struct SetFamily {
    int ground_size = 0;
    std::vector<std::uint32_t> members;  // sorted, deduplicated

    static SetFamily from_members(int ground, std::vector<std::uint32_t> ms) {
        if (ground < 0 || ground > 24) throw ContractError("SetFamily: ground size <= 24");
        for (std::uint32_t m : ms)
            if (ground < 24 && (m >> ground) != 0)
                throw ContractError("SetFamily: member outside ground set");
        std::sort(ms.begin(), ms.end());
        ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
        return {ground, std::move(ms)};
    }
};

// X is shattered iff every subset of X arises as member ∩ X.
inline bool is_shattered(const SetFamily& fam, std::uint32_t x) {
    int xs = std::popcount(x);
    if (xs > 20) throw BudgetError("is_shattered: |x| > 20");
    if (fam.members.size() < (std::uint64_t{1} << xs)) return false;
    std::vector<int> positions;
    for (int b = 0; b < fam.ground_size; ++b)
        if (x >> b & 1) positions.push_back(b);
    std::vector<std::uint8_t> seen(std::uint64_t{1} << xs, 0);
    std::uint64_t found = 0, want = std::uint64_t{1} << xs;
    for (std::uint32_t m : fam.members) {
        std::uint32_t trace = 0;
        for (std::size_t i = 0; i < positions.size(); ++i)
            if (m >> positions[i] & 1) trace |= 1u << i;
        if (!seen[trace]) {
            seen[trace] = 1;
            if (++found == want) return true;
        }
    }
    return found == want;
}

// Exact VC dimension by level-wise growth of shattered sets (every subset
// of a shattered set is shattered). Empty family has no shattered set,
// reported as -1.
inline int vc_dimension(const SetFamily& fam) {
    if (fam.members.empty()) return -1;
    std::uint32_t universe = 0;
    for (std::uint32_t m : fam.members) universe |= m;
    if (std::popcount(universe) > 16)
        throw BudgetError("vc_dimension: union of members larger than 16");
    std::vector<std::uint32_t> level{0};
    int d = 0;
    while (true) {
        std::vector<std::uint32_t> next;
        for (std::uint32_t x : level) {
            int top = x == 0 ? -1 : 31 - std::countl_zero(x);
            for (int v = top + 1; v < fam.ground_size; ++v) {
                if (!(universe >> v & 1)) continue;
                std::uint32_t y = x | (1u << v);
                if (is_shattered(fam, y)) next.push_back(y);
            }
        }
        if (next.empty()) return d;
        level = std::move(next);
        ++d;
    }
}

struct SauerCheck {
    std::uint64_t size = 0;
    BigInt bound;
    int vc = 0;
    bool ok = false;
};

inline SauerCheck sauer_shelah_check(const SetFamily& fam) {
    SauerCheck out;
    out.size = fam.members.size();
    out.vc = vc_dimension(fam);
    BigInt total = 0;
    for (int i = 0; i <= out.vc; ++i) {
        BigInt binom;
        mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(fam.ground_size),
                     static_cast<unsigned long>(i));
        total += binom;
    }
    out.bound = total;
    out.ok = BigInt(static_cast<unsigned long>(out.size)) <= out.bound;
    return out;
}

// --- reference line families -----------------------------------------------------

// Traces on {0,1}^dim of affine halfspaces with integer coefficients in
// [-bound, bound]. Expected VC: dim + 1.
inline SetFamily halfspace_traces(int dim, int bound) {
    if (dim < 1 || dim > 4 || bound < 1 || bound > 4)
        throw ContractError("halfspace_traces: need dim <= 4, bound <= 4");
    int points = 1 << dim;
    std::vector<std::uint32_t> members;
    std::vector<int> w(dim + 1, -bound);  // w[0..dim-1] weights, w[dim] offset
    while (true) {
        std::uint32_t trace = 0;
        for (int x = 0; x < points; ++x) {
            long v = w[dim];
            for (int i = 0; i < dim; ++i)
                if (x >> i & 1) v += w[i];
            if (v >= 0) trace |= 1u << x;
        }
        members.push_back(trace);
        int pos = 0;
        while (pos <= dim && ++w[pos] > bound) w[pos++] = -bound;
        if (pos > dim) break;
    }
    return SetFamily::from_members(points, std::move(members));
}

// Solution sets of consistent F2-linear systems with at least one
// non-degenerate equation: the proper affine subspaces of F2^dim.
// Including the whole space (empty system) would shatter a set of size
// dim + 1; the theorem's value is dim, matched by this family.
inline SetFamily f2_affine_traces(int dim) {
    if (dim < 1 || dim > 4) throw ContractError("f2_affine_traces: need dim <= 4");
    int points = 1 << dim;
    std::vector<std::uint32_t> members;
    for (std::uint32_t s = 1; s < (1u << points); ++s) {
        if (s == (1u << points) - 1) continue;  // whole space excluded
        int base = std::countr_zero(s);
        std::uint32_t shifted = 0;
        bool closed = true;
        for (int x = 0; x < points && closed; ++x)
            if (s >> x & 1) shifted |= 1u << (x ^ base);
        for (int x = 0; x < points && closed; ++x) {
            if (!(shifted >> x & 1)) continue;
            for (int y = x; y < points && closed; ++y)
                if ((shifted >> y & 1) && !(shifted >> (x ^ y) & 1)) closed = false;
        }
        if (closed) members.push_back(s);
    }
    return SetFamily::from_members(points, std::move(members));
}

// Traces of integer polynomial threshold functions of bounded degree.
// Degree-1 PTFs are exactly the affine halfspaces.
inline SetFamily ptf_traces(int dim, int degree, int bound) {
    if (dim < 1 || dim > 4 || degree < 1 || degree > 2 || bound < 1 || bound > 4)
        throw ContractError("ptf_traces: need dim <= 4, degree <= 2, bound <= 4");
    int points = 1 << dim;
    std::vector<std::uint32_t> monomials;  // variable subsets, size <= degree
    for (std::uint32_t s = 0; s < (1u << dim); ++s)
        if (std::popcount(s) <= degree) monomials.push_back(s);
    std::uint64_t combos = 1;
    for (std::size_t i = 0; i < monomials.size(); ++i) {
        combos *= static_cast<std::uint64_t>(2 * bound + 1);
        check_budget(combos, "ptf_traces");
    }
    std::vector<std::uint32_t> members;
    std::vector<int> coef(monomials.size(), -bound);
    while (true) {
        std::uint32_t trace = 0;
        for (int x = 0; x < points; ++x) {
            long v = 0;
            for (std::size_t mi = 0; mi < monomials.size(); ++mi)
                if ((monomials[mi] & ~static_cast<std::uint32_t>(x)) == 0) v += coef[mi];
            if (v >= 0) trace |= 1u << x;
        }
        members.push_back(trace);
        std::size_t pos = 0;
        while (pos < coef.size() && ++coef[pos] > bound) coef[pos++] = -bound;
        if (pos == coef.size()) break;
    }
    return SetFamily::from_members(points, std::move(members));
}

inline SetFamily reference_line_family(const std::string& kind, int dim, int degree, int bound) {
    if (kind == "halfspace") return halfspace_traces(dim, bound);
    if (kind == "f2_affine") return f2_affine_traces(dim);
    if (kind == "ptf") return ptf_traces(dim, degree, bound);
    throw ContractError("unknown reference family '" + kind + "'");
}

}  // namespace cqb
