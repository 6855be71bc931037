#include <catch2/catch_amalgamated.hpp>

#include "cliquebound/rng.hpp"
#include "cliquebound/vcdim.hpp"

using namespace cqb;

TEST_CASE("is_shattered basics") {
    auto fam = SetFamily::from_members(2, {0b00, 0b01, 0b10, 0b11});
    REQUIRE(is_shattered(fam, 0));
    REQUIRE(is_shattered(fam, 0b11));
    auto partial = SetFamily::from_members(2, {0b01, 0b10});
    REQUIRE_FALSE(is_shattered(partial, 0b11));
    auto none = SetFamily::from_members(2, {});
    REQUIRE_FALSE(is_shattered(none, 0));
}

TEST_CASE("vc of the power set is the ground size") {
    for (int d = 1; d <= 4; ++d) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t s = 0; s < (1u << d); ++s) members.push_back(s);
        REQUIRE(vc_dimension(SetFamily::from_members(d, std::move(members))) == d);
    }
}

TEST_CASE("vc of singletons is 1") {
    std::vector<std::uint32_t> singles;
    for (int i = 0; i < 5; ++i) singles.push_back(1u << i);
    REQUIRE(vc_dimension(SetFamily::from_members(5, std::move(singles))) == 1);
    REQUIRE(vc_dimension(SetFamily::from_members(3, {})) == -1);
}

TEST_CASE("vc monotone under family inclusion") {
    auto full = halfspace_traces(2, 2);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<std::uint32_t> sub;
        for (std::size_t i = 0; i < full.members.size(); ++i)
            if (rng_at(seed, i) & 1) sub.push_back(full.members[i]);
        auto fam = SetFamily::from_members(full.ground_size, std::move(sub));
        REQUIRE(vc_dimension(fam) <= vc_dimension(full));
    }
}

TEST_CASE("sauer shelah checks") {
    std::vector<std::uint32_t> members;
    for (std::uint32_t s = 0; s < 8; ++s) members.push_back(s);
    auto power = SetFamily::from_members(3, std::move(members));
    auto chk = sauer_shelah_check(power);
    REQUIRE(chk.vc == 3);
    REQUIRE(chk.ok);
    REQUIRE(chk.size == 8);
    REQUIRE(chk.bound == 8);

    std::vector<std::uint32_t> singles{0};
    for (int i = 0; i < 5; ++i) singles.push_back(1u << i);
    auto fam = SetFamily::from_members(5, std::move(singles));
    auto chk2 = sauer_shelah_check(fam);
    REQUIRE(chk2.size == 6);
    REQUIRE(chk2.bound == 6);  // 1 + 5
    REQUIRE(chk2.ok);
}

TEST_CASE("halfspace traces have VC dim+1") {
    REQUIRE(vc_dimension(halfspace_traces(2, 4)) == 3);
    REQUIRE(vc_dimension(halfspace_traces(2, 2)) == 3);
    REQUIRE(vc_dimension(halfspace_traces(1, 2)) == 2);
}

TEST_CASE("f2 affine traces have VC dim") {
    REQUIRE(vc_dimension(f2_affine_traces(2)) == 2);
    REQUIRE(vc_dimension(f2_affine_traces(3)) == 3);
}

TEST_CASE("degree-1 PTFs coincide with halfspaces") {
    auto p = ptf_traces(2, 1, 2);
    auto h = halfspace_traces(2, 2);
    REQUIRE(p.members == h.members);
    REQUIRE(vc_dimension(p) == vc_dimension(h));
}

TEST_CASE("simplified sauer bound |F| <= n^vc for the reference families") {
    for (const SetFamily& fam :
         {halfspace_traces(2, 2), f2_affine_traces(2), f2_affine_traces(3), ptf_traces(2, 2, 2)}) {
        int vc = vc_dimension(fam);
        REQUIRE(vc >= 1);
        BigInt bound = int_pow(BigInt(fam.ground_size), static_cast<unsigned long>(vc));
        REQUIRE(BigInt(static_cast<unsigned long>(fam.members.size())) <= bound);
    }
}

TEST_CASE("sauer never violated on random subfamilies") {
    auto base = f2_affine_traces(3);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::vector<std::uint32_t> sub;
        for (std::size_t i = 0; i < base.members.size(); ++i)
            if (rng_at(seed, i) % 3 == 0) sub.push_back(base.members[i]);
        if (sub.empty()) continue;
        auto chk = sauer_shelah_check(SetFamily::from_members(base.ground_size, std::move(sub)));
        REQUIRE(chk.ok);
    }
}
