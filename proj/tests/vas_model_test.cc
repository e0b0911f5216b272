// Copyright 2026 The ukaslr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "ukaslr/address_space.hh"

using namespace ukaslr;
using vas::address_space;
using vas::region_kind;
using vas::virtual_address;

TEST_CASE("virtual_address stays in the canonical low half") {
    CHECK(virtual_address(0x0000100000000000).value() == 0x0000100000000000);
    CHECK(virtual_address((std::uint64_t{1} << 48) - 1).value() ==
          (std::uint64_t{1} << 48) - 1);
    CHECK_THROWS_AS(virtual_address(std::uint64_t{1} << 48), std::invalid_argument);
    CHECK_THROWS_AS(virtual_address(~std::uint64_t{0}), std::invalid_argument);
}

TEST_CASE("align_down") {
    CHECK(vas::align_down(0x1234, 0x1000) == 0x1000);
    CHECK(vas::align_down(0x1000, 0x1000) == 0x1000);
    CHECK(vas::align_down(0x0000123456789abc, 0x1000000) == 0x0000123456000000);
    CHECK(vas::align_down(0x0, 0x1000) == 0x0);
    CHECK_THROWS_AS(vas::align_down(0x1234, 0x1800), std::invalid_argument);
    CHECK_THROWS_AS(vas::align_down(0x1234, 0), std::invalid_argument);

    // result <= addr, divisible, within one alignment
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t addr = rng() >> 16;
        std::uint64_t alignment = std::uint64_t{1} << (rng() % 30);
        std::uint64_t r = vas::align_down(addr, alignment);
        CHECK(r <= addr);
        CHECK(r % alignment == 0);
        CHECK(addr - r < alignment);
    }
}

TEST_CASE("region invariants") {
    CHECK_THROWS_AS(vas::region(virtual_address(0x1000), 0, region_kind::other),
                    std::invalid_argument);
    vas::region r(virtual_address(0x1000), 0x2000, region_kind::heap_segment);
    CHECK(r.end() == 0x3000);
}

TEST_CASE("reserve records and rejects") {
    address_space space;

    SUBCASE("basic reservation") {
        const auto& r = space.reserve(virtual_address(0x0000100000000000), 0x2000,
                                      region_kind::program_base);
        CHECK(r.start.value() == 0x0000100000000000);
        CHECK(r.length == 0x2000);
        CHECK(space.region_count() == 1);
    }

    SUBCASE("same reservation twice overlaps") {
        space.reserve(virtual_address(0x0000100000000000), 0x2000,
                      region_kind::program_base);
        CHECK_THROWS_AS(space.reserve(virtual_address(0x0000100000000000), 0x2000,
                                      region_kind::program_base),
                        overlap_error);
    }

    SUBCASE("unaligned start") {
        CHECK_THROWS_AS(space.reserve(virtual_address(0x1001), 0x1000, region_kind::other),
                        std::invalid_argument);
    }

    SUBCASE("zero length") {
        CHECK_THROWS_AS(space.reserve(virtual_address(0x1000), 0, region_kind::other),
                        std::invalid_argument);
    }

    SUBCASE("partial overlap from either side") {
        space.reserve(virtual_address(0x10000), 0x3000, region_kind::other);
        CHECK_THROWS_AS(space.reserve(virtual_address(0xf000), 0x2000, region_kind::other),
                        overlap_error);
        CHECK_THROWS_AS(space.reserve(virtual_address(0x12000), 0x1000, region_kind::other),
                        overlap_error);
        // adjacent on both sides is fine
        CHECK_NOTHROW(space.reserve(virtual_address(0xf000), 0x1000, region_kind::other));
        CHECK_NOTHROW(space.reserve(virtual_address(0x13000), 0x1000, region_kind::other));
    }
}

TEST_CASE("first_fit finds the lowest free gap") {
    address_space space;
    const virtual_address anon(0x0000200000000000);

    SUBCASE("empty space returns the search start") {
        CHECK(space.first_fit(anon, 0x1000) == anon);
    }

    SUBCASE("next free page after a region") {
        space.reserve(anon, 0x2000, region_kind::other);
        CHECK(space.first_fit(anon, 0x1000).value() == 0x0000200000002000);
    }

    SUBCASE("gap before a region is free") {
        space.reserve(virtual_address(0x0000200000001000), 0x1000, region_kind::other);
        CHECK(space.first_fit(anon, 0x1000) == anon);
    }

    SUBCASE("a too-small gap is skipped") {
        space.reserve(virtual_address(0x0000200000001000), 0x1000, region_kind::other);
        CHECK(space.first_fit(anon, 0x2000).value() == 0x0000200000002000);
    }

    SUBCASE("unaligned search start") {
        CHECK_THROWS_AS(space.first_fit(virtual_address(0x1234), 0x1000),
                        std::invalid_argument);
    }

    SUBCASE("no gap below the ceiling") {
        virtual_address high((std::uint64_t{1} << 48) - 0x1000);
        CHECK_THROWS_AS(space.first_fit(high, 0x2000), space_exhausted);
        space.reserve(high, 0x1000, region_kind::other);
        CHECK_THROWS_AS(space.first_fit(high, 0x1000), space_exhausted);
    }
}

TEST_CASE("reserved regions never overlap pairwise") {
    std::mt19937_64 rng(42);
    address_space space;
    int placed = 0;
    for (int i = 0; i < 400; ++i) {
        std::uint64_t start = (rng() % 0x100000) * 0x1000;
        std::uint64_t length = (1 + rng() % 8) * 0x1000;
        try {
            space.reserve(virtual_address(start), length, region_kind::other);
            ++placed;
        } catch (const overlap_error&) {
            // expected now and then; density is high on purpose
        }
    }
    CHECK(placed > 0);

    std::vector<vas::region> regions;
    for (const auto& [start, r] : space.regions()) {
        regions.push_back(r);
    }
    for (std::size_t i = 0; i < regions.size(); ++i) {
        for (std::size_t j = i + 1; j < regions.size(); ++j) {
            bool disjoint = regions[i].end() <= regions[j].start.value() ||
                            regions[j].end() <= regions[i].start.value();
            CHECK(disjoint);
        }
    }
}

TEST_CASE("first_fit result is valid, minimal and deterministic") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        address_space space;
        for (int i = 0; i < 30; ++i) {
            std::uint64_t start = (rng() % 0x4000) * 0x1000;
            std::uint64_t length = (1 + rng() % 6) * 0x1000;
            try {
                space.reserve(virtual_address(start), length, region_kind::other);
            } catch (const overlap_error&) {
            }
        }
        std::uint64_t length = (1 + rng() % 6) * 0x1000;
        virtual_address a = space.first_fit(virtual_address(0), length);
        virtual_address b = space.first_fit(virtual_address(0), length);
        CHECK(a == b);
        CHECK(!space.overlaps(a, length));
        CHECK(a.value() % space.page_size() == 0);
        // nothing below is free: every lower page-aligned start must collide
        for (std::uint64_t p = 0; p < a.value(); p += 0x1000) {
            CHECK(space.overlaps(virtual_address(p), length));
        }
    }
}
