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

#pragma once

#include <compare>
#include <cstdint>
#include <map>

#include "ukaslr/errors.hh"

namespace ukaslr::vas {

// A byte address in the simulated space. Only the canonical low half is
// representable: value < 2^48, matching the 0x0000XXXXXX000000 shape of
// every region the model places.
class virtual_address {
public:
    static constexpr std::uint64_t canonical_limit = std::uint64_t{1} << 48;

    constexpr virtual_address() = default;

    explicit constexpr virtual_address(std::uint64_t value) : value_(value) {
        if (value >= canonical_limit) {
            throw std::invalid_argument("virtual_address outside canonical low half");
        }
    }

    constexpr std::uint64_t value() const { return value_; }

    auto operator<=>(const virtual_address&) const = default;

private:
    std::uint64_t value_ = 0;
};

enum class region_kind {
    program_base,
    heap_segment,
    stack,
    large_alloc,
    other,
};

// A reserved byte range [start, start + length).
struct region {
    region(virtual_address start_, std::uint64_t length_, region_kind kind_)
        : start(start_), length(length_), kind(kind_) {
        if (length == 0) {
            throw std::invalid_argument("region length must be positive");
        }
        if (length > UINT64_MAX - start.value()) {
            throw std::invalid_argument("region end overflows 64 bits");
        }
    }

    // One past the last byte.
    std::uint64_t end() const { return start.value() + length; }

    virtual_address start;
    std::uint64_t length;
    region_kind kind;
};

std::uint64_t align_down(std::uint64_t value, std::uint64_t alignment);
std::uint64_t align_up(std::uint64_t value, std::uint64_t alignment);

inline virtual_address align_down(virtual_address addr, std::uint64_t alignment) {
    return virtual_address(align_down(addr.value(), alignment));
}

// One instance's reservations, kept sorted by start so the first-fit search
// is a linear gap scan. Regions never overlap and every start is
// page-aligned.
class address_space {
public:
    static constexpr std::uint64_t default_page_size = 0x1000;

    explicit address_space(std::uint64_t page_size = default_page_size);

    std::uint64_t page_size() const { return page_size_; }

    // Records [start, start + length). Throws overlap_error when the range
    // intersects an existing region; the caller decides the retry policy.
    const region& reserve(virtual_address start, std::uint64_t length, region_kind kind);

    bool overlaps(virtual_address start, std::uint64_t length) const;

    // Lowest page-aligned address >= search_start whose [addr, addr + length)
    // fits below 2^48 without touching any region. Throws space_exhausted
    // when no such gap exists.
    virtual_address first_fit(virtual_address search_start, std::uint64_t length) const;

    const std::map<std::uint64_t, region>& regions() const { return regions_; }
    std::size_t region_count() const { return regions_.size(); }

private:
    std::uint64_t page_size_;
    std::map<std::uint64_t, region> regions_;
};

} // namespace ukaslr::vas
