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

#include "ukaslr/address_space.hh"

namespace ukaslr::vas {

namespace {

bool is_power_of_two(std::uint64_t v) {
    return v != 0 && (v & (v - 1)) == 0;
}

} // namespace

std::uint64_t align_down(std::uint64_t value, std::uint64_t alignment) {
    if (!is_power_of_two(alignment)) {
        throw std::invalid_argument("alignment must be a power of two");
    }
    return value & ~(alignment - 1);
}

std::uint64_t align_up(std::uint64_t value, std::uint64_t alignment) {
    if (!is_power_of_two(alignment)) {
        throw std::invalid_argument("alignment must be a power of two");
    }
    std::uint64_t mask = alignment - 1;
    if (value > UINT64_MAX - mask) {
        throw std::invalid_argument("align_up overflows 64 bits");
    }
    return (value + mask) & ~mask;
}

address_space::address_space(std::uint64_t page_size) : page_size_(page_size) {
    if (!is_power_of_two(page_size)) {
        throw std::invalid_argument("page size must be a power of two");
    }
}

const region& address_space::reserve(virtual_address start, std::uint64_t length,
                                     region_kind kind) {
    if (start.value() % page_size_ != 0) {
        throw std::invalid_argument("reservation start is not page-aligned");
    }
    region r(start, length, kind); // validates length and overflow
    if (overlaps(start, length)) {
        throw overlap_error("reservation overlaps an existing region");
    }
    auto [it, inserted] = regions_.emplace(start.value(), r);
    return it->second;
}

bool address_space::overlaps(virtual_address start, std::uint64_t length) const {
    if (length == 0) {
        return false;
    }
    std::uint64_t s = start.value();
    std::uint64_t e = (length > UINT64_MAX - s) ? UINT64_MAX : s + length;

    // First region starting at or after s; the one before may still reach in.
    auto it = regions_.lower_bound(s);
    if (it != regions_.end() && it->first < e) {
        return true;
    }
    if (it != regions_.begin()) {
        const region& prev = std::prev(it)->second;
        if (prev.end() > s) {
            return true;
        }
    }
    return false;
}

virtual_address address_space::first_fit(virtual_address search_start,
                                         std::uint64_t length) const {
    if (search_start.value() % page_size_ != 0) {
        throw std::invalid_argument("search start is not page-aligned");
    }
    if (length == 0) {
        throw std::invalid_argument("length must be positive");
    }

    std::uint64_t candidate = search_start.value();
    for (const auto& [start, r] : regions_) {
        if (r.end() <= candidate) {
            continue;
        }
        if (candidate <= UINT64_MAX - length && start >= candidate + length) {
            break; // gap before this region is big enough
        }
        if (r.end() >= virtual_address::canonical_limit) {
            throw space_exhausted("no free gap below the canonical ceiling");
        }
        candidate = align_up(r.end(), page_size_);
    }

    if (length > virtual_address::canonical_limit ||
        candidate > virtual_address::canonical_limit - length) {
        throw space_exhausted("no free gap below the canonical ceiling");
    }
    return virtual_address(candidate);
}

} // namespace ukaslr::vas
