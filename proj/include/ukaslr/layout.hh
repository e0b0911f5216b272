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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ukaslr/address_space.hh"
#include "ukaslr/entropy.hh"

namespace ukaslr::layout {

// Deterministic boot-path constants of the unmodified kernel.
constexpr std::uint64_t default_program_base = 0x0000100000000000;
constexpr std::uint64_t anon_search_base = 0x0000200000000000;

constexpr unsigned default_max_retries = 64;
constexpr std::uint64_t default_large_alloc_threshold = 0x200000; // 2 MiB
constexpr std::uint64_t default_stack_size = 0x100000;            // 1 MiB

// One randomized region class. bit_check pins the required high bits (the
// lower bound of the range); rnd_mask keeps the admissible bits and clears
// the low 24 so results land on an aligned lattice.
struct randomization_policy {
    randomization_policy(std::uint64_t bit_check_, std::uint64_t rnd_mask_,
                         std::uint64_t alignment_);

    std::uint64_t lower_bound() const { return bit_check; }
    std::uint64_t upper_bound() const { return rnd_mask; }

    // Number of distinct addresses the policy can produce.
    std::uint64_t lattice_points() const;

    std::uint64_t bit_check;
    std::uint64_t rnd_mask;
    std::uint64_t alignment;
};

randomization_policy default_base_policy();  // 0x0000100000000000 / 0x00001fffff000000
randomization_policy default_stack_policy(); // 0x0000300000000000 / 0x00003fffff000000

// Anonymous-mapping flags; mmap_rand routes the request onto the
// randomized path regardless of any requested address.
using mmap_flags = std::uint32_t;
constexpr mmap_flags mmap_none = 0;
constexpr mmap_flags mmap_rand = 1u << 0;

// Thread attributes as the pthread shim sees them. random_stack feeds the
// mmap_rand flag at construction.
struct thread_attr {
    thread_attr(std::uint64_t stack_size_, bool random_stack_)
        : stack_size(stack_size_), random_stack(random_stack_),
          stack_flags(random_stack_ ? mmap_rand : mmap_none) {}

    std::uint64_t stack_size;
    bool random_stack;
    mmap_flags stack_flags;
};

// Everything needed to run one simulated instance.
struct instance_config {
    std::string instance_id = "i0";
    entropy::cpu_profile cpu = entropy::cpu_profile::with_hardware_entropy();
    entropy::source_mode mode = entropy::source_mode::seeded;
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> fixed_words;
    std::size_t heap_segment_count = 3;
    std::uint64_t stack_size = default_stack_size;
    std::uint64_t large_alloc_threshold = default_large_alloc_threshold;
    unsigned max_retries = default_max_retries;
    randomization_policy base_policy = default_base_policy();
    randomization_policy stack_policy = default_stack_policy();
    std::uint64_t page_size = vas::address_space::default_page_size;

    entropy::entropy_source make_source() const;
    void validate() const;
};

// The addresses one instance ended up with.
struct layout_record {
    std::string instance_id;
    vas::virtual_address program_base;
    std::vector<vas::virtual_address> heap_segments;
    vas::virtual_address stack_base;
    bool randomized = false;

    bool operator==(const layout_record&) const = default;
};

// Draws 64-bit words until one carries every bit_check bit, then applies
// rnd_mask. Live sources loop until acceptance; fixed sequences surface
// exhaustion as an error.
vas::virtual_address rand_gen(const randomization_policy& policy,
                              entropy::entropy_source& source);

// Program load: randomized base when the CPU supports hardware entropy,
// the hard-coded default otherwise, then the segment chain from that base.
std::pair<vas::virtual_address, std::vector<vas::virtual_address>>
create_main_program(vas::address_space& space, const instance_config& cfg,
                    entropy::entropy_source& source);

// Segments at increasing 0x1000 offsets from base; the first page is the
// program image itself, the rest are heap segments.
std::vector<vas::virtual_address> load_segments(vas::address_space& space,
                                                vas::virtual_address base,
                                                std::size_t count);

// Anonymous mapping. mmap_rand forces a randomized placement and ignores
// any requested address; otherwise an explicit request is honored or the
// first-fit search starts at the hard-coded anon base.
vas::virtual_address map_anon(vas::address_space& space,
                              std::optional<vas::virtual_address> requested,
                              std::uint64_t length, mmap_flags flags,
                              entropy::entropy_source& source,
                              const randomization_policy& stack_policy,
                              unsigned max_retries = default_max_retries,
                              vas::region_kind kind = vas::region_kind::other);

// Stack allocation through the attr -> flags -> map_anon chain.
vas::region allocate_stack(vas::address_space& space, const thread_attr& attr,
                           entropy::entropy_source& source,
                           const randomization_policy& stack_policy,
                           unsigned max_retries = default_max_retries);

// The large-allocation branch: deterministic first-fit placement, never
// randomized.
vas::virtual_address malloc_large(vas::address_space& space, std::uint64_t length,
                                  std::uint64_t threshold = default_large_alloc_threshold);

// Full boot flow of one instance: program load, then the main thread's
// stack.
layout_record simulate_instance(const instance_config& cfg);

} // namespace ukaslr::layout
