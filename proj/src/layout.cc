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

#include "ukaslr/layout.hh"

#include <bit>

namespace ukaslr::layout {

randomization_policy::randomization_policy(std::uint64_t bit_check_,
                                           std::uint64_t rnd_mask_,
                                           std::uint64_t alignment_)
    : bit_check(bit_check_), rnd_mask(rnd_mask_), alignment(alignment_) {
    if ((bit_check & rnd_mask) != bit_check) {
        throw std::invalid_argument("bit_check bits must survive rnd_mask");
    }
    if ((rnd_mask & 0xffffff) != 0) {
        throw std::invalid_argument("rnd_mask must clear the low 24 bits");
    }
    if (alignment == 0 || (alignment & (alignment - 1)) != 0) {
        throw std::invalid_argument("alignment must be a power of two");
    }
    if ((rnd_mask & (alignment - 1)) != 0) {
        throw std::invalid_argument("rnd_mask must respect the alignment");
    }
    if (rnd_mask >= vas::virtual_address::canonical_limit) {
        throw std::invalid_argument("rnd_mask must stay below the canonical ceiling");
    }
}

std::uint64_t randomization_policy::lattice_points() const {
    return std::uint64_t{1} << std::popcount(rnd_mask & ~bit_check);
}

randomization_policy default_base_policy() {
    return {0x0000100000000000, 0x00001fffff000000, 0x1000000};
}

randomization_policy default_stack_policy() {
    return {0x0000300000000000, 0x00003fffff000000, 0x1000000};
}

entropy::entropy_source instance_config::make_source() const {
    switch (mode) {
    case entropy::source_mode::hardware_sim:
        return entropy::entropy_source::hardware();
    case entropy::source_mode::seeded:
        return entropy::entropy_source::seeded(seed);
    case entropy::source_mode::fixed_sequence:
        return entropy::entropy_source::fixed(fixed_words);
    }
    throw std::logic_error("unreachable entropy mode");
}

void instance_config::validate() const {
    if (stack_size == 0) {
        throw std::invalid_argument("stack_size must be positive");
    }
    if (max_retries == 0) {
        throw std::invalid_argument("max_retries must be >= 1");
    }
    if (page_size == 0 || (page_size & (page_size - 1)) != 0) {
        throw std::invalid_argument("page_size must be a power of two");
    }
}

vas::virtual_address rand_gen(const randomization_policy& policy,
                              entropy::entropy_source& source) {
    for (;;) {
        std::uint64_t word = entropy::seed_generator(source);
        if ((word & policy.bit_check) == policy.bit_check) {
            return vas::virtual_address(word & policy.rnd_mask);
        }
    }
}

std::pair<vas::virtual_address, std::vector<vas::virtual_address>>
create_main_program(vas::address_space& space, const instance_config& cfg,
                    entropy::entropy_source& source) {
    cfg.validate();
    for (const auto& [start, r] : space.regions()) {
        if (r.kind == vas::region_kind::program_base) {
            throw std::invalid_argument("a main program is already loaded");
        }
    }

    bool randomized = entropy::hardware_entropy_supported(cfg.cpu);
    std::size_t pages = cfg.heap_segment_count > 0 ? cfg.heap_segment_count : 1;
    std::uint64_t extent = static_cast<std::uint64_t>(pages) * space.page_size();

    for (unsigned attempt = 0; attempt < cfg.max_retries; ++attempt) {
        vas::virtual_address base = randomized
                                        ? rand_gen(cfg.base_policy, source)
                                        : vas::virtual_address(default_program_base);
        if (!space.overlaps(base, extent)) {
            if (cfg.heap_segment_count == 0) {
                space.reserve(base, space.page_size(), vas::region_kind::program_base);
                return {base, {}};
            }
            return {base, load_segments(space, base, cfg.heap_segment_count)};
        }
        if (!randomized) {
            break; // the hard-coded base cannot move
        }
    }
    throw layout_failure("program base placement failed after retries");
}

std::vector<vas::virtual_address> load_segments(vas::address_space& space,
                                                vas::virtual_address base,
                                                std::size_t count) {
    if (base.value() % space.page_size() != 0) {
        throw std::invalid_argument("segment base is not page-aligned");
    }
    std::vector<vas::virtual_address> segments;
    segments.reserve(count);
    std::uint64_t extent = static_cast<std::uint64_t>(count) * space.page_size();
    if (count > 0 && space.overlaps(base, extent)) {
        throw layout_failure("segment range collides with an existing region");
    }
    for (std::size_t i = 0; i < count; ++i) {
        vas::virtual_address addr(base.value() + i * space.page_size());
        space.reserve(addr, space.page_size(),
                      i == 0 ? vas::region_kind::program_base
                             : vas::region_kind::heap_segment);
        segments.push_back(addr);
    }
    return segments;
}

vas::virtual_address map_anon(vas::address_space& space,
                              std::optional<vas::virtual_address> requested,
                              std::uint64_t length, mmap_flags flags,
                              entropy::entropy_source& source,
                              const randomization_policy& stack_policy,
                              unsigned max_retries, vas::region_kind kind) {
    if (length == 0) {
        throw std::invalid_argument("mapping length must be positive");
    }

    if (flags & mmap_rand) {
        // Randomize regardless of the address provided.
        for (unsigned attempt = 0; attempt < max_retries; ++attempt) {
            vas::virtual_address addr = rand_gen(stack_policy, source);
            if (!space.overlaps(addr, length)) {
                space.reserve(addr, length, kind);
                return addr;
            }
        }
        throw layout_failure("randomized mapping failed after retries");
    }

    if (requested) {
        space.reserve(*requested, length, kind); // overlap_error propagates
        return *requested;
    }

    vas::virtual_address addr =
        space.first_fit(vas::virtual_address(anon_search_base), length);
    space.reserve(addr, length, kind);
    return addr;
}

vas::region allocate_stack(vas::address_space& space, const thread_attr& attr,
                           entropy::entropy_source& source,
                           const randomization_policy& stack_policy,
                           unsigned max_retries) {
    if (attr.stack_size == 0) {
        throw std::invalid_argument("stack size must be positive");
    }
    // The pthread path passes no address; the flag chain decides the rest.
    vas::virtual_address addr =
        map_anon(space, std::nullopt, attr.stack_size, attr.stack_flags, source,
                 stack_policy, max_retries, vas::region_kind::stack);
    return {addr, attr.stack_size, vas::region_kind::stack};
}

vas::virtual_address malloc_large(vas::address_space& space, std::uint64_t length,
                                  std::uint64_t threshold) {
    if (length < threshold) {
        throw std::invalid_argument("allocation below the large-allocation threshold");
    }
    vas::virtual_address addr =
        space.first_fit(vas::virtual_address(anon_search_base), length);
    space.reserve(addr, length, vas::region_kind::large_alloc);
    return addr;
}

layout_record simulate_instance(const instance_config& cfg) {
    cfg.validate();
    vas::address_space space(cfg.page_size);
    entropy::entropy_source source = cfg.make_source();
    bool randomized = entropy::hardware_entropy_supported(cfg.cpu);

    auto [base, segments] = create_main_program(space, cfg, source);
    thread_attr attr(cfg.stack_size, randomized);
    vas::region stack =
        allocate_stack(space, attr, source, cfg.stack_policy, cfg.max_retries);

    return {cfg.instance_id, base, std::move(segments), stack.start, randomized};
}

} // namespace ukaslr::layout
