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
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "ukaslr/errors.hh"

namespace ukaslr::entropy {

// Bit 30 of the CPUID feature word signals hardware entropy support.
constexpr unsigned hardware_entropy_bit = 30;

// Stand-in for the CPUID feature word a live kernel would query.
struct cpu_profile {
    std::uint32_t feature_mask = 0;

    static constexpr cpu_profile with_hardware_entropy() {
        return cpu_profile{std::uint32_t{1} << hardware_entropy_bit};
    }
    static constexpr cpu_profile without_hardware_entropy() { return cpu_profile{0}; }
};

constexpr bool hardware_entropy_supported(cpu_profile cpu) {
    return ((cpu.feature_mask >> hardware_entropy_bit) & 1u) != 0;
}

enum class source_mode {
    hardware_sim,   // host entropy; layouts are not reproducible
    seeded,         // mt19937_64; equal seeds give equal draw sequences
    fixed_sequence, // scripted words, errors when exhausted
};

// A stream of 32-bit entropy words. Owned by exactly one simulated
// instance; draws mutate the source.
class entropy_source {
public:
    static entropy_source hardware();
    static entropy_source seeded(std::uint64_t seed);
    static entropy_source fixed(std::vector<std::uint32_t> words);

    source_mode mode() const { return mode_; }

    // Next 32-bit word. Throws entropy_exhausted when a fixed sequence
    // runs dry.
    std::uint32_t draw32();

    // Words left in a fixed sequence; nullopt for the endless modes.
    std::optional<std::size_t> remaining() const;

private:
    explicit entropy_source(source_mode mode) : mode_(mode) {}

    source_mode mode_;
    std::unique_ptr<std::random_device> device_;
    std::mt19937_64 generator_;
    std::vector<std::uint32_t> sequence_;
    std::size_t next_ = 0;
};

// Composes one 64-bit word from exactly two draws: the first is shifted
// into the high half and XOR'd with the second.
std::uint64_t seed_generator(entropy_source& source);

} // namespace ukaslr::entropy
