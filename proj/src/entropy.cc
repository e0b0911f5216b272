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

#include "ukaslr/entropy.hh"

namespace ukaslr::entropy {

entropy_source entropy_source::hardware() {
    entropy_source s(source_mode::hardware_sim);
    s.device_ = std::make_unique<std::random_device>();
    return s;
}

entropy_source entropy_source::seeded(std::uint64_t seed) {
    entropy_source s(source_mode::seeded);
    s.generator_.seed(seed);
    return s;
}

entropy_source entropy_source::fixed(std::vector<std::uint32_t> words) {
    entropy_source s(source_mode::fixed_sequence);
    s.sequence_ = std::move(words);
    return s;
}

std::uint32_t entropy_source::draw32() {
    switch (mode_) {
    case source_mode::hardware_sim:
        return static_cast<std::uint32_t>((*device_)());
    case source_mode::seeded:
        // Low half of one mt19937_64 output per draw.
        return static_cast<std::uint32_t>(generator_());
    case source_mode::fixed_sequence:
        if (next_ >= sequence_.size()) {
            throw entropy_exhausted("fixed entropy sequence exhausted");
        }
        return sequence_[next_++];
    }
    throw std::logic_error("unreachable entropy mode");
}

std::optional<std::size_t> entropy_source::remaining() const {
    if (mode_ != source_mode::fixed_sequence) {
        return std::nullopt;
    }
    return sequence_.size() - next_;
}

std::uint64_t seed_generator(entropy_source& source) {
    std::uint64_t high = source.draw32();
    std::uint64_t low = source.draw32();
    return (high << 32) ^ low;
}

} // namespace ukaslr::entropy
