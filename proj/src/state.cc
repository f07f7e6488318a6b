// Copyright 2026 The qloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qloop/state.h"

#include <cstdio>

#include "qloop/error.h"

namespace qloop {

unsigned LoopSpace::total_bits() const {
    return static_cast<unsigned>(residues) * bits_per_residue();
}

uint64_t LoopSpace::num_states() const {
    if (residues == 0) {
        throw Error(ErrorKind::Validation, "a loop needs at least one residue");
    }
    if (residues > 62 || total_bits() > 62) {
        throw Error(ErrorKind::StateSpaceTooLarge, "state space exceeds 2^62 states");
    }
    return uint64_t{1} << total_bits();
}

uint64_t LoopSpace::num_moves() const {
    if (move_bits() > 56 || residues > (uint64_t{1} << 20)) {
        throw Error(ErrorKind::StateSpaceTooLarge, "move register too wide");
    }
    return uint64_t{2} * residues * (uint64_t{1} << move_bits());
}

uint64_t LoopSpace::encode(const LoopState &state) const {
    validate(state);
    uint64_t index = 0;
    unsigned shift = 0;
    for (const auto &r : state.residues) {
        index |= static_cast<uint64_t>(r.i1) << shift;
        index |= static_cast<uint64_t>(r.i2) << (shift + b1);
        shift += bits_per_residue();
    }
    return index;
}

LoopState LoopSpace::decode(uint64_t index) const {
    if (index >= num_states()) {
        throw Error(ErrorKind::IndexOutOfRange, "state index " + std::to_string(index) + " outside the state space");
    }
    LoopState state;
    state.residues.resize(residues);
    const uint64_t mask1 = (uint64_t{1} << b1) - 1;
    const uint64_t mask2 = (uint64_t{1} << b2) - 1;
    for (auto &r : state.residues) {
        r.i1 = static_cast<uint32_t>(index & mask1);
        index >>= b1;
        r.i2 = static_cast<uint32_t>(index & mask2);
        index >>= b2;
    }
    return state;
}

void LoopSpace::validate(const LoopState &state) const {
    if (state.size() != residues) {
        throw Error(ErrorKind::LengthMismatch, "state has " + std::to_string(state.size()) + " residues, expected " +
                                                   std::to_string(residues));
    }
    for (size_t r = 0; r < state.size(); ++r) {
        const auto &idx = state.residues[r];
        if ((static_cast<uint64_t>(idx.i1) >> b1) != 0 || (static_cast<uint64_t>(idx.i2) >> b2) != 0) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "residue " + std::to_string(r + 1) + " has indices (" + std::to_string(idx.i1) + ", " +
                            std::to_string(idx.i2) + ") outside tables of length (" + std::to_string(1u << b1) +
                            ", " + std::to_string(1u << b2) + ")");
        }
    }
}

LoopState LoopSpace::zero_state() const {
    LoopState s;
    s.residues.resize(residues);
    return s;
}

std::string state_to_hex(const LoopState &state, const LoopSpace &space) {
    auto digits = [](unsigned bits) { return static_cast<int>(bits == 0 ? 1 : (bits + 3) / 4); };
    std::string out;
    char buf[32];
    for (size_t r = 0; r < state.size(); ++r) {
        if (r > 0) {
            out += '.';
        }
        std::snprintf(buf, sizeof(buf), "%0*x.%0*x", digits(space.b1), state.residues[r].i1, digits(space.b2),
                      state.residues[r].i2);
        out += buf;
    }
    return out;
}

}  // namespace qloop
