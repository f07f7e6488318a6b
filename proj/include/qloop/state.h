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

#ifndef QLOOP_STATE_H
#define QLOOP_STATE_H

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qloop {

/// Lookup-table indices for a single residue: `i1` selects a (phi, psi)
/// backbone pair, `i2` selects a chi1 side-chain angle.
struct ResidueIndices {
    uint32_t i1 = 0;
    uint32_t i2 = 0;

    bool operator==(const ResidueIndices &) const = default;
};

/// The Markov-chain state: one pair of table indices per residue.
struct LoopState {
    std::vector<ResidueIndices> residues;

    size_t size() const {
        return residues.size();
    }
    bool operator==(const LoopState &) const = default;
};

/// Shape of the discrete state space: L residues, each with a b1-bit backbone
/// register and a b2-bit side-chain register.
///
/// States are enumerated little-endian: residue 0 occupies the least
/// significant L-th slice, and inside a residue the backbone register sits
/// below the side-chain register.
struct LoopSpace {
    size_t residues = 1;
    unsigned b1 = 1;
    unsigned b2 = 1;

    unsigned bits_per_residue() const {
        return b1 + b2;
    }
    unsigned total_bits() const;
    uint64_t num_states() const;

    /// Width of the move mask register, max(b1, b2). A mask wider than the
    /// targeted register is truncated to that register's width.
    unsigned move_bits() const {
        return b1 > b2 ? b1 : b2;
    }
    /// |M| = 2 * L * 2^b.
    uint64_t num_moves() const;

    uint64_t encode(const LoopState &state) const;
    LoopState decode(uint64_t index) const;

    /// Throws IndexOutOfRange naming the first offending residue.
    void validate(const LoopState &state) const;

    LoopState zero_state() const;
};

/// Hex dump of the index registers, residue by residue, e.g. "3f.07.10.01".
std::string state_to_hex(const LoopState &state, const LoopSpace &space);

}  // namespace qloop

#endif  // QLOOP_STATE_H
