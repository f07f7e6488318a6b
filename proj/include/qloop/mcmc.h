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

#ifndef QLOOP_MCMC_H
#define QLOOP_MCMC_H

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "qloop/state.h"

namespace qloop {

using Rng = std::mt19937_64;

/// One element of the move set: XOR `mask` into register `reg` (0 = backbone
/// (phi, psi), 1 = chi1) of residue `residue` (0-based). The mask is b =
/// max(b1, b2) bits wide and is truncated to the width of the targeted
/// register when applied.
struct Move {
    size_t residue = 0;
    unsigned reg = 0;
    uint64_t mask = 0;

    bool operator==(const Move &) const = default;
};

/// Move register layout: mask in the low b bits, then the register bit, then
/// the residue. Index 0 is the identity move on residue 0's backbone.
uint64_t move_index(const LoopSpace &space, const Move &move);
Move move_from_index(const LoopSpace &space, uint64_t index);

/// Uniform over all 2 * L * 2^b moves.
Move propose_move(const LoopSpace &space, Rng &rng);

LoopState apply_move(const LoopState &state, const LoopSpace &space, const Move &move);

/// min{1, exp(-dE / T)}.
double mh_probability(double delta_energy, double temperature);

struct AcceptDecision {
    bool accepted = false;
    double probability = 0;
};

/// Draws exactly one uniform variate per call.
AcceptDecision mh_accept(double delta_energy, double temperature, Rng &rng);

struct ChainConfig {
    double temperature = 1.0;
    /// Total steps, burn-in included.
    uint64_t steps = 1;
    uint64_t burn_in = 0;
    uint64_t thin = 1;
    uint64_t seed = 0;

    void validate() const;
};

struct ChainSample {
    uint64_t step = 0;
    LoopState state;
    double energy = 0;
    bool accepted = false;
};

struct Trajectory {
    /// Post burn-in samples, every `thin`-th step.
    std::vector<ChainSample> samples;
    /// Energy of the chain after every step.
    std::vector<double> energy_trace;
    std::vector<bool> accepted_trace;
    uint64_t accepted = 0;
    double acceptance_rate = 0;
    LoopState final_state;
    double final_energy = 0;
    LoopState best_state;
    double best_energy = 0;
};

using EnergyOracle = std::function<double(const LoopState &)>;

/// Metropolis-Hastings over the XOR move set. Only the proposed state is
/// evaluated each step; the current energy is cached. Oracle failures are
/// re-raised with their kind and the step index.
Trajectory run_chain(const LoopState &initial, const LoopSpace &space, const ChainConfig &cfg,
                     const EnergyOracle &energy);

inline constexpr uint64_t kDefaultStateCap = 4096;

/// Energies of every state in enumeration order.
std::vector<double> enumerate_energies(const LoopSpace &space, const EnergyOracle &energy,
                                       uint64_t cap = kDefaultStateCap);

/// Normalised exp(-E/T), shifted by min E for stability.
Eigen::VectorXd boltzmann_distribution(const std::vector<double> &energies, double temperature);

/// Column-stochastic P with P(x', x) = probability of moving x -> x'.
struct TransitionMatrix {
    Eigen::MatrixXd matrix;
    LoopSpace space;
};

TransitionMatrix build_transition_matrix(const LoopSpace &space, const std::vector<double> &energies,
                                         double temperature, uint64_t cap = kDefaultStateCap);

/// Strong connectivity of the directed graph of positive entries.
bool is_irreducible(const Eigen::MatrixXd &p);

/// Solves (P - I) pi = 0, sum(pi) = 1. Throws Reducible.
Eigen::VectorXd stationary_exact(const Eigen::MatrixXd &p);

/// max |pi_x P(x', x) - pi_x' P(x, x')|.
double detailed_balance_violation(const Eigen::MatrixXd &p, const Eigen::VectorXd &pi);

inline constexpr double kReversibilityTolerance = 1e-10;

struct ReversibleSpectrum {
    Eigen::VectorXd stationary;
    /// Descending.
    Eigen::VectorXd eigenvalues;
    double gap = 0;
};

/// Eigenvalues of the symmetrised D^{-1/2} P D^{1/2} (D = diag(pi)).
/// Throws NotReversible, or ZeroGap when the chain is reducible or the gap
/// vanishes.
ReversibleSpectrum reversible_spectrum(const Eigen::MatrixXd &p);

double spectral_gap(const Eigen::MatrixXd &p);

/// Independent route: general dense eigensolve of P itself. Returns
/// lambda_1 - lambda_2 after sorting real parts.
double spectral_gap_direct(const Eigen::MatrixXd &p);
Eigen::VectorXcd eigenvalues_direct(const Eigen::MatrixXd &p);

/// Total-variation distance 0.5 * sum |a - b|.
double total_variation(const Eigen::VectorXd &a, const Eigen::VectorXd &b);

/// Histogram of the recorded samples over the enumerated state space.
Eigen::VectorXd empirical_distribution(const Trajectory &traj, const LoopSpace &space);

}  // namespace qloop

#endif  // QLOOP_MCMC_H
