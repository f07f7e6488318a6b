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

#include "qloop/mcmc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qloop/error.h"

namespace qloop {

uint64_t move_index(const LoopSpace &space, const Move &move) {
    const unsigned b = space.move_bits();
    return move.mask | (static_cast<uint64_t>(move.reg) << b) | (static_cast<uint64_t>(move.residue) << (b + 1));
}

Move move_from_index(const LoopSpace &space, uint64_t index) {
    if (index >= space.num_moves()) {
        throw Error(ErrorKind::IndexOutOfRange, "move index " + std::to_string(index) + " out of range");
    }
    const unsigned b = space.move_bits();
    Move m;
    m.mask = index & ((uint64_t{1} << b) - 1);
    m.reg = static_cast<unsigned>((index >> b) & 1);
    m.residue = static_cast<size_t>(index >> (b + 1));
    return m;
}

Move propose_move(const LoopSpace &space, Rng &rng) {
    std::uniform_int_distribution<uint64_t> pick(0, space.num_moves() - 1);
    return move_from_index(space, pick(rng));
}

LoopState apply_move(const LoopState &state, const LoopSpace &space, const Move &move) {
    if (move.residue >= state.size() || move.reg > 1) {
        throw Error(ErrorKind::IndexOutOfRange, "move targets residue " + std::to_string(move.residue + 1) +
                                                    " register " + std::to_string(move.reg));
    }
    LoopState next = state;
    auto &r = next.residues[move.residue];
    if (move.reg == 0) {
        r.i1 ^= static_cast<uint32_t>(move.mask & ((uint64_t{1} << space.b1) - 1));
    } else {
        r.i2 ^= static_cast<uint32_t>(move.mask & ((uint64_t{1} << space.b2) - 1));
    }
    return next;
}

double mh_probability(double delta_energy, double temperature) {
    if (!(temperature > 0)) {
        throw Error(ErrorKind::Validation, "temperature must be positive");
    }
    if (std::isnan(delta_energy)) {
        throw Error(ErrorKind::Validation, "energy difference is NaN");
    }
    if (delta_energy <= 0) {
        return 1.0;
    }
    return std::exp(-delta_energy / temperature);
}

AcceptDecision mh_accept(double delta_energy, double temperature, Rng &rng) {
    const double p = mh_probability(delta_energy, temperature);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    return {u < p, p};
}

void ChainConfig::validate() const {
    if (!(temperature > 0) || !std::isfinite(temperature)) {
        throw Error(ErrorKind::Validation, "temperature must be positive");
    }
    if (steps < 1) {
        throw Error(ErrorKind::Validation, "steps must be >= 1");
    }
    if (thin < 1) {
        throw Error(ErrorKind::Validation, "thin must be >= 1");
    }
    if (burn_in > steps) {
        throw Error(ErrorKind::Validation, "burn_in exceeds steps");
    }
}

namespace {

double evaluate(const EnergyOracle &energy, const LoopState &state, uint64_t step) {
    double e;
    try {
        e = energy(state);
    } catch (const Error &err) {
        throw Error(err.kind(), "step " + std::to_string(step) + ": " + err.detail());
    }
    if (std::isnan(e)) {
        throw Error(ErrorKind::Validation, "step " + std::to_string(step) + ": energy oracle returned NaN");
    }
    return e;
}

}  // namespace

Trajectory run_chain(const LoopState &initial, const LoopSpace &space, const ChainConfig &cfg,
                     const EnergyOracle &energy) {
    cfg.validate();
    space.validate(initial);

    Rng rng(cfg.seed);
    Trajectory traj;
    traj.energy_trace.reserve(cfg.steps);
    traj.accepted_trace.reserve(cfg.steps);

    LoopState current = initial;
    double current_energy = evaluate(energy, current, 0);
    traj.best_state = current;
    traj.best_energy = current_energy;

    for (uint64_t step = 1; step <= cfg.steps; ++step) {
        const Move move = propose_move(space, rng);
        LoopState candidate = apply_move(current, space, move);
        const double candidate_energy =
            candidate == current ? current_energy : evaluate(energy, candidate, step);
        const AcceptDecision decision = mh_accept(candidate_energy - current_energy, cfg.temperature, rng);
        if (decision.accepted) {
            current = std::move(candidate);
            current_energy = candidate_energy;
            ++traj.accepted;
            if (current_energy < traj.best_energy) {
                traj.best_energy = current_energy;
                traj.best_state = current;
            }
        }
        traj.energy_trace.push_back(current_energy);
        traj.accepted_trace.push_back(decision.accepted);
        if (step > cfg.burn_in && (step - cfg.burn_in) % cfg.thin == 0) {
            traj.samples.push_back({step, current, current_energy, decision.accepted});
        }
    }
    traj.acceptance_rate = static_cast<double>(traj.accepted) / static_cast<double>(cfg.steps);
    traj.final_state = current;
    traj.final_energy = current_energy;
    return traj;
}

std::vector<double> enumerate_energies(const LoopSpace &space, const EnergyOracle &energy, uint64_t cap) {
    const uint64_t n = space.num_states();
    if (n > cap) {
        throw Error(ErrorKind::StateSpaceTooLarge,
                    "|Omega| = " + std::to_string(n) + " exceeds the cap of " + std::to_string(cap));
    }
    std::vector<double> out(n);
    for (uint64_t x = 0; x < n; ++x) {
        out[x] = energy(space.decode(x));
    }
    return out;
}

Eigen::VectorXd boltzmann_distribution(const std::vector<double> &energies, double temperature) {
    if (!(temperature > 0)) {
        throw Error(ErrorKind::Validation, "temperature must be positive");
    }
    const double e_min = *std::min_element(energies.begin(), energies.end());
    Eigen::VectorXd w(energies.size());
    for (size_t i = 0; i < energies.size(); ++i) {
        w[i] = std::exp(-(energies[i] - e_min) / temperature);
    }
    return w / w.sum();
}

TransitionMatrix build_transition_matrix(const LoopSpace &space, const std::vector<double> &energies,
                                         double temperature, uint64_t cap) {
    const uint64_t n = space.num_states();
    if (n > cap) {
        throw Error(ErrorKind::StateSpaceTooLarge,
                    "|Omega| = " + std::to_string(n) + " exceeds the cap of " + std::to_string(cap));
    }
    if (energies.size() != n) {
        throw Error(ErrorKind::LengthMismatch,
                    "got " + std::to_string(energies.size()) + " energies for " + std::to_string(n) + " states");
    }
    const uint64_t moves = space.num_moves();
    const double proposal = 1.0 / static_cast<double>(moves);

    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (uint64_t x = 0; x < n; ++x) {
        const LoopState state = space.decode(x);
        for (uint64_t m = 0; m < moves; ++m) {
            const uint64_t y = space.encode(apply_move(state, space, move_from_index(space, m)));
            const double a = mh_probability(energies[y] - energies[x], temperature);
            p(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) += proposal * a;
            p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) += proposal * (1.0 - a);
        }
    }
    return {std::move(p), space};
}

bool is_irreducible(const Eigen::MatrixXd &p) {
    const Eigen::Index n = p.rows();
    if (n == 0) {
        return false;
    }
    auto reaches_all = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<Eigen::Index> stack{0};
        seen[0] = 1;
        Eigen::Index count = 1;
        while (!stack.empty()) {
            const Eigen::Index from = stack.back();
            stack.pop_back();
            for (Eigen::Index to = 0; to < n; ++to) {
                const double w = transpose ? p(from, to) : p(to, from);
                if (w > 0 && !seen[to]) {
                    seen[to] = 1;
                    ++count;
                    stack.push_back(to);
                }
            }
        }
        return count == n;
    };
    return reaches_all(false) && reaches_all(true);
}

Eigen::VectorXd stationary_exact(const Eigen::MatrixXd &p) {
    if (p.rows() != p.cols()) {
        throw Error(ErrorKind::LengthMismatch, "transition matrix must be square");
    }
    if (!is_irreducible(p)) {
        throw Error(ErrorKind::Reducible, "transition graph is not strongly connected");
    }
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd a = p - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[n - 1] = 1.0;
    Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
    // Clip round-off negatives; the exact solution is strictly positive.
    pi = pi.cwiseMax(0.0);
    return pi / pi.sum();
}

double detailed_balance_violation(const Eigen::MatrixXd &p, const Eigen::VectorXd &pi) {
    double worst = 0;
    for (Eigen::Index x = 0; x < p.cols(); ++x) {
        for (Eigen::Index y = x + 1; y < p.rows(); ++y) {
            worst = std::max(worst, std::abs(pi[x] * p(y, x) - pi[y] * p(x, y)));
        }
    }
    return worst;
}

ReversibleSpectrum reversible_spectrum(const Eigen::MatrixXd &p) {
    ReversibleSpectrum out;
    try {
        out.stationary = stationary_exact(p);
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::Reducible) {
            throw Error(ErrorKind::ZeroGap, "reducible chain has a repeated unit eigenvalue: " + e.detail());
        }
        throw;
    }
    const double violation = detailed_balance_violation(p, out.stationary);
    if (violation > kReversibilityTolerance) {
        throw Error(ErrorKind::NotReversible, "detailed balance violated by " + std::to_string(violation));
    }
    const Eigen::VectorXd root = out.stationary.cwiseSqrt();
    const Eigen::VectorXd inv_root = root.cwiseInverse();
    Eigen::MatrixXd s = inv_root.asDiagonal() * p * root.asDiagonal();
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NotReversible, "symmetric eigensolve failed");
    }
    out.eigenvalues = solver.eigenvalues().reverse();
    if (out.eigenvalues.size() < 2) {
        throw Error(ErrorKind::ZeroGap, "a single-state chain has no second eigenvalue");
    }
    out.gap = out.eigenvalues[0] - out.eigenvalues[1];
    if (!(out.gap > 1e-12)) {
        throw Error(ErrorKind::ZeroGap, "spectral gap is zero");
    }
    return out;
}

double spectral_gap(const Eigen::MatrixXd &p) {
    return reversible_spectrum(p).gap;
}

Eigen::VectorXcd eigenvalues_direct(const Eigen::MatrixXd &p) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(p, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NotReversible, "dense eigensolve failed");
    }
    return solver.eigenvalues();
}

double spectral_gap_direct(const Eigen::MatrixXd &p) {
    const Eigen::VectorXcd ev = eigenvalues_direct(p);
    std::vector<double> re(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        re[i] = ev[i].real();
    }
    std::sort(re.begin(), re.end(), std::greater<>());
    if (re.size() < 2) {
        throw Error(ErrorKind::ZeroGap, "a single-state chain has no second eigenvalue");
    }
    return re[0] - re[1];
}

double total_variation(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::LengthMismatch, "distributions differ in length");
    }
    return 0.5 * (a - b).cwiseAbs().sum();
}

Eigen::VectorXd empirical_distribution(const Trajectory &traj, const LoopSpace &space) {
    const uint64_t n = space.num_states();
    Eigen::VectorXd hist = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (const auto &s : traj.samples) {
        hist[static_cast<Eigen::Index>(space.encode(s.state))] += 1.0;
    }
    if (!traj.samples.empty()) {
        hist /= static_cast<double>(traj.samples.size());
    }
    return hist;
}

}  // namespace qloop
