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


#ifndef QLOOP_QWALK_H
#define QLOOP_QWALK_H

#include <algorithm>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qloop/mcmc.h"
#include "qloop/state.h"

namespace qloop {

inline constexpr uint64_t kDefaultWalkCap = 8192;

/// System (x) tensor Move (m) tensor Coin (c). Basis index (x * |M| + m) * 2 + c.
struct WalkSpace {
    LoopSpace loop;
    uint64_t system_dim = 0;
    uint64_t move_dim = 0;
    uint64_t dim = 0;

    /// Throws StateSpaceTooLarge when |Omega| * |M| * 2 exceeds `cap`.
    static WalkSpace make(const LoopSpace &loop, uint64_t cap = kDefaultWalkCap);

    Eigen::Index index(uint64_t x, uint64_t m, unsigned c) const {
        return static_cast<Eigen::Index>((x * move_dim + m) * 2 + c);
    }
};

/// All walk operators are real orthogonal, so they are stored as real
/// matrices; adjoints are transposes.
struct WalkOperators {
    WalkSpace space;
    Eigen::MatrixXd V;
    Eigen::MatrixXd B;
    Eigen::MatrixXd F;
    Eigen::MatrixXd R;
    Eigen::MatrixXd W;
};

/// Hadamard transform on the move register. Throws NonPowerOfTwo.
Eigen::MatrixXd build_V(const WalkSpace &space);

/// Coin rotation per (x, m) block: |0> -> sqrt(1-A)|0> + sqrt(A)|1>.
Eigen::MatrixXd build_B(const WalkSpace &space, const std::vector<double> &energies, double temperature);

/// Applies move m to x when the coin is 1.
Eigen::MatrixXd build_F(const WalkSpace &space);

/// -1 on (x, m = 0, c = 0), +1 elsewhere.
Eigen::MatrixXd build_R(const WalkSpace &space);

/// W = R V^T B^T F B V.
WalkOperators build_walk(const WalkSpace &space, const std::vector<double> &energies, double temperature);

/// max |U^T U - I|.
double unitarity_error(const Eigen::MatrixXd &u);

struct PhaseGap {
    double exact = 0;
    double approx = 0;
};

/// (arccos(1 - delta), sqrt(2 delta)) for delta in (0, 1].
PhaseGap phase_gap(double delta);

/// sum_x sqrt(pi_x) |x>|0>|0>.
Eigen::VectorXd coherent_stationary_state(const WalkSpace &space, const Eigen::VectorXd &pi);

/// sum_x |x>|0>|0> / sqrt(|Omega|).
Eigen::VectorXd uniform_system_state(const WalkSpace &space);

struct StationaryCheck {
    int sigma = 1;
    double rayleigh = 0;
    double residual = 0;
};

/// Sign of <v|W|v> and ||W v - sigma v||.
StationaryCheck check_stationary_eigenvector(const Eigen::MatrixXd &w, const Eigen::VectorXd &v);

/// One classical eigenvalue lambda paired with the walk eigenvalues closest to
/// sign * exp(+i arccos lambda) and sign * exp(-i arccos lambda). At
/// lambda = +-1 the two targets coincide and only `plus` is used.
struct EigenphaseMatch {
    double lambda = 0;
    double target_phase = 0;
    std::complex<double> plus;
    std::complex<double> minus;
    double residual_plus = 0;
    double residual_minus = 0;
    bool single = false;

    double residual() const {
        return single ? residual_plus : std::max(residual_plus, residual_minus);
    }
};

struct MatchReport {
    int sign = 1;
    std::vector<EigenphaseMatch> matches;
    double max_residual = 0;
    size_t unmatched = 0;
};

inline constexpr double kPhaseMatchTolerance = 1e-8;

/// Greedy nearest-neighbour pairing. A walk eigenvalue within `tolerance` of a
/// target is consumed and cannot match again; misses consume nothing.
/// Residuals are angular distances, except near lambda = +-1 where the
/// distance |z - target| is used instead.
MatchReport match_eigenphases(const Eigen::VectorXcd &walk_eigenvalues, const Eigen::VectorXd &lambdas, int sign,
                              double tolerance = kPhaseMatchTolerance);

Eigen::VectorXcd walk_eigenvalues(const Eigen::MatrixXd &w);

struct SpectrumReport {
    Eigen::VectorXd classical;
    Eigen::VectorXd stationary;
    double gap = 0;
    PhaseGap phases;
    StationaryCheck stationary_check;
    Eigen::VectorXcd walk;
    MatchReport literal;
    MatchReport signed_match;
    double max_modulus_error = 0;
};

/// Classical spectrum of `p`, walk spectrum of `ops.W`, and both matchings:
/// against exp(+-i arccos lambda) and against sigma * exp(+-i arccos lambda).
SpectrumReport analyze_walk(const WalkOperators &ops, const Eigen::MatrixXd &p);

std::string spectrum_report_json(const SpectrumReport &report);

/// Smallest angular distance between the phase of `sigma` and any walk
/// eigenphase that is not within 1e-6 of it.
double walk_phase_gap(const Eigen::MatrixXd &w, int sigma);

/// Ideal phase estimation simulated by spectral projection. The bin of width
/// `resolution` is centred on the phase of `sigma` (0 for +1, pi for -1).
struct QpeProjection {
    int sigma = 1;
    double resolution = 0;
    double walk_phase_gap = 0;
    double success_probability = 0;
    /// System-register distribution conditioned on success.
    Eigen::VectorXd distribution;
};

/// Throws ResolutionTooCoarse when resolution >= the walk's phase gap around
/// sigma, and Validation when `initial` is not normalised.
QpeProjection qpe_project(const WalkOperators &ops, const Eigen::VectorXd &initial, double resolution, int sigma);

struct QpeSample {
    bool success = false;
    std::optional<uint64_t> state;
    double success_probability = 0;
};

QpeSample qpe_sample(const QpeProjection &proj, Rng &rng);

/// Convenience form: projection followed by one draw.
QpeSample qpe_sample(const WalkOperators &ops, const Eigen::VectorXd &initial, double resolution, int sigma, Rng &rng);

}  // namespace qloop

#endif  // QLOOP_QWALK_H
