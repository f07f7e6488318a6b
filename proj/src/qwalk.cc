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


#include "qloop/qwalk.h"

#include <bit>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "qloop/error.h"
#include "qloop/geometry.h"

namespace qloop {

namespace {

// targets[x * |M| + m] = index of the state reached from x by move m.
std::vector<uint64_t> move_targets(const WalkSpace &space) {
    std::vector<uint64_t> out(space.system_dim * space.move_dim);
    for (uint64_t x = 0; x < space.system_dim; ++x) {
        const LoopState s = space.loop.decode(x);
        for (uint64_t m = 0; m < space.move_dim; ++m) {
            out[x * space.move_dim + m] = space.loop.encode(apply_move(s, space.loop, move_from_index(space.loop, m)));
        }
    }
    return out;
}

double angular_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), kTwoPi);
    return d > kPi ? kTwoPi - d : d;
}

void check_energies(const WalkSpace &space, const std::vector<double> &energies) {
    if (energies.size() != space.system_dim) {
        throw Error(ErrorKind::LengthMismatch, "expected " + std::to_string(space.system_dim) + " energies, got " +
                                                   std::to_string(energies.size()));
    }
}

}  // namespace

WalkSpace WalkSpace::make(const LoopSpace &loop, uint64_t cap) {
    WalkSpace s;
    s.loop = loop;
    if (loop.residues == 0 || loop.total_bits() >= 40) {
        throw Error(ErrorKind::StateSpaceTooLarge, "walk state space too large");
    }
    s.system_dim = loop.num_states();
    s.move_dim = loop.num_moves();
    if (s.move_dim > cap || s.system_dim > cap / (2 * s.move_dim)) {
        throw Error(ErrorKind::StateSpaceTooLarge, "walk dimension " + std::to_string(s.system_dim) + " x " +
                                                       std::to_string(s.move_dim) + " x 2 exceeds cap " +
                                                       std::to_string(cap));
    }
    s.dim = s.system_dim * s.move_dim * 2;
    return s;
}

Eigen::MatrixXd build_V(const WalkSpace &space) {
    const uint64_t mdim = space.move_dim;
    if (!std::has_single_bit(mdim)) {
        throw Error(ErrorKind::NonPowerOfTwo,
                    "move register dimension " + std::to_string(mdim) + " is not a power of two");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(mdim));
    const auto n = static_cast<Eigen::Index>(space.dim);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
    for (uint64_t x = 0; x < space.system_dim; ++x) {
        for (uint64_t i = 0; i < mdim; ++i) {
            for (uint64_t j = 0; j < mdim; ++j) {
                const double h = (std::popcount(i & j) & 1) ? -scale : scale;
                for (unsigned c = 0; c < 2; ++c) {
                    v(space.index(x, i, c), space.index(x, j, c)) = h;
                }
            }
        }
    }
    return v;
}

Eigen::MatrixXd build_B(const WalkSpace &space, const std::vector<double> &energies, double temperature) {
    check_energies(space, energies);
    const auto targets = move_targets(space);
    const auto n = static_cast<Eigen::Index>(space.dim);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (uint64_t x = 0; x < space.system_dim; ++x) {
        for (uint64_t m = 0; m < space.move_dim; ++m) {
            const uint64_t y = targets[x * space.move_dim + m];
            const double a = mh_probability(energies[y] - energies[x], temperature);
            const double theta = std::asin(std::sqrt(a));
            const double c = std::cos(theta);
            const double s = std::sin(theta);
            const auto i0 = space.index(x, m, 0);
            const auto i1 = space.index(x, m, 1);
            b(i0, i0) = c;
            b(i1, i0) = s;
            b(i0, i1) = -s;
            b(i1, i1) = c;
        }
    }
    return b;
}

Eigen::MatrixXd build_F(const WalkSpace &space) {
    const auto targets = move_targets(space);
    const auto n = static_cast<Eigen::Index>(space.dim);
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
    for (uint64_t x = 0; x < space.system_dim; ++x) {
        for (uint64_t m = 0; m < space.move_dim; ++m) {
            f(space.index(x, m, 0), space.index(x, m, 0)) = 1;
            f(space.index(targets[x * space.move_dim + m], m, 1), space.index(x, m, 1)) = 1;
        }
    }
    return f;
}

Eigen::MatrixXd build_R(const WalkSpace &space) {
    const auto n = static_cast<Eigen::Index>(space.dim);
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
    for (uint64_t x = 0; x < space.system_dim; ++x) {
        r(space.index(x, 0, 0), space.index(x, 0, 0)) = -1;
    }
    return r;
}

WalkOperators build_walk(const WalkSpace &space, const std::vector<double> &energies, double temperature) {
    WalkOperators ops;
    ops.space = space;
    ops.V = build_V(space);
    ops.B = build_B(space, energies, temperature);
    ops.F = build_F(space);
    ops.R = build_R(space);
    const Eigen::MatrixXd bv = ops.B * ops.V;
    ops.W = ops.R * (bv.transpose() * (ops.F * bv));
    return ops;
}

double unitarity_error(const Eigen::MatrixXd &u) {
    if (u.rows() != u.cols()) {
        throw Error(ErrorKind::LengthMismatch, "operator is not square");
    }
    return (u.transpose() * u - Eigen::MatrixXd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

PhaseGap phase_gap(double delta) {
    if (!(delta > 0) || delta > 1) {
        throw Error(ErrorKind::Validation, "phase gap needs delta in (0, 1], got " + std::to_string(delta));
    }
    return {std::acos(1.0 - delta), std::sqrt(2.0 * delta)};
}

Eigen::VectorXd coherent_stationary_state(const WalkSpace &space, const Eigen::VectorXd &pi) {
    if (static_cast<uint64_t>(pi.size()) != space.system_dim) {
        throw Error(ErrorKind::LengthMismatch, "stationary vector has wrong length");
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dim));
    for (uint64_t x = 0; x < space.system_dim; ++x) {
        v(space.index(x, 0, 0)) = std::sqrt(std::max(0.0, pi(static_cast<Eigen::Index>(x))));
    }
    return v;
}

Eigen::VectorXd uniform_system_state(const WalkSpace &space) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dim));
    const double amp = 1.0 / std::sqrt(static_cast<double>(space.system_dim));
    for (uint64_t x = 0; x < space.system_dim; ++x) {
        v(space.index(x, 0, 0)) = amp;
    }
    return v;
}

StationaryCheck check_stationary_eigenvector(const Eigen::MatrixXd &w, const Eigen::VectorXd &v) {
    StationaryCheck out;
    const Eigen::VectorXd wv = w * v;
    out.rayleigh = v.dot(wv) / v.squaredNorm();
    out.sigma = out.rayleigh < 0 ? -1 : 1;
    out.residual = (wv - out.sigma * v).norm();
    return out;
}

Eigen::VectorXcd walk_eigenvalues(const Eigen::MatrixXd &w) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(w, false);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorKind::Validation, "walk eigensolve did not converge");
    }
    Eigen::VectorXcd z = es.eigenvalues();
    std::vector<std::complex<double>> sorted(z.data(), z.data() + z.size());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto &a, const auto &b) {
        return std::arg(a) != std::arg(b) ? std::arg(a) < std::arg(b) : std::abs(a) < std::abs(b);
    });
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z(i) = sorted[static_cast<size_t>(i)];
    }
    return z;
}

MatchReport match_eigenphases(const Eigen::VectorXcd &walk, const Eigen::VectorXd &lambdas, int sign,
                              double tolerance) {
    if (sign != 1 && sign != -1) {
        throw Error(ErrorKind::Validation, "sign must be +1 or -1");
    }
    MatchReport report;
    report.sign = sign;
    std::vector<bool> used(static_cast<size_t>(walk.size()), false);

    auto take = [&](std::complex<double> target, bool near_real, double &residual) {
        size_t best = used.size();
        double best_res = 0;
        for (size_t k = 0; k < used.size(); ++k) {
            if (used[k]) {
                continue;
            }
            const auto z = walk(static_cast<Eigen::Index>(k));
            const double r = near_real ? std::abs(z - target) : angular_distance(std::arg(z), std::arg(target));
            if (best == used.size() || r < best_res) {
                best = k;
                best_res = r;
            }
        }
        if (best == used.size()) {
            residual = std::numeric_limits<double>::infinity();
            return std::complex<double>(std::nan(""), std::nan(""));
        }
        if (best_res <= tolerance) {
            used[best] = true;
        }
        residual = best_res;
        return walk(static_cast<Eigen::Index>(best));
    };

    for (Eigen::Index j = 0; j < lambdas.size(); ++j) {
        EigenphaseMatch m;
        m.lambda = std::clamp(lambdas(j), -1.0, 1.0);
        m.target_phase = std::acos(m.lambda);
        const double s = std::sqrt(std::max(0.0, 1.0 - m.lambda * m.lambda));
        m.single = s <= 1e-6;
        if (m.single) {
            m.lambda = m.lambda > 0 ? 1.0 : -1.0;
            m.target_phase = std::acos(m.lambda);
        }
        const std::complex<double> plus(sign * m.lambda, m.single ? 0.0 : sign * s);
        m.plus = take(plus, m.single, m.residual_plus);
        if (!m.single) {
            m.minus = take(std::conj(plus), false, m.residual_minus);
        } else {
            m.minus = m.plus;
            m.residual_minus = m.residual_plus;
        }
        if (!(m.residual() <= tolerance)) {
            ++report.unmatched;
        }
        report.max_residual = std::max(report.max_residual, m.residual());
        report.matches.push_back(m);
    }
    return report;
}

SpectrumReport analyze_walk(const WalkOperators &ops, const Eigen::MatrixXd &p) {
    if (static_cast<uint64_t>(p.rows()) != ops.space.system_dim) {
        throw Error(ErrorKind::LengthMismatch, "transition matrix does not match the walk's system register");
    }
    SpectrumReport rep;
    const ReversibleSpectrum rs = reversible_spectrum(p);
    rep.classical = rs.eigenvalues;
    rep.stationary = rs.stationary;
    rep.gap = rs.gap;
    rep.phases = phase_gap(std::min(1.0, rs.gap));
    rep.stationary_check = check_stationary_eigenvector(ops.W, coherent_stationary_state(ops.space, rs.stationary));
    rep.walk = walk_eigenvalues(ops.W);
    for (Eigen::Index k = 0; k < rep.walk.size(); ++k) {
        rep.max_modulus_error = std::max(rep.max_modulus_error, std::abs(std::abs(rep.walk(k)) - 1.0));
    }
    rep.literal = match_eigenphases(rep.walk, rep.classical, 1);
    rep.signed_match = match_eigenphases(rep.walk, rep.classical, rep.stationary_check.sigma);
    return rep;
}

namespace {

nlohmann::json match_json(const MatchReport &m) {
    nlohmann::json out;
    out["sign"] = m.sign;
    out["max_residual"] = m.max_residual;
    out["unmatched"] = m.unmatched;
    auto arr = nlohmann::json::array();
    for (const auto &e : m.matches) {
        nlohmann::json j;
        j["lambda"] = e.lambda;
        j["target_phase"] = e.target_phase;
        j["plus"] = {{"re", e.plus.real()}, {"im", e.plus.imag()}, {"phase", std::arg(e.plus)}};
        j["residual_plus"] = e.residual_plus;
        if (!e.single) {
            j["minus"] = {{"re", e.minus.real()}, {"im", e.minus.imag()}, {"phase", std::arg(e.minus)}};
            j["residual_minus"] = e.residual_minus;
        }
        arr.push_back(j);
    }
    out["matches"] = arr;
    return out;
}

}  // namespace

std::string spectrum_report_json(const SpectrumReport &rep) {
    nlohmann::json out;
    out["classical_eigenvalues"] = std::vector<double>(rep.classical.data(), rep.classical.data() + rep.classical.size());
    out["stationary"] = std::vector<double>(rep.stationary.data(), rep.stationary.data() + rep.stationary.size());
    out["spectral_gap"] = rep.gap;
    out["phase_gap"] = {{"exact", rep.phases.exact}, {"approx", rep.phases.approx}};
    out["sigma"] = rep.stationary_check.sigma;
    out["stationary_residual"] = rep.stationary_check.residual;
    out["max_modulus_error"] = rep.max_modulus_error;
    out["match_literal"] = match_json(rep.literal);
    out["match_signed"] = match_json(rep.signed_match);
    auto phases = nlohmann::json::array();
    for (Eigen::Index k = 0; k < rep.walk.size(); ++k) {
        phases.push_back(std::arg(rep.walk(k)));
    }
    out["walk_eigenphases"] = phases;
    return out.dump(2) + "\n";
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> symmetric_part_eigen(const Eigen::MatrixXd &w) {
    // W is real orthogonal, hence normal: its symmetric part shares its
    // invariant subspaces and has eigenvalue cos(phase) on each.
    const Eigen::MatrixXd sym = 0.5 * (w + w.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorKind::Validation, "walk eigensolve did not converge");
    }
    return es;
}

double phase_gap_from(const Eigen::VectorXd &mu, int sigma) {
    double gap = kPi;
    for (Eigen::Index k = 0; k < mu.size(); ++k) {
        const double d = std::acos(std::clamp(sigma * mu(k), -1.0, 1.0));
        if (d > 1e-6) {
            gap = std::min(gap, d);
        }
    }
    return gap;
}

void check_sigma(int sigma) {
    if (sigma != 1 && sigma != -1) {
        throw Error(ErrorKind::Validation, "sigma must be +1 or -1");
    }
}

}  // namespace

double walk_phase_gap(const Eigen::MatrixXd &w, int sigma) {
    check_sigma(sigma);
    return phase_gap_from(symmetric_part_eigen(w).eigenvalues(), sigma);
}

QpeProjection qpe_project(const WalkOperators &ops, const Eigen::VectorXd &initial, double resolution, int sigma) {
    const WalkSpace &space = ops.space;
    check_sigma(sigma);
    if (static_cast<uint64_t>(initial.size()) != space.dim) {
        throw Error(ErrorKind::LengthMismatch, "initial state has wrong dimension");
    }
    if (std::abs(initial.norm() - 1.0) > 1e-9) {
        throw Error(ErrorKind::Validation, "initial state is not normalised");
    }
    if (!(resolution > 0)) {
        throw Error(ErrorKind::Validation, "resolution must be positive");
    }
    const auto es = symmetric_part_eigen(ops.W);
    const Eigen::VectorXd mu = es.eigenvalues();

    QpeProjection out;
    out.sigma = sigma;
    out.resolution = resolution;
    out.walk_phase_gap = phase_gap_from(mu, sigma);
    if (resolution >= out.walk_phase_gap) {
        throw Error(ErrorKind::ResolutionTooCoarse, "bin width " + std::to_string(resolution) +
                                                        " is not below the walk phase gap " +
                                                        std::to_string(out.walk_phase_gap));
    }
    const double edge = std::cos(0.5 * resolution);
    Eigen::VectorXd projected = Eigen::VectorXd::Zero(initial.size());
    for (Eigen::Index k = 0; k < mu.size(); ++k) {
        if (sigma * mu(k) >= edge) {
            const auto col = es.eigenvectors().col(k);
            projected += col.dot(initial) * col;
        }
    }
    out.success_probability = projected.squaredNorm();
    out.distribution = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.system_dim));
    if (out.success_probability > 0) {
        for (uint64_t x = 0; x < space.system_dim; ++x) {
            double acc = 0;
            for (uint64_t m = 0; m < space.move_dim; ++m) {
                for (unsigned c = 0; c < 2; ++c) {
                    const double a = projected(space.index(x, m, c));
                    acc += a * a;
                }
            }
            out.distribution(static_cast<Eigen::Index>(x)) = acc / out.success_probability;
        }
    }
    return out;
}

QpeSample qpe_sample(const QpeProjection &proj, Rng &rng) {
    QpeSample out;
    out.success_probability = proj.success_probability;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    out.success = u(rng) < proj.success_probability;
    if (out.success) {
        std::discrete_distribution<uint64_t> pick(proj.distribution.data(),
                                                  proj.distribution.data() + proj.distribution.size());
        out.state = pick(rng);
    }
    return out;
}

QpeSample qpe_sample(const WalkOperators &ops, const Eigen::VectorXd &initial, double resolution, int sigma,
                     Rng &rng) {
    return qpe_sample(qpe_project(ops, initial, resolution, sigma), rng);
}

}  // namespace qloop
