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

#include <cmath>
#include <random>

#include "gtest/gtest.h"

#include "qloop/error.h"

using namespace qloop;

namespace {

std::vector<double> random_energies(uint64_t n, uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, scale);
    std::vector<double> e(n);
    for (auto &x : e) {
        x = u(rng);
    }
    return e;
}

EnergyOracle table_oracle(const LoopSpace &space, std::vector<double> energies) {
    return [space, energies = std::move(energies)](const LoopState &s) { return energies[space.encode(s)]; };
}

}  // namespace

TEST(loop_space, encode_decode_round_trip) {
    const LoopSpace space{3, 2, 1};
    EXPECT_EQ(space.num_states(), 512u);
    EXPECT_EQ(space.num_moves(), 24u);
    for (uint64_t x = 0; x < space.num_states(); ++x) {
        ASSERT_EQ(space.encode(space.decode(x)), x);
    }
    LoopState s;
    s.residues = {{3, 0}, {0, 1}, {1, 1}};
    EXPECT_EQ(space.encode(s), 3u | (1u << 5) | (1u << 6) | (1u << 8));
    EXPECT_EQ(state_to_hex(s, space), "3.0.0.1.1.1");
}

TEST(loop_space, validate_names_residue) {
    const LoopSpace space{2, 2, 1};
    LoopState s;
    s.residues = {{1, 0}, {1, 2}};
    try {
        space.validate(s);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
        EXPECT_NE(std::string(e.what()).find("residue 2"), std::string::npos);
    }
}

TEST(moves, index_round_trip_and_layout) {
    const LoopSpace space{3, 3, 2};
    for (uint64_t m = 0; m < space.num_moves(); ++m) {
        ASSERT_EQ(move_index(space, move_from_index(space, m)), m);
    }
    const Move mv = move_from_index(space, 5 | (1 << 3) | (2 << 4));
    EXPECT_EQ(mv.mask, 5u);
    EXPECT_EQ(mv.reg, 1u);
    EXPECT_EQ(mv.residue, 2u);
    EXPECT_THROW(move_from_index(space, space.num_moves()), Error);
}

TEST(moves, apply_is_involution) {
    const LoopSpace space{2, 3, 1};
    std::mt19937_64 rng(31);
    for (int k = 0; k < 500; ++k) {
        const LoopState s = space.decode(std::uniform_int_distribution<uint64_t>(0, space.num_states() - 1)(rng));
        const Move m = propose_move(space, rng);
        const LoopState t = apply_move(s, space, m);
        ASSERT_NO_THROW(space.validate(t));
        ASSERT_EQ(apply_move(t, space, m), s);
    }
}

TEST(moves, mask_truncated_to_register_width) {
    const LoopSpace space{1, 1, 3};
    LoopState s;
    s.residues = {{0, 0}};
    const LoopState t = apply_move(s, space, Move{0, 0, 0b111});
    EXPECT_EQ(t.residues[0].i1, 1u);
    EXPECT_EQ(t.residues[0].i2, 0u);
    const LoopState u = apply_move(s, space, Move{0, 1, 0b101});
    EXPECT_EQ(u.residues[0].i2, 5u);
}

TEST(moves, proposal_marginals_uniform) {
    const LoopSpace space{2, 2, 1};
    const uint64_t n = space.num_moves();
    ASSERT_EQ(n, 16u);
    std::vector<uint64_t> counts(n, 0);
    Rng rng(32);
    const uint64_t draws = 160000;
    for (uint64_t k = 0; k < draws; ++k) {
        ++counts[move_index(space, propose_move(space, rng))];
    }
    const double expect = static_cast<double>(draws) / n;
    double chi2 = 0;
    for (uint64_t c : counts) {
        chi2 += (c - expect) * (c - expect) / expect;
    }
    // 15 degrees of freedom, p = 0.001.
    EXPECT_LT(chi2, 37.7);
}

TEST(mh_probability, values) {
    EXPECT_EQ(mh_probability(-3.0, 1.0), 1.0);
    EXPECT_EQ(mh_probability(0.0, 1.0), 1.0);
    EXPECT_NEAR(mh_probability(2.0 * std::log(2.0), 2.0), 0.5, 1e-15);
    EXPECT_EQ(mh_probability(std::numeric_limits<double>::infinity(), 1.0), 0.0);
    EXPECT_LT(mh_probability(800.0, 1.0), 1e-300);
    EXPECT_THROW(mh_probability(1.0, 0.0), Error);
}

TEST(mh_accept, single_draw) {
    Rng a(33), b(33);
    const AcceptDecision d = mh_accept(1.0, 1.0, a);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(b);
    EXPECT_EQ(d.accepted, u < std::exp(-1.0));
    EXPECT_EQ(a(), b());
}

TEST(run_chain, flat_energy_accepts_everything) {
    const LoopSpace space{3, 2, 2};
    ChainConfig cfg;
    cfg.steps = 2000;
    cfg.seed = 4;
    const Trajectory t = run_chain(space.zero_state(), space, cfg, [](const LoopState &) { return 0.0; });
    EXPECT_EQ(t.acceptance_rate, 1.0);
    EXPECT_EQ(t.accepted, 2000u);
    EXPECT_EQ(t.samples.size(), 2000u);
}

TEST(run_chain, burn_in_and_thinning) {
    const LoopSpace space{1, 2, 1};
    ChainConfig cfg;
    cfg.steps = 100;
    cfg.burn_in = 10;
    cfg.thin = 7;
    cfg.seed = 5;
    const Trajectory t = run_chain(space.zero_state(), space, cfg, [](const LoopState &) { return 0.0; });
    ASSERT_EQ(t.samples.size(), 12u);
    EXPECT_EQ(t.samples.front().step, 17u);
    EXPECT_EQ(t.samples.back().step, 94u);
    EXPECT_EQ(t.energy_trace.size(), 100u);
    cfg.burn_in = 100;
    EXPECT_TRUE(run_chain(space.zero_state(), space, cfg, [](const LoopState &) { return 0.0; }).samples.empty());
}

TEST(run_chain, deterministic_given_seed) {
    const LoopSpace space{2, 2, 1};
    const auto oracle = table_oracle(space, random_energies(space.num_states(), 6, 3.0));
    ChainConfig cfg;
    cfg.steps = 3000;
    cfg.seed = 77;
    const Trajectory a = run_chain(space.zero_state(), space, cfg, oracle);
    const Trajectory b = run_chain(space.zero_state(), space, cfg, oracle);
    EXPECT_EQ(a.energy_trace, b.energy_trace);
    EXPECT_EQ(a.accepted_trace, b.accepted_trace);
    EXPECT_EQ(a.final_state, b.final_state);
    cfg.seed = 78;
    const Trajectory c = run_chain(space.zero_state(), space, cfg, oracle);
    EXPECT_NE(a.accepted_trace, c.accepted_trace);
}

TEST(run_chain, oracle_errors_carry_step) {
    const LoopSpace space{1, 2, 0};
    ChainConfig cfg;
    cfg.steps = 100;
    cfg.seed = 9;
    auto oracle = [](const LoopState &s) -> double {
        if (s.residues[0].i1 == 3) {
            throw Error(ErrorKind::SingularFrame, "collinear");
        }
        return 0.0;
    };
    try {
        run_chain(space.zero_state(), space, cfg, oracle);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularFrame);
        EXPECT_NE(std::string(e.what()).find("step "), std::string::npos);
    }
}

TEST(run_chain, rejects_bad_config) {
    const LoopSpace space{1, 1, 1};
    ChainConfig cfg;
    cfg.thin = 0;
    EXPECT_THROW(run_chain(space.zero_state(), space, cfg, [](const LoopState &) { return 0.0; }), Error);
}

TEST(transition_matrix, two_state_toy_by_hand) {
    const LoopSpace space{1, 1, 0};
    const double T = 1.3;
    const TransitionMatrix p = build_transition_matrix(space, {0.0, T * std::log(2.0)}, T);
    Eigen::Matrix2d expect;
    expect << 7.0 / 8, 1.0 / 4, 1.0 / 8, 3.0 / 4;
    EXPECT_LT((p.matrix - expect).cwiseAbs().maxCoeff(), 1e-15);
    const Eigen::VectorXd pi = stationary_exact(p.matrix);
    EXPECT_NEAR(pi[0], 2.0 / 3, 1e-14);
    EXPECT_NEAR(pi[1], 1.0 / 3, 1e-14);
    EXPECT_EQ(detailed_balance_violation(p.matrix, pi) < 1e-15, true);
}

TEST(transition_matrix, flat_is_doubly_stochastic) {
    const LoopSpace space{2, 1, 1};
    const TransitionMatrix p = build_transition_matrix(space, std::vector<double>(16, 0.0), 1.0);
    EXPECT_LT((p.matrix.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_LT((p.matrix.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    const Eigen::VectorXd pi = stationary_exact(p.matrix);
    EXPECT_LT((pi.array() - 1.0 / 16).abs().maxCoeff(), 1e-12);
}

TEST(transition_matrix, properties_on_random_toys) {
    const LoopSpace spaces[] = {{1, 1, 1}, {1, 2, 1}, {1, 2, 2}, {2, 1, 1}, {1, 3, 0}, {2, 2, 0}};
    uint64_t seed = 100;
    for (const LoopSpace &space : spaces) {
        for (double T : {0.5, 1.0, 3.0}) {
            const auto e = random_energies(space.num_states(), ++seed, 4.0);
            const TransitionMatrix p = build_transition_matrix(space, e, T);
            ASSERT_GE(p.matrix.minCoeff(), 0.0);
            ASSERT_LT((p.matrix.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
            const Eigen::VectorXd boltz = boltzmann_distribution(e, T);
            ASSERT_LT(detailed_balance_violation(p.matrix, boltz), 1e-10);
            const Eigen::VectorXd pi = stationary_exact(p.matrix);
            ASSERT_NEAR(pi.sum(), 1.0, 1e-12);
            ASSERT_LT((pi - boltz).cwiseAbs().maxCoeff(), 1e-8);
            const ReversibleSpectrum rs = reversible_spectrum(p.matrix);
            ASSERT_NEAR(rs.eigenvalues[0], 1.0, 1e-10);
            ASSERT_GT(rs.gap, 0.0);
            ASSERT_LE(rs.gap, 2.0);
            ASSERT_NEAR(rs.gap, spectral_gap_direct(p.matrix), 1e-9);
        }
    }
}

TEST(transition_matrix, cap_enforced) {
    const LoopSpace space{2, 4, 3};
    try {
        build_transition_matrix(space, std::vector<double>(space.num_states(), 0.0), 1.0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::StateSpaceTooLarge);
    }
}

TEST(spectral_gap, two_state_closed_form) {
    for (auto [p, q] : {std::pair{0.3, 0.1}, std::pair{0.5, 0.5}, std::pair{0.9, 0.7}}) {
        Eigen::Matrix2d m;
        m << 1 - p, q, p, 1 - q;
        EXPECT_NEAR(spectral_gap(m), p + q, 1e-12);
        EXPECT_NEAR(spectral_gap_direct(m), p + q, 1e-12);
    }
}

TEST(spectral_gap, flat_single_residue_dual_route) {
    const LoopSpace space{1, 1, 1};
    const TransitionMatrix p = build_transition_matrix(space, std::vector<double>(4, 0.0), 1.0);
    EXPECT_NEAR(spectral_gap(p.matrix), spectral_gap_direct(p.matrix), 1e-9);
    EXPECT_NEAR(spectral_gap(p.matrix), 0.5, 1e-12);
}

TEST(spectral_gap, identity_chain_flagged) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
    try {
        spectral_gap(id);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroGap);
    }
    try {
        stationary_exact(id);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Reducible);
    }
}

TEST(spectral_gap, non_reversible_rejected) {
    Eigen::Matrix3d m;
    m << 0.4, 0.0, 0.6, 0.6, 0.4, 0.0, 0.0, 0.6, 0.4;
    try {
        spectral_gap(m);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotReversible);
    }
}

TEST(run_chain, empirical_matches_stationary) {
    const LoopSpace spaces[] = {{1, 1, 0}, {1, 1, 1}, {1, 2, 2}};
    uint64_t seed = 200;
    for (const LoopSpace &space : spaces) {
        const double T = 1.0;
        auto e = random_energies(space.num_states(), ++seed, 2.0);
        if (space.num_states() == 2) {
            e = {0.0, T * std::log(2.0)};
        }
        const Eigen::VectorXd pi = stationary_exact(build_transition_matrix(space, e, T).matrix);
        ChainConfig cfg;
        cfg.temperature = T;
        cfg.burn_in = 1000;
        cfg.steps = 101000;
        cfg.seed = seed;
        const Trajectory t = run_chain(space.zero_state(), space, cfg, table_oracle(space, e));
        ASSERT_EQ(t.samples.size(), 100000u);
        EXPECT_LT(total_variation(empirical_distribution(t, space), pi), 0.02) << space.num_states();
    }
}

TEST(total_variation, basics) {
    Eigen::Vector3d a(0.5, 0.5, 0.0), b(0.0, 0.5, 0.5);
    EXPECT_NEAR(total_variation(a, b), 0.5, 1e-15);
    EXPECT_EQ(total_variation(a, a), 0.0);
    EXPECT_THROW(total_variation(a, Eigen::Vector2d(1, 0)), Error);
}
