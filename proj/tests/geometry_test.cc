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


#include "qloop/geometry.h"

#include <random>
#include <sstream>

#include <Eigen/Geometry>
#include "gtest/gtest.h"

#include "qloop/error.h"
#include "qloop/structure_io.h"

using namespace qloop;

namespace {

// Rotation-based construction: tilt the bond direction by theta about the
// frame normal, then spin it by phi about the bond axis.
Vec3 rotation_oracle(const Vec3 &a, const Vec3 &b, const Vec3 &c, double phi, double theta, double r_cd) {
    const Vec3 u = (c - b).normalized();
    const Vec3 n = (b - a).cross(u).normalized();
    const Vec3 tilted = Eigen::AngleAxisd(theta, n) * u;
    return c + r_cd * (Eigen::AngleAxisd(phi, u) * tilted);
}

double angle_diff(double x, double y) {
    double d = std::fmod(std::abs(x - y), kTwoPi);
    return d > kPi ? kTwoPi - d : d;
}

struct Frame {
    Vec3 a, b, c;
    double phi, theta, r_cd;
};

Frame random_frame(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    std::uniform_real_distribution<double> th(0.05, kPi - 0.05);
    std::uniform_real_distribution<double> len(0.5, 3.0);
    while (true) {
        Frame f{Vec3(coord(rng), coord(rng), coord(rng)), Vec3(coord(rng), coord(rng), coord(rng)),
                Vec3(coord(rng), coord(rng), coord(rng)), ang(rng), th(rng), len(rng)};
        const Vec3 ab = f.b - f.a;
        const Vec3 bc = f.c - f.b;
        if (bc.norm() > 0.5 && ab.norm() > 0.5 && ab.cross(bc).norm() > 0.2 * ab.norm() * bc.norm()) {
            return f;
        }
    }
}

}  // namespace

TEST(place_atom, hand_example) {
    Vec3 d = place_atom(Vec3(0, 1, 0), Vec3(0, 0, 0), Vec3(1, 0, 0), 0.0, kPi / 2, 1.0, 1.0);
    EXPECT_NEAR(d.x(), 1.0, 1e-12);
    EXPECT_NEAR(d.y(), 1.0, 1e-12);
    EXPECT_NEAR(d.z(), 0.0, 1e-12);
}

TEST(place_atom, theta_zero_extends_bond) {
    const Vec3 a(0.3, 1.2, -0.4), b(0.1, 0.2, 0.3), c(1.4, -0.2, 0.9);
    const Vec3 expect = c + 1.7 * (c - b).normalized();
    for (double phi : {0.0, 1.0, 2.5, 5.9}) {
        Vec3 d = place_atom(a, b, c, phi, 0.0, (c - b).norm(), 1.7);
        EXPECT_LT((d - expect).norm(), 1e-12);
    }
}

TEST(place_atom, collinear_frame_throws) {
    try {
        place_atom(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), 0.5, 1.0, 1.0, 1.0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularFrame);
    }
    EXPECT_THROW(place_atom_expanded(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(3, 0, 0), 0.5, 1.0, 2.0, 1.0), Error);
}

TEST(place_atom, bad_lengths_throw) {
    try {
        place_atom(Vec3(0, 1, 0), Vec3(0, 0, 0), Vec3(1, 0, 0), 0.0, 1.0, 1.0, -1.0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidGeometry);
    }
}

TEST(place_atom, matches_rotation_oracle) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 500; ++k) {
        Frame f = random_frame(rng);
        const double r_bc = (f.c - f.b).norm();
        Vec3 d = place_atom(f.a, f.b, f.c, f.phi, f.theta, r_bc, f.r_cd);
        Vec3 o = rotation_oracle(f.a, f.b, f.c, f.phi, f.theta, f.r_cd);
        ASSERT_LT((d - o).norm(), 1e-10) << "frame " << k;
    }
}

TEST(place_atom, postconditions_hold) {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 500; ++k) {
        Frame f = random_frame(rng);
        const double r_bc = (f.c - f.b).norm();
        Vec3 d = place_atom(f.a, f.b, f.c, f.phi, f.theta, r_bc, f.r_cd);
        ASSERT_NEAR((d - f.c).norm(), f.r_cd, 1e-9);
        ASSERT_NEAR(measure_bond_angle(f.b, f.c, d), kPi - f.theta, 1e-9);
        ASSERT_LT(angle_diff(measure_dihedral(f.a, f.b, f.c, d), f.phi), 1e-9);
    }
}

TEST(place_atom_expanded, agrees_with_matrix_form) {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 1000; ++k) {
        Frame f = random_frame(rng);
        const double r_bc = (f.c - f.b).norm();
        Vec3 d1 = place_atom(f.a, f.b, f.c, f.phi, f.theta, r_bc, f.r_cd);
        Vec3 d2 = place_atom_expanded(f.a, f.b, f.c, f.phi, f.theta, r_bc, f.r_cd);
        ASSERT_LT((d1 - d2).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(measure_dihedral, cis_and_trans) {
    const Vec3 a(0, 1, 0), b(0, 0, 0), c(1, 0, 0);
    EXPECT_NEAR(measure_dihedral(a, b, c, Vec3(1, 1, 0)), 0.0, 1e-12);
    EXPECT_NEAR(measure_dihedral(a, b, c, Vec3(1, -1, 0)), kPi, 1e-12);
    EXPECT_NEAR(measure_dihedral(a, b, c, Vec3(1, 0, 1)), kPi / 2, 1e-12);
}

TEST(measure_dihedral, reversal_symmetry) {
    std::mt19937_64 rng(14);
    for (int k = 0; k < 200; ++k) {
        Frame f = random_frame(rng);
        Vec3 d = place_atom(f.a, f.b, f.c, f.phi, f.theta, (f.c - f.b).norm(), f.r_cd);
        ASSERT_LT(angle_diff(measure_dihedral(f.a, f.b, f.c, d), measure_dihedral(d, f.c, f.b, f.a)), 1e-9);
    }
}

TEST(measure_dihedral, collinear_throws) {
    EXPECT_THROW(measure_dihedral(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 1, 0)), Error);
}

TEST(wrap_angle, range) {
    EXPECT_NEAR(wrap_angle(-kPi / 2), 1.5 * kPi, 1e-12);
    EXPECT_NEAR(wrap_angle(5 * kPi), kPi, 1e-12);
    EXPECT_EQ(wrap_angle(0.0), 0.0);
    EXPECT_LT(wrap_angle(kTwoPi - 1e-18), kTwoPi);
}

TEST(dihedral_tables, lengths_must_be_powers_of_two) {
    EXPECT_THROW(DihedralTables({{0, 0}, {1, 1}, {2, 2}}, {0.0}), Error);
    EXPECT_THROW(DihedralTables({{0, 0}}, {0.0, 1.0, 2.0}), Error);
    DihedralTables t({{-1.0, 7.0}, {0.5, 0.5}}, {-0.25});
    EXPECT_EQ(t.b1(), 1u);
    EXPECT_EQ(t.b2(), 0u);
    EXPECT_NEAR(t.backbone()[0].phi, kTwoPi - 1.0, 1e-12);
    EXPECT_NEAR(t.backbone()[0].psi, 7.0 - kTwoPi, 1e-12);
    EXPECT_NEAR(t.chi1_trig(0).sin, std::sin(-0.25), 1e-12);
    EXPECT_NEAR(t.phi_trig(1).cos, std::cos(0.5), 1e-12);
}

TEST(dihedral_tables, synthetic_tables_are_valid) {
    for (unsigned b1 = 0; b1 <= 6; ++b1) {
        DihedralTables t = synthetic_tables(b1, 2);
        ASSERT_EQ(t.backbone().size(), size_t{1} << b1);
        ASSERT_EQ(t.chi1().size(), 4u);
        for (size_t i = 0; i < t.backbone().size(); ++i) {
            ASSERT_GE(t.backbone()[i].phi, 0.0);
            ASSERT_LT(t.backbone()[i].phi, kTwoPi);
            ASSERT_NEAR(t.psi_trig(i).sin, std::sin(t.backbone()[i].psi), 1e-12);
        }
    }
}

TEST(bond_geometry, validate) {
    BondGeometry g;
    EXPECT_NO_THROW(g.validate());
    g.ca_c = 0;
    EXPECT_THROW(g.validate(), Error);
    BondGeometry h;
    h.theta_ext = kPi;
    EXPECT_THROW(h.validate(), Error);
}

TEST(refold, atom_count_and_bond_lengths) {
    const DihedralTables tables = synthetic_tables(3, 2);
    const BondGeometry g;
    for (unsigned sc : {2u, 3u, 4u}) {
        AtomModel model;
        model.side_chain_atoms = sc;
        LoopState s;
        s.residues = {{1, 2}, {5, 0}, {7, 3}};
        Conformation conf = refold(s, tables, g, default_anchor(g), model);
        ASSERT_EQ(conf.size(), model.atom_count(3));
        ASSERT_EQ(conf.size(), 2 + 3 * (3 + sc));
        ASSERT_EQ(conf.bonds.size(), conf.size() - 1);
        for (const auto &[i, j] : conf.bonds) {
            const double r = (conf.atoms[i].position - conf.atoms[j].position).norm();
            ASSERT_GT(r, 1.3);
            ASSERT_LT(r, 1.54);
        }
    }
}

TEST(refold, torsions_round_trip) {
    const DihedralTables tables = synthetic_tables(4, 2);
    const LoopSpace space = tables.space(5);
    std::mt19937_64 rng(15);
    for (int k = 0; k < 50; ++k) {
        const LoopState s = space.decode(std::uniform_int_distribution<uint64_t>(0, space.num_states() - 1)(rng));
        const Conformation conf = refold(s, tables);
        const auto torsions = torsion_atoms(s.size());
        auto measure = [&](const std::array<size_t, 4> &q) {
            return measure_dihedral(conf.atoms[q[0]].position, conf.atoms[q[1]].position, conf.atoms[q[2]].position,
                                    conf.atoms[q[3]].position);
        };
        for (size_t r = 0; r < s.size(); ++r) {
            const auto &bb = tables.backbone()[s.residues[r].i1];
            ASSERT_LT(angle_diff(measure(torsions[r].phi), bb.phi), 1e-9);
            ASSERT_LT(angle_diff(measure(torsions[r].psi), bb.psi), 1e-9);
            ASSERT_LT(angle_diff(measure(torsions[r].chi1), tables.chi1()[s.residues[r].i2]), 1e-9);
            if (torsions[r].has_omega) {
                ASSERT_LT(angle_diff(measure(torsions[r].omega), kPi), 1e-9);
            }
        }
    }
}

TEST(refold, prefix_independent_of_later_residues) {
    const DihedralTables tables = synthetic_tables(3, 1);
    LoopState s1, s2;
    s1.residues = {{2, 1}, {3, 0}, {1, 1}};
    s2.residues = {{2, 1}, {6, 1}, {4, 0}};
    const Conformation c1 = refold(s1, tables);
    const Conformation c2 = refold(s2, tables);
    const auto t = torsion_atoms(3);
    // Atoms before residue 2's C do not depend on residue 2.
    for (size_t i = 0; i < t[1].phi[3]; ++i) {
        ASSERT_LT((c1.atoms[i].position - c2.atoms[i].position).norm(), 1e-12) << i;
    }
}

TEST(refold, index_out_of_range_names_residue) {
    const DihedralTables tables = synthetic_tables(2, 1);
    LoopState s;
    s.residues = {{0, 0}, {4, 0}};
    try {
        refold(s, tables);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
        EXPECT_NE(std::string(e.what()).find("residue 2"), std::string::npos) << e.what();
    }
}

TEST(refold, side_chain_model_needs_two_atoms) {
    AtomModel m;
    m.side_chain_atoms = 1;
    LoopState s;
    s.residues = {{0, 0}};
    EXPECT_THROW(refold(s, synthetic_tables(1, 1), BondGeometry{}, default_anchor(), m), Error);
}

TEST(rmsd, basics) {
    const DihedralTables tables = synthetic_tables(2, 1);
    LoopState s;
    s.residues = {{1, 0}, {2, 1}};
    Conformation p = refold(s, tables);
    EXPECT_NEAR(rmsd(p, p), 0.0, 1e-15);
    Conformation q = p;
    for (auto &a : q.atoms) {
        a.position += Vec3(0.0, 0.0, 2.0);
    }
    EXPECT_NEAR(rmsd(p, q), 2.0, 1e-12);
    q.atoms.pop_back();
    try {
        rmsd(p, q);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
    }
}

TEST(structure_io, tables_round_trip) {
    const DihedralTables t = synthetic_tables(3, 2);
    std::stringstream bb, chi;
    write_backbone_table(bb, t);
    write_chi1_table(chi, t);
    const DihedralTables u = read_tables(bb, chi);
    ASSERT_EQ(u.b1(), 3u);
    ASSERT_EQ(u.b2(), 2u);
    for (size_t i = 0; i < 8; ++i) {
        EXPECT_LT(angle_diff(u.backbone()[i].phi, t.backbone()[i].phi), 1e-7);
        EXPECT_LT(angle_diff(u.backbone()[i].psi, t.backbone()[i].psi), 1e-7);
    }
}

TEST(structure_io, bad_table_header) {
    std::stringstream bb("idx,phi,psi\n0,1,2\n"), chi("index,chi1_deg\n0,60\n");
    EXPECT_THROW(read_tables(bb, chi), Error);
    std::stringstream bb2("index,phi_deg,psi_deg\n1,1,2\n"), chi2("index,chi1_deg\n0,60\n");
    EXPECT_THROW(read_tables(bb2, chi2), Error);
}

TEST(structure_io, xyz_round_trip) {
    LoopState s;
    s.residues = {{1, 1}, {0, 2}};
    const Conformation p = refold(s, synthetic_tables(1, 2));
    std::stringstream ss(to_xyz(p, "test"));
    const Conformation q = read_xyz(ss);
    ASSERT_EQ(q.size(), p.size());
    EXPECT_LT(rmsd(p, q), 1e-6);
    EXPECT_EQ(q.atoms[1].element, "N");
}
