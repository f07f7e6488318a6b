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

#include <algorithm>
#include <cmath>
#include <string>

#include "qloop/error.h"

namespace qloop {

double deg_to_rad(double deg) {
    return deg * (kPi / 180.0);
}

double rad_to_deg(double rad) {
    return rad * (180.0 / kPi);
}

double wrap_angle(double rad) {
    double w = std::fmod(rad, kTwoPi);
    if (w < 0) {
        w += kTwoPi;
    }
    // fmod of a tiny negative value can round up to exactly 2*pi.
    if (w >= kTwoPi) {
        w = 0.0;
    }
    return w;
}

namespace {

void check_lengths(double r_bc, double r_cd) {
    if (!(r_bc > 0) || !(r_cd > 0) || !std::isfinite(r_bc) || !std::isfinite(r_cd)) {
        throw Error(ErrorKind::InvalidGeometry,
                    "bond lengths must be positive (r_bc=" + std::to_string(r_bc) + ", r_cd=" + std::to_string(r_cd) + ")");
    }
}

[[noreturn]] void throw_singular(double area, double r_bc) {
    throw Error(ErrorKind::SingularFrame, "atoms A, B, C are collinear (|ab x bc| = " + std::to_string(area) +
                                              ", limit " + std::to_string(kCollinearTolerance * r_bc) + ")");
}

}  // namespace

Vec3 place_atom(const Vec3 &a, const Vec3 &b, const Vec3 &c, double phi, double theta, double r_bc, double r_cd) {
    check_lengths(r_bc, r_cd);
    const double area = (b - a).cross(c - b).norm();
    if (!(area > kCollinearTolerance * r_bc)) {
        throw_singular(area, r_bc);
    }

    const Vec3 d_local(r_cd * std::cos(theta), r_cd * std::cos(phi) * std::sin(theta),
                       r_cd * std::sin(phi) * std::sin(theta));
    const Vec3 mx = (c - b) / r_bc;
    const Vec3 n_raw = (b - a).cross(mx);
    const Vec3 mz = n_raw / n_raw.norm();
    const Vec3 my = mz.cross(mx);

    Eigen::Matrix3d frame;
    frame.col(0) = mx;
    frame.col(1) = my;
    frame.col(2) = mz;
    return frame * d_local + c;
}

Vec3 place_atom_expanded(const Vec3 &a, const Vec3 &b, const Vec3 &c, double phi, double theta, double r_bc,
                         double r_cd) {
    check_lengths(r_bc, r_cd);
    const Vec3 ab = b - a;
    const Vec3 bc = c - b;
    const Vec3 ab_x_bc = ab.cross(bc);
    const double q = ab_x_bc.norm();
    if (!(q > kCollinearTolerance * r_bc)) {
        throw_singular(q, r_bc);
    }
    const Vec3 triple = ab_x_bc.cross(bc);

    const double d1 = r_cd * std::cos(theta);
    const double d2 = r_cd * std::cos(phi) * std::sin(theta);
    const double d3 = r_cd * std::sin(phi) * std::sin(theta);

    Vec3 d;
    for (int i = 0; i < 3; ++i) {
        d[i] = bc[i] / r_bc * d1 + triple[i] / (r_bc * q) * d2 + ab_x_bc[i] / q * d3 + c[i];
    }
    return d;
}

double measure_dihedral(const Vec3 &a, const Vec3 &b, const Vec3 &c, const Vec3 &d) {
    const Vec3 b1 = b - a;
    const Vec3 b2 = c - b;
    const Vec3 b3 = d - c;
    const Vec3 n1 = b1.cross(b2);
    const Vec3 n2 = b2.cross(b3);
    const double len2 = b2.norm();
    if (!(n1.norm() > kCollinearTolerance * b1.norm() * len2) || !(n2.norm() > kCollinearTolerance * len2 * b3.norm())) {
        throw Error(ErrorKind::SingularFrame, "dihedral undefined for collinear atoms");
    }
    const double y = len2 * b1.dot(n2);
    const double x = n1.dot(n2);
    return wrap_angle(std::atan2(y, x));
}

double measure_bond_angle(const Vec3 &a, const Vec3 &b, const Vec3 &c) {
    const Vec3 u = a - b;
    const Vec3 v = c - b;
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

////////////////////////////////////////////////////////////

namespace {

bool is_power_of_two(size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

unsigned log2_exact(size_t n) {
    unsigned bits = 0;
    while ((size_t{1} << bits) < n) {
        ++bits;
    }
    return bits;
}

DihedralTables::Trig trig(double angle) {
    return {std::sin(angle), std::cos(angle)};
}

}  // namespace

DihedralTables::DihedralTables(std::vector<BackboneEntry> backbone, std::vector<double> chi1)
    : backbone_(std::move(backbone)), chi1_(std::move(chi1)) {
    if (!is_power_of_two(backbone_.size())) {
        throw Error(ErrorKind::Validation,
                    "backbone table length " + std::to_string(backbone_.size()) + " is not a power of two");
    }
    if (!is_power_of_two(chi1_.size())) {
        throw Error(ErrorKind::Validation, "chi1 table length " + std::to_string(chi1_.size()) + " is not a power of two");
    }
    b1_ = log2_exact(backbone_.size());
    b2_ = log2_exact(chi1_.size());
    for (auto &e : backbone_) {
        if (!std::isfinite(e.phi) || !std::isfinite(e.psi)) {
            throw Error(ErrorKind::Validation, "non-finite backbone angle");
        }
        e.phi = wrap_angle(e.phi);
        e.psi = wrap_angle(e.psi);
        phi_trig_.push_back(trig(e.phi));
        psi_trig_.push_back(trig(e.psi));
    }
    for (auto &x : chi1_) {
        if (!std::isfinite(x)) {
            throw Error(ErrorKind::Validation, "non-finite chi1 angle");
        }
        x = wrap_angle(x);
        chi1_trig_.push_back(trig(x));
    }
}

DihedralTables synthetic_tables(unsigned b1, unsigned b2) {
    if (b1 > 20 || b2 > 20) {
        throw Error(ErrorKind::Validation, "synthetic tables limited to 20 index bits");
    }
    static constexpr double basins[4][2] = {{-63.0, -43.0}, {-120.0, 130.0}, {-75.0, 145.0}, {57.0, 47.0}};
    static constexpr double rotamers[3] = {60.0, 180.0, 300.0};

    std::vector<DihedralTables::BackboneEntry> t1(size_t{1} << b1);
    for (size_t i = 0; i < t1.size(); ++i) {
        const size_t basin = i % 4;
        const size_t spread = i / 4;
        const double dphi = 6.0 * (static_cast<double>(spread % 5) - 2.0);
        const double dpsi = 6.0 * (static_cast<double>((spread / 5) % 5) - 2.0);
        t1[i] = {deg_to_rad(basins[basin][0] + dphi), deg_to_rad(basins[basin][1] + dpsi)};
    }
    std::vector<double> t2(size_t{1} << b2);
    for (size_t i = 0; i < t2.size(); ++i) {
        const double offset = 4.0 * (static_cast<double>((i / 3) % 7) - 3.0);
        t2[i] = deg_to_rad(rotamers[i % 3] + offset);
    }
    return DihedralTables(std::move(t1), std::move(t2));
}

////////////////////////////////////////////////////////////

void BondGeometry::validate() const {
    for (double len : {n_ca, ca_c, c_n, ca_cb, cb_sc, sc_ext}) {
        if (!(len > 0) || !std::isfinite(len)) {
            throw Error(ErrorKind::InvalidGeometry, "bond lengths must be positive");
        }
    }
    for (double th : {theta_n_ca_c, theta_ca_c_n, theta_c_n_ca, theta_n_ca_cb, theta_ca_cb_sc, theta_ext}) {
        if (!(th > 0 && th < kPi)) {
            throw Error(ErrorKind::InvalidGeometry, "theta must lie in (0, pi)");
        }
    }
}

void AtomModel::validate() const {
    if (side_chain_atoms < 2) {
        throw Error(ErrorKind::Validation, "side chain needs at least CB and the chi1 atom (side_chain_atoms >= 2)");
    }
    if (side_chain_atoms > 64) {
        throw Error(ErrorKind::Validation, "side_chain_atoms above 64 is not supported");
    }
}

Anchor default_anchor(const BondGeometry &geom) {
    // N1 at the origin, C0 on the -x axis, CA1 in the xy plane at the
    // C-N-CA bond angle.
    const double bond_angle = kPi - geom.theta_c_n_ca;
    const Vec3 c0(-geom.c_n, 0.0, 0.0);
    const Vec3 n1(0.0, 0.0, 0.0);
    const double out = kPi - bond_angle;
    const Vec3 ca1(geom.n_ca * std::cos(out), geom.n_ca * std::sin(out), 0.0);
    return {c0, n1, ca1};
}

std::vector<TorsionAtoms> torsion_atoms(size_t residues, const AtomModel &model) {
    std::vector<TorsionAtoms> out(residues);
    const size_t sc = model.side_chain_atoms;
    // Residue r (0-based): N at n_idx, CA at n_idx + 1, C at c_idx, CB at c_idx + 1,
    // SC at c_idx + 2, next N at c_idx + 1 + sc.
    size_t prev_c = 0;
    size_t n_idx = 1;
    for (size_t r = 0; r < residues; ++r) {
        const size_t ca_idx = n_idx + 1;
        const size_t c_idx = ca_idx + 1;
        const size_t next_n = c_idx + 1 + sc;
        auto &t = out[r];
        t.phi = {prev_c, n_idx, ca_idx, c_idx};
        t.psi = {n_idx, ca_idx, c_idx, next_n};
        t.chi1 = {n_idx, ca_idx, c_idx + 1, c_idx + 2};
        if (r + 1 < residues) {
            t.omega = {ca_idx, c_idx, next_n, next_n + 1};
            t.has_omega = true;
        }
        prev_c = c_idx;
        n_idx = next_n;
    }
    return out;
}

Conformation refold(const LoopState &state, const DihedralTables &tables, const BondGeometry &geom,
                    const Anchor &anchor, const AtomModel &model) {
    const LoopSpace space = tables.space(state.size());
    if (state.size() == 0) {
        throw Error(ErrorKind::Validation, "a loop needs at least one residue");
    }
    space.validate(state);
    geom.validate();
    model.validate();

    const size_t residues = state.size();
    Conformation conf;
    conf.atoms.reserve(model.atom_count(residues));

    auto add = [&](const Vec3 &pos, size_t residue, AtomRole role, const char *element, std::string name) {
        conf.atoms.push_back(Atom{pos, residue, role, element, std::move(name)});
        return conf.atoms.size() - 1;
    };
    auto place = [&](size_t ia, size_t ib, size_t ic, double phi, double theta, double r_cd) {
        const Vec3 &a = conf.atoms[ia].position;
        const Vec3 &b = conf.atoms[ib].position;
        const Vec3 &c = conf.atoms[ic].position;
        try {
            return place_atom(a, b, c, phi, theta, (c - b).norm(), r_cd);
        } catch (const Error &e) {
            throw Error(e.kind(), "placing atom " + std::to_string(conf.atoms.size()) + ": " + e.detail());
        }
    };
    auto bond = [&](size_t i, size_t j) { conf.bonds.emplace_back(i, j); };

    size_t prev_c = add(anchor[0], 0, AtomRole::Backbone, "C", "C");
    size_t n = add(anchor[1], 1, AtomRole::Backbone, "N", "N");
    size_t ca = add(anchor[2], 1, AtomRole::Backbone, "C", "CA");
    bond(prev_c, n);
    bond(n, ca);

    for (size_t r = 0; r < residues; ++r) {
        const size_t res = r + 1;
        const auto &bb = tables.backbone()[state.residues[r].i1];
        const double chi1 = tables.chi1()[state.residues[r].i2];

        const size_t c = add(place(prev_c, n, ca, bb.phi, geom.theta_n_ca_c, geom.ca_c), res, AtomRole::Backbone,
                             "C", "C");
        bond(ca, c);

        const size_t cb = add(place(c, n, ca, geom.cb_dihedral, geom.theta_n_ca_cb, geom.ca_cb), res,
                              AtomRole::SideChain, "C", "CB");
        bond(ca, cb);
        size_t tail2 = ca;
        size_t tail1 = cb;
        size_t tail0 = add(place(n, ca, cb, chi1, geom.theta_ca_cb_sc, geom.cb_sc), res, AtomRole::SideChain, "C", "SC");
        bond(cb, tail0);
        for (unsigned k = 2; k < model.side_chain_atoms; ++k) {
            const size_t next = add(place(tail2, tail1, tail0, geom.ext_dihedral, geom.theta_ext, geom.sc_ext), res,
                                    AtomRole::SideChain, "C", "SC" + std::to_string(k));
            bond(tail0, next);
            tail2 = tail1;
            tail1 = tail0;
            tail0 = next;
        }

        const size_t next_n =
            add(place(n, ca, c, bb.psi, geom.theta_ca_c_n, geom.c_n), res + 1, AtomRole::Backbone, "N", "N");
        bond(c, next_n);
        if (r + 1 < residues) {
            const size_t next_ca = add(place(ca, c, next_n, BondGeometry::omega, geom.theta_c_n_ca, geom.n_ca), res + 1,
                                       AtomRole::Backbone, "C", "CA");
            bond(next_n, next_ca);
            prev_c = c;
            n = next_n;
            ca = next_ca;
        }
    }
    return conf;
}

double rmsd(const Conformation &p, const Conformation &q) {
    if (p.size() != q.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "conformations have " + std::to_string(p.size()) + " and " + std::to_string(q.size()) + " atoms");
    }
    if (p.size() == 0) {
        throw Error(ErrorKind::LengthMismatch, "rmsd of empty conformations is undefined");
    }
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        sum += (p.atoms[i].position - q.atoms[i].position).squaredNorm();
    }
    return std::sqrt(sum / static_cast<double>(p.size()));
}

}  // namespace qloop
