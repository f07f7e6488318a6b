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

#ifndef QLOOP_GEOMETRY_H
#define QLOOP_GEOMETRY_H

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "qloop/state.h"

namespace qloop {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Relative collinearity guard: a frame (a, b, c) is singular when
/// |(b - a) x (c - b)| <= kCollinearTolerance * r_bc.
inline constexpr double kCollinearTolerance = 1e-9;

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// Maps any finite angle into [0, 2*pi).
double wrap_angle(double rad);

/// Places atom D from the three preceding atoms A, B, C using the
/// self-normalizing natural-extension reference frame.
///
/// The local displacement is d' = r_cd * (cos(theta), cos(phi) sin(theta),
/// sin(phi) sin(theta)) in the frame (bc, n x bc, n) with n normal to the
/// plane ABC. Note the sign of the first component: theta is measured from
/// the continuation of the B->C bond, so the chemical bond angle B-C-D equals
/// pi - theta. theta = 0 continues the B->C direction.
///
/// r_bc is used verbatim to normalise C - B; it is expected to equal |C - B|.
Vec3 place_atom(const Vec3 &a, const Vec3 &b, const Vec3 &c, double phi, double theta, double r_bc, double r_cd);

/// Same placement, written out component-wise with Q = |ab x bc| and no
/// intermediate unit vectors. Kept as an independent route for cross-checks.
Vec3 place_atom_expanded(const Vec3 &a, const Vec3 &b, const Vec3 &c, double phi, double theta, double r_bc,
                         double r_cd);

/// Dihedral A-B-C-D in [0, 2*pi). Zero when the four atoms are coplanar with
/// A and D on the same side (cis); positive sense follows the IUPAC
/// convention, which is the one place_atom produces.
double measure_dihedral(const Vec3 &a, const Vec3 &b, const Vec3 &c, const Vec3 &d);

/// Bond angle A-B-C in [0, pi].
double measure_bond_angle(const Vec3 &a, const Vec3 &b, const Vec3 &c);

/// Converts a chemical bond angle to the theta used by place_atom.
inline double theta_from_bond_angle(double bond_angle_rad) {
    return kPi - bond_angle_rad;
}

/// Backbone (phi, psi) pairs and side-chain chi1 angles, addressed by the
/// indices of a LoopState. Angles are stored in radians in [0, 2*pi) together
/// with their sines and cosines.
class DihedralTables {
  public:
    struct BackboneEntry {
        double phi = 0;
        double psi = 0;
    };
    struct Trig {
        double sin = 0;
        double cos = 1;
    };

    DihedralTables() = default;

    /// Wraps all angles into [0, 2*pi); throws Validation unless both table
    /// lengths are powers of two.
    DihedralTables(std::vector<BackboneEntry> backbone, std::vector<double> chi1);

    unsigned b1() const {
        return b1_;
    }
    unsigned b2() const {
        return b2_;
    }
    const std::vector<BackboneEntry> &backbone() const {
        return backbone_;
    }
    const std::vector<double> &chi1() const {
        return chi1_;
    }
    const Trig &phi_trig(size_t i) const {
        return phi_trig_.at(i);
    }
    const Trig &psi_trig(size_t i) const {
        return psi_trig_.at(i);
    }
    const Trig &chi1_trig(size_t i) const {
        return chi1_trig_.at(i);
    }

    LoopSpace space(size_t residues) const {
        return LoopSpace{residues, b1_, b2_};
    }

  private:
    std::vector<BackboneEntry> backbone_;
    std::vector<double> chi1_;
    std::vector<Trig> phi_trig_, psi_trig_, chi1_trig_;
    unsigned b1_ = 0;
    unsigned b2_ = 0;
};

/// Deterministic tables spread over the populated Ramachandran basins
/// (alpha_R, beta, PPII, alpha_L) and the three chi1 rotamer wells.
DihedralTables synthetic_tables(unsigned b1, unsigned b2);

/// Fixed bond lengths (Angstrom) and place_atom thetas (radians, already
/// converted with theta_from_bond_angle). Omega is always pi.
struct BondGeometry {
    double n_ca = 1.458;
    double ca_c = 1.525;
    double c_n = 1.329;
    double ca_cb = 1.530;
    double cb_sc = 1.520;
    double sc_ext = 1.520;

    double theta_n_ca_c = theta_from_bond_angle(deg_to_rad(111.2));
    double theta_ca_c_n = theta_from_bond_angle(deg_to_rad(116.2));
    double theta_c_n_ca = theta_from_bond_angle(deg_to_rad(121.7));
    double theta_n_ca_cb = theta_from_bond_angle(deg_to_rad(110.5));
    double theta_ca_cb_sc = theta_from_bond_angle(deg_to_rad(114.0));
    double theta_ext = theta_from_bond_angle(deg_to_rad(111.0));

    /// Dihedral C-N-CA-CB fixing the CB position (L-amino-acid chirality).
    double cb_dihedral = deg_to_rad(237.5);
    /// Dihedral used for side-chain atoms beyond the chi1 atom.
    double ext_dihedral = kPi;

    static constexpr double omega = kPi;

    /// Throws InvalidGeometry for non-positive lengths or theta outside (0, pi).
    void validate() const;
};

/// Per-residue atom model: backbone N, CA, C, then `side_chain_atoms`
/// side-chain atoms (CB, the chi1-placed SC atom, then extension atoms).
struct AtomModel {
    unsigned side_chain_atoms = 2;

    unsigned atoms_per_residue() const {
        return 3 + side_chain_atoms;
    }
    /// Total atoms in a conformation of `residues` residues, including the
    /// anchor C and the terminal N.
    size_t atom_count(size_t residues) const {
        return 2 + residues * atoms_per_residue();
    }
    void validate() const;
};

enum class AtomRole { Backbone, SideChain };

struct Atom {
    Vec3 position = Vec3::Zero();
    /// 0 for the anchor C, 1..L for loop residues, L + 1 for the terminal N.
    size_t residue = 0;
    AtomRole role = AtomRole::Backbone;
    std::string element;
    std::string name;
};

/// Cartesian structure of a loop together with its covalent topology.
struct Conformation {
    std::vector<Atom> atoms;
    std::vector<std::pair<size_t, size_t>> bonds;

    size_t size() const {
        return atoms.size();
    }
};

/// The three seed atoms that precede the loop: C of the anchor residue, then
/// N and CA of residue 1.
using Anchor = std::array<Vec3, 3>;

Anchor default_anchor(const BondGeometry &geom = {});

/// Indices of the atoms that carry each torsion, for re-measurement.
struct TorsionAtoms {
    std::array<size_t, 4> phi{}, psi{}, omega{}, chi1{};
    bool has_omega = false;
};

/// Atom indices of each residue's torsions inside a refolded conformation.
std::vector<TorsionAtoms> torsion_atoms(size_t residues, const AtomModel &model = {});

/// Converts a dihedral-index state to Cartesian coordinates by iterated
/// place_atom calls.
///
/// Atom order: C0 (anchor), N1, CA1, then for every residue r:
/// C_r, CB_r, SC_r, [extension atoms], N_{r+1}, CA_{r+1} (the last residue
/// ends with the terminal N_{L+1} only). Atoms of residues before r never
/// depend on residue r's indices. Each r_bc is the measured |C - B|.
///
/// SingularFrame messages carry the offending atom index.
Conformation refold(const LoopState &state, const DihedralTables &tables, const BondGeometry &geom = {},
                    const Anchor &anchor = default_anchor(), const AtomModel &model = {});

/// Root-mean-square distance between corresponding atoms.
double rmsd(const Conformation &p, const Conformation &q);

}  // namespace qloop

#endif  // QLOOP_GEOMETRY_H
