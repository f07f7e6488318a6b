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

#ifndef QLOOP_FORCEFIELD_H
#define QLOOP_FORCEFIELD_H

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qloop/geometry.h"

namespace qloop {

// CHARMM-form potential in reduced units (k_B = 1). Angles are radians in
// memory and degrees in parameter files.

struct BondTerm {
    size_t i = 0, j = 0;
    double kb = 0, b0 = 0;
};
struct AngleTerm {
    size_t i = 0, j = 0, k = 0;
    double ktheta = 0, theta0 = 0;
};
struct DihedralTerm {
    size_t i = 0, j = 0, k = 0, l = 0;
    double kphi = 0;
    int n = 1;
    double delta = 0;
};
struct ImproperTerm {
    size_t i = 0, j = 0, k = 0, l = 0;
    double komega = 0, omega0 = 0;
};
struct UreyBradleyTerm {
    size_t i = 0, k = 0;
    double ku = 0, u0 = 0;
};
/// Per-atom Lennard-Jones well depth, R_min and partial charge.
struct NonbondedAtom {
    double epsilon = 0, rmin = 0, q = 0;
};
/// Replaces the combination rule for one pair.
struct PairOverride {
    size_t i = 0, j = 0;
    double epsilon = 0, rmin = 0;
};

struct ForceFieldParams {
    std::vector<BondTerm> bonds;
    std::vector<AngleTerm> angles;
    std::vector<DihedralTerm> dihedrals;
    std::vector<ImproperTerm> impropers;
    std::vector<UreyBradleyTerm> urey_bradley;
    std::vector<NonbondedAtom> atoms;
    /// Dielectric constant of the Coulomb term; distinct from the LJ epsilons.
    double dielectric = 1.0;
    std::vector<PairOverride> pair_overrides;
    /// Non-bonded cutoff radius; unset means every listed pair is evaluated.
    std::optional<double> cutoff;
    /// Separations below this raise DivergentTerm.
    double hard_floor = 1e-6;

    /// Checks force constants, multiplicities, the dielectric, and that every
    /// index is below `atom_count` (IndexOutOfRange).
    void validate(size_t atom_count) const;

    /// Pairwise (epsilon, R_min): geometric mean of epsilons, arithmetic mean
    /// of R_min, unless an override exists.
    std::pair<double, double> pair_parameters(size_t i, size_t j) const;
};

/// Unordered atom pairs (i < j) that receive non-bonded terms.
using PairList = std::vector<std::pair<size_t, size_t>>;

struct EnergyBreakdown {
    double bond = 0;
    double angle = 0;
    double dihedral = 0;
    double improper = 0;
    double urey_bradley = 0;
    double lennard_jones = 0;
    double electrostatic = 0;

    double bonded() const;
    double nonbonded() const;
    double total() const;
};

/// epsilon [(R_min/r)^12 - (R_min/r)^6] + q_i q_j / (eps_d r).
double lennard_jones(double r, double epsilon, double rmin);
double coulomb(double r, double q_i, double q_j, double dielectric);
double energy_nonbonded_pair(double r, double epsilon, double rmin, double q_i, double q_j, double dielectric,
                             double hard_floor = 1e-6);

/// Bond, angle, dihedral, improper and Urey-Bradley groups; the non-bonded
/// fields of the result are zero.
EnergyBreakdown energy_bonded(const Conformation &conf, const ForceFieldParams &params);

/// All groups. Each group is accumulated with compensated summation.
EnergyBreakdown energy_terms(const Conformation &conf, const ForceFieldParams &params, const PairList &pairs);

double energy_total(const Conformation &conf, const ForceFieldParams &params, const PairList &pairs);

/// All i < j pairs minus 1-2 and 1-3 neighbours of the bond graph in
/// `params.bonds`, in lexicographic order.
PairList build_pairlist(const Conformation &conf, const ForceFieldParams &params);

/// Illustrative parameters for a refolded loop: harmonic bonds and angles at
/// the reference geometry, threefold torsions on every proper dihedral, a
/// Urey-Bradley term across each N-CA-C, and element-based non-bonded values.
ForceFieldParams default_params(const Conformation &reference);

}  // namespace qloop

#endif  // QLOOP_FORCEFIELD_H
