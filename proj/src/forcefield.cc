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

#include "qloop/forcefield.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "qloop/error.h"

namespace qloop {

namespace {

/// Neumaier summation; makes the group totals insensitive to term order.
class CompensatedSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const {
        return sum_ + comp_;
    }

  private:
    double sum_ = 0;
    double comp_ = 0;
};

void check_index(size_t idx, size_t atom_count, const char *group, size_t term) {
    if (idx >= atom_count) {
        throw Error(ErrorKind::IndexOutOfRange, std::string(group) + " term " + std::to_string(term) +
                                                    " references atom " + std::to_string(idx) + " but only " +
                                                    std::to_string(atom_count) + " atoms exist");
    }
}

void check_constant(double k, const char *group, size_t term) {
    if (!(k >= 0) || !std::isfinite(k)) {
        throw Error(ErrorKind::Validation,
                    std::string(group) + " term " + std::to_string(term) + " has a negative or non-finite force constant");
    }
}

/// Difference of two angles mapped into (-pi, pi].
double angle_difference(double a, double b) {
    double d = wrap_angle(a - b);
    if (d > kPi) {
        d -= kTwoPi;
    }
    return d;
}

const Vec3 &pos(const Conformation &conf, size_t i) {
    return conf.atoms[i].position;
}

}  // namespace

void ForceFieldParams::validate(size_t atom_count) const {
    for (size_t t = 0; t < bonds.size(); ++t) {
        check_index(bonds[t].i, atom_count, "bond", t);
        check_index(bonds[t].j, atom_count, "bond", t);
        check_constant(bonds[t].kb, "bond", t);
    }
    for (size_t t = 0; t < angles.size(); ++t) {
        for (size_t idx : {angles[t].i, angles[t].j, angles[t].k}) {
            check_index(idx, atom_count, "angle", t);
        }
        check_constant(angles[t].ktheta, "angle", t);
    }
    for (size_t t = 0; t < dihedrals.size(); ++t) {
        const auto &d = dihedrals[t];
        for (size_t idx : {d.i, d.j, d.k, d.l}) {
            check_index(idx, atom_count, "dihedral", t);
        }
        check_constant(d.kphi, "dihedral", t);
        if (d.n < 1) {
            throw Error(ErrorKind::Validation, "dihedral term " + std::to_string(t) + " needs multiplicity n >= 1");
        }
    }
    for (size_t t = 0; t < impropers.size(); ++t) {
        const auto &d = impropers[t];
        for (size_t idx : {d.i, d.j, d.k, d.l}) {
            check_index(idx, atom_count, "improper", t);
        }
        check_constant(d.komega, "improper", t);
    }
    for (size_t t = 0; t < urey_bradley.size(); ++t) {
        check_index(urey_bradley[t].i, atom_count, "urey_bradley", t);
        check_index(urey_bradley[t].k, atom_count, "urey_bradley", t);
        check_constant(urey_bradley[t].ku, "urey_bradley", t);
    }
    if (atoms.size() != atom_count) {
        throw Error(ErrorKind::IndexOutOfRange, "non-bonded parameters given for " + std::to_string(atoms.size()) +
                                                    " atoms, conformation has " + std::to_string(atom_count));
    }
    for (size_t t = 0; t < atoms.size(); ++t) {
        check_constant(atoms[t].epsilon, "atom", t);
        if (!(atoms[t].rmin >= 0) || !std::isfinite(atoms[t].q)) {
            throw Error(ErrorKind::Validation, "atom " + std::to_string(t) + " has invalid rmin or charge");
        }
    }
    for (size_t t = 0; t < pair_overrides.size(); ++t) {
        check_index(pair_overrides[t].i, atom_count, "pair_override", t);
        check_index(pair_overrides[t].j, atom_count, "pair_override", t);
        check_constant(pair_overrides[t].epsilon, "pair_override", t);
    }
    if (!(dielectric > 0) || !std::isfinite(dielectric)) {
        throw Error(ErrorKind::Validation, "dielectric must be positive");
    }
    if (cutoff && !(*cutoff > 0)) {
        throw Error(ErrorKind::Validation, "cutoff must be positive when set");
    }
    if (!(hard_floor > 0)) {
        throw Error(ErrorKind::Validation, "hard_floor must be positive");
    }
}

std::pair<double, double> ForceFieldParams::pair_parameters(size_t i, size_t j) const {
    for (const auto &o : pair_overrides) {
        if ((o.i == i && o.j == j) || (o.i == j && o.j == i)) {
            return {o.epsilon, o.rmin};
        }
    }
    const auto &a = atoms.at(i);
    const auto &b = atoms.at(j);
    return {std::sqrt(a.epsilon * b.epsilon), 0.5 * (a.rmin + b.rmin)};
}

double EnergyBreakdown::bonded() const {
    return bond + angle + dihedral + improper + urey_bradley;
}

double EnergyBreakdown::nonbonded() const {
    return lennard_jones + electrostatic;
}

double EnergyBreakdown::total() const {
    return bonded() + nonbonded();
}

double lennard_jones(double r, double epsilon, double rmin) {
    const double s = rmin / r;
    const double s6 = s * s * s * s * s * s;
    return epsilon * (s6 * s6 - s6);
}

double coulomb(double r, double q_i, double q_j, double dielectric) {
    return q_i * q_j / (dielectric * r);
}

double energy_nonbonded_pair(double r, double epsilon, double rmin, double q_i, double q_j, double dielectric,
                             double hard_floor) {
    if (!(r >= hard_floor)) {
        throw Error(ErrorKind::DivergentTerm,
                    "pair separation " + std::to_string(r) + " below hard floor " + std::to_string(hard_floor));
    }
    return lennard_jones(r, epsilon, rmin) + coulomb(r, q_i, q_j, dielectric);
}

EnergyBreakdown energy_bonded(const Conformation &conf, const ForceFieldParams &params) {
    const size_t n = conf.size();
    CompensatedSum bond, angle, dihedral, improper, ub;
    for (size_t t = 0; t < params.bonds.size(); ++t) {
        const auto &b = params.bonds[t];
        check_index(b.i, n, "bond", t);
        check_index(b.j, n, "bond", t);
        const double len = (pos(conf, b.i) - pos(conf, b.j)).norm();
        bond.add(b.kb * (len - b.b0) * (len - b.b0));
    }
    for (size_t t = 0; t < params.angles.size(); ++t) {
        const auto &a = params.angles[t];
        for (size_t idx : {a.i, a.j, a.k}) {
            check_index(idx, n, "angle", t);
        }
        const double theta = measure_bond_angle(pos(conf, a.i), pos(conf, a.j), pos(conf, a.k));
        angle.add(a.ktheta * (theta - a.theta0) * (theta - a.theta0));
    }
    for (size_t t = 0; t < params.dihedrals.size(); ++t) {
        const auto &d = params.dihedrals[t];
        for (size_t idx : {d.i, d.j, d.k, d.l}) {
            check_index(idx, n, "dihedral", t);
        }
        const double phi = measure_dihedral(pos(conf, d.i), pos(conf, d.j), pos(conf, d.k), pos(conf, d.l));
        dihedral.add(d.kphi * (1.0 + std::cos(d.n * phi - d.delta)));
    }
    for (size_t t = 0; t < params.impropers.size(); ++t) {
        const auto &d = params.impropers[t];
        for (size_t idx : {d.i, d.j, d.k, d.l}) {
            check_index(idx, n, "improper", t);
        }
        const double omega = measure_dihedral(pos(conf, d.i), pos(conf, d.j), pos(conf, d.k), pos(conf, d.l));
        const double diff = angle_difference(omega, d.omega0);
        improper.add(d.komega * diff * diff);
    }
    for (size_t t = 0; t < params.urey_bradley.size(); ++t) {
        const auto &u = params.urey_bradley[t];
        check_index(u.i, n, "urey_bradley", t);
        check_index(u.k, n, "urey_bradley", t);
        const double dist = (pos(conf, u.i) - pos(conf, u.k)).norm();
        ub.add(u.ku * (dist - u.u0) * (dist - u.u0));
    }
    EnergyBreakdown e;
    e.bond = bond.value();
    e.angle = angle.value();
    e.dihedral = dihedral.value();
    e.improper = improper.value();
    e.urey_bradley = ub.value();
    return e;
}

EnergyBreakdown energy_terms(const Conformation &conf, const ForceFieldParams &params, const PairList &pairs) {
    EnergyBreakdown e = energy_bonded(conf, params);
    const size_t n = conf.size();
    if (params.atoms.size() != n && !pairs.empty()) {
        throw Error(ErrorKind::IndexOutOfRange, "non-bonded parameters cover " + std::to_string(params.atoms.size()) +
                                                    " atoms, conformation has " + std::to_string(n));
    }
    CompensatedSum lj, elec;
    for (size_t t = 0; t < pairs.size(); ++t) {
        const auto [i, j] = pairs[t];
        check_index(i, n, "pair", t);
        check_index(j, n, "pair", t);
        const double r = (pos(conf, i) - pos(conf, j)).norm();
        if (params.cutoff && r > *params.cutoff) {
            continue;
        }
        if (!(r >= params.hard_floor)) {
            throw Error(ErrorKind::DivergentTerm, "atoms " + std::to_string(i) + " and " + std::to_string(j) +
                                                      " are " + std::to_string(r) + " A apart");
        }
        const auto [eps, rmin] = params.pair_parameters(i, j);
        lj.add(lennard_jones(r, eps, rmin));
        elec.add(coulomb(r, params.atoms[i].q, params.atoms[j].q, params.dielectric));
    }
    e.lennard_jones = lj.value();
    e.electrostatic = elec.value();
    return e;
}

double energy_total(const Conformation &conf, const ForceFieldParams &params, const PairList &pairs) {
    return energy_terms(conf, params, pairs).total();
}

PairList build_pairlist(const Conformation &conf, const ForceFieldParams &params) {
    const size_t n = conf.size();
    std::vector<std::set<size_t>> neighbours(n);
    for (const auto &b : params.bonds) {
        if (b.i < n && b.j < n && b.i != b.j) {
            neighbours[b.i].insert(b.j);
            neighbours[b.j].insert(b.i);
        }
    }
    std::vector<std::set<size_t>> excluded(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j : neighbours[i]) {
            excluded[i].insert(j);
            for (size_t k : neighbours[j]) {
                if (k != i) {
                    excluded[i].insert(k);
                }
            }
        }
    }
    PairList pairs;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (!excluded[i].count(j)) {
                pairs.emplace_back(i, j);
            }
        }
    }
    return pairs;
}

ForceFieldParams default_params(const Conformation &reference) {
    const size_t n = reference.size();
    ForceFieldParams p;
    std::vector<std::vector<size_t>> adj(n);
    for (const auto &[i, j] : reference.bonds) {
        p.bonds.push_back({i, j, 300.0, (pos(reference, i) - pos(reference, j)).norm()});
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    for (auto &list : adj) {
        std::sort(list.begin(), list.end());
    }
    for (size_t j = 0; j < n; ++j) {
        for (size_t x = 0; x < adj[j].size(); ++x) {
            for (size_t y = x + 1; y < adj[j].size(); ++y) {
                const size_t i = adj[j][x], k = adj[j][y];
                p.angles.push_back({i, j, k, 50.0, measure_bond_angle(pos(reference, i), pos(reference, j), pos(reference, k))});
                if (reference.atoms[j].name == "CA" &&
                    ((reference.atoms[i].name == "N" && reference.atoms[k].name == "C") ||
                     (reference.atoms[i].name == "C" && reference.atoms[k].name == "N"))) {
                    p.urey_bradley.push_back({i, k, 10.0, (pos(reference, i) - pos(reference, k)).norm()});
                }
            }
        }
    }
    // Proper dihedrals i-j-k-l over each bond j-k, counted once.
    for (const auto &[j0, k0] : reference.bonds) {
        const size_t j = std::min(j0, k0), k = std::max(j0, k0);
        for (size_t i : adj[j]) {
            if (i == k) {
                continue;
            }
            for (size_t l : adj[k]) {
                if (l == j || l == i) {
                    continue;
                }
                p.dihedrals.push_back({i, j, k, l, 0.2, 3, 0.0});
            }
        }
    }
    for (const auto &atom : reference.atoms) {
        NonbondedAtom nb;
        if (atom.name == "N") {
            nb = {0.20, 3.70, -0.47};
        } else if (atom.name == "CA") {
            nb = {0.07, 4.00, 0.07};
        } else if (atom.name == "C") {
            nb = {0.11, 4.00, 0.51};
        } else if (atom.name == "CB") {
            nb = {0.08, 4.10, -0.18};
        } else {
            nb = {0.08, 4.10, 0.0};
        }
        p.atoms.push_back(nb);
    }
    p.dielectric = 1.0;
    return p;
}

}  // namespace qloop
