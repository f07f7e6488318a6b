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

#include "qloop/forcefield_io.h"

#include <fstream>
#include <initializer_list>
#include <set>

#include "qloop/error.h"

namespace qloop {

using nlohmann::json;

namespace {

void require_keys(const json &obj, std::initializer_list<const char *> required,
                  std::initializer_list<const char *> optional, const std::string &where) {
    if (!obj.is_object()) {
        throw Error(ErrorKind::Validation, where + ": expected an object");
    }
    std::set<std::string> known;
    for (const char *k : required) {
        known.insert(k);
        if (!obj.contains(k)) {
            throw Error(ErrorKind::Validation, where + ": missing key '" + k + "'");
        }
    }
    for (const char *k : optional) {
        known.insert(k);
    }
    for (const auto &item : obj.items()) {
        if (!known.count(item.key())) {
            throw Error(ErrorKind::Validation, where + ": unknown key '" + item.key() + "'");
        }
    }
}

double num(const json &obj, const char *key, const std::string &where) {
    const auto &v = obj.at(key);
    if (!v.is_number()) {
        throw Error(ErrorKind::Validation, where + ": '" + key + "' must be a number");
    }
    return v.get<double>();
}

size_t index(const json &obj, const char *key, const std::string &where) {
    const auto &v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw Error(ErrorKind::Validation, where + ": '" + key + "' must be a non-negative integer");
    }
    return v.get<size_t>();
}

const json &array_at(const json &doc, const char *key) {
    const auto &v = doc.at(key);
    if (!v.is_array()) {
        throw Error(ErrorKind::Validation, std::string("'") + key + "' must be an array");
    }
    return v;
}

}  // namespace

ForceFieldParams params_from_json(const json &doc) {
    require_keys(doc, {"bonds", "angles", "dihedrals", "impropers", "urey_bradley", "atoms", "dielectric"},
                 {"pair_overrides", "cutoff", "hard_floor"}, "force field");
    ForceFieldParams p;
    size_t t = 0;
    for (const auto &e : array_at(doc, "bonds")) {
        const std::string w = "bonds[" + std::to_string(t++) + "]";
        require_keys(e, {"i", "j", "kb", "b0"}, {}, w);
        p.bonds.push_back({index(e, "i", w), index(e, "j", w), num(e, "kb", w), num(e, "b0", w)});
    }
    t = 0;
    for (const auto &e : array_at(doc, "angles")) {
        const std::string w = "angles[" + std::to_string(t++) + "]";
        require_keys(e, {"i", "j", "k", "ktheta", "theta0"}, {}, w);
        p.angles.push_back({index(e, "i", w), index(e, "j", w), index(e, "k", w), num(e, "ktheta", w),
                            deg_to_rad(num(e, "theta0", w))});
    }
    t = 0;
    for (const auto &e : array_at(doc, "dihedrals")) {
        const std::string w = "dihedrals[" + std::to_string(t++) + "]";
        require_keys(e, {"i", "j", "k", "l", "kphi", "n", "delta"}, {}, w);
        if (!e.at("n").is_number_integer()) {
            throw Error(ErrorKind::Validation, w + ": 'n' must be an integer");
        }
        p.dihedrals.push_back({index(e, "i", w), index(e, "j", w), index(e, "k", w), index(e, "l", w),
                               num(e, "kphi", w), e.at("n").get<int>(), deg_to_rad(num(e, "delta", w))});
    }
    t = 0;
    for (const auto &e : array_at(doc, "impropers")) {
        const std::string w = "impropers[" + std::to_string(t++) + "]";
        require_keys(e, {"i", "j", "k", "l", "komega", "omega0"}, {}, w);
        p.impropers.push_back({index(e, "i", w), index(e, "j", w), index(e, "k", w), index(e, "l", w),
                               num(e, "komega", w), deg_to_rad(num(e, "omega0", w))});
    }
    t = 0;
    for (const auto &e : array_at(doc, "urey_bradley")) {
        const std::string w = "urey_bradley[" + std::to_string(t++) + "]";
        require_keys(e, {"i", "k", "ku", "u0"}, {}, w);
        p.urey_bradley.push_back({index(e, "i", w), index(e, "k", w), num(e, "ku", w), num(e, "u0", w)});
    }
    t = 0;
    for (const auto &e : array_at(doc, "atoms")) {
        const std::string w = "atoms[" + std::to_string(t++) + "]";
        require_keys(e, {"epsilon", "rmin", "q"}, {}, w);
        p.atoms.push_back({num(e, "epsilon", w), num(e, "rmin", w), num(e, "q", w)});
    }
    p.dielectric = num(doc, "dielectric", "force field");
    if (doc.contains("pair_overrides")) {
        t = 0;
        for (const auto &e : array_at(doc, "pair_overrides")) {
            const std::string w = "pair_overrides[" + std::to_string(t++) + "]";
            require_keys(e, {"i", "j", "epsilon", "rmin"}, {}, w);
            p.pair_overrides.push_back({index(e, "i", w), index(e, "j", w), num(e, "epsilon", w), num(e, "rmin", w)});
        }
    }
    if (doc.contains("cutoff") && !doc.at("cutoff").is_null()) {
        p.cutoff = num(doc, "cutoff", "force field");
    }
    if (doc.contains("hard_floor")) {
        p.hard_floor = num(doc, "hard_floor", "force field");
    }
    return p;
}

json params_to_json(const ForceFieldParams &p) {
    json doc;
    doc["bonds"] = json::array();
    for (const auto &b : p.bonds) {
        doc["bonds"].push_back({{"i", b.i}, {"j", b.j}, {"kb", b.kb}, {"b0", b.b0}});
    }
    doc["angles"] = json::array();
    for (const auto &a : p.angles) {
        doc["angles"].push_back(
            {{"i", a.i}, {"j", a.j}, {"k", a.k}, {"ktheta", a.ktheta}, {"theta0", rad_to_deg(a.theta0)}});
    }
    doc["dihedrals"] = json::array();
    for (const auto &d : p.dihedrals) {
        doc["dihedrals"].push_back({{"i", d.i},
                                    {"j", d.j},
                                    {"k", d.k},
                                    {"l", d.l},
                                    {"kphi", d.kphi},
                                    {"n", d.n},
                                    {"delta", rad_to_deg(d.delta)}});
    }
    doc["impropers"] = json::array();
    for (const auto &d : p.impropers) {
        doc["impropers"].push_back({{"i", d.i},
                                    {"j", d.j},
                                    {"k", d.k},
                                    {"l", d.l},
                                    {"komega", d.komega},
                                    {"omega0", rad_to_deg(d.omega0)}});
    }
    doc["urey_bradley"] = json::array();
    for (const auto &u : p.urey_bradley) {
        doc["urey_bradley"].push_back({{"i", u.i}, {"k", u.k}, {"ku", u.ku}, {"u0", u.u0}});
    }
    doc["atoms"] = json::array();
    for (const auto &a : p.atoms) {
        doc["atoms"].push_back({{"epsilon", a.epsilon}, {"rmin", a.rmin}, {"q", a.q}});
    }
    doc["dielectric"] = p.dielectric;
    if (!p.pair_overrides.empty()) {
        doc["pair_overrides"] = json::array();
        for (const auto &o : p.pair_overrides) {
            doc["pair_overrides"].push_back({{"i", o.i}, {"j", o.j}, {"epsilon", o.epsilon}, {"rmin", o.rmin}});
        }
    }
    if (p.cutoff) {
        doc["cutoff"] = *p.cutoff;
    }
    doc["hard_floor"] = p.hard_floor;
    return doc;
}

ForceFieldParams read_params_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw Error(ErrorKind::Validation, path + ": " + e.what());
    }
    return params_from_json(doc);
}

}  // namespace qloop
