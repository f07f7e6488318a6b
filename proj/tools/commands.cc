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


#include "commands.h"

#include <cmath>
#include <cstdio>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qloop/forcefield.h"
#include "qloop/forcefield_io.h"
#include "qloop/geometry.h"
#include "qloop/mcmc.h"
#include "qloop/qwalk.h"
#include "qloop/resources.h"
#include "qloop/structure_io.h"

namespace qloop::cli {

using nlohmann::json;

ExitCode exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SingularFrame:
        case ErrorKind::DivergentTerm:
        case ErrorKind::Reducible:
        case ErrorKind::NotReversible:
        case ErrorKind::ZeroGap:
        case ErrorKind::ResolutionTooCoarse:
            return kExitNumeric;
        case ErrorKind::Io:
            return kExitIo;
        default:
            return kExitValidation;
    }
}

namespace {

// Merged settings: config file first, then any flag given on the command line.
class Settings {
  public:
    Settings(json doc, std::string command) : doc_(std::move(doc)), command_(std::move(command)) {}

    bool has(const std::string &key) const {
        return doc_.contains(key) && !doc_.at(key).is_null();
    }

    uint64_t u64(const std::string &key, uint64_t fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const json &v = doc_.at(key);
        if (v.is_number_unsigned()) {
            return v.get<uint64_t>();
        }
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d >= 0 && d < 1.8e19 && std::floor(d) == d) {
                return static_cast<uint64_t>(d);
            }
        }
        fail(key, "expected a non-negative integer");
    }

    double real(const std::string &key, double fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const json &v = doc_.at(key);
        if (!v.is_number()) {
            fail(key, "expected a number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            fail(key, "expected a finite number");
        }
        return d;
    }

    std::string str(const std::string &key, const std::string &fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const json &v = doc_.at(key);
        if (!v.is_string()) {
            fail(key, "expected a string");
        }
        return v.get<std::string>();
    }

    bool flag(const std::string &key, bool fallback) const {
        if (!has(key)) {
            return fallback;
        }
        const json &v = doc_.at(key);
        if (!v.is_boolean()) {
            fail(key, "expected true or false");
        }
        return v.get<bool>();
    }

    uint64_t seed() const {
        if (!has("seed")) {
            throw Error(ErrorKind::Validation, command_ + ": seed is required (--seed or config key \"seed\")");
        }
        return u64("seed", 0);
    }

    const json &doc() const {
        return doc_;
    }

    [[noreturn]] void fail(const std::string &key, const std::string &why) const {
        throw Error(ErrorKind::Validation, command_ + ": " + key + ": " + why);
    }

  private:
    json doc_;
    std::string command_;
};

// Registers typed CLI options and copies the given ones into a settings doc.
class OptionSet {
  public:
    explicit OptionSet(CLI::App *app) : app_(app) {}

    template <typename T>
    void add(const std::string &flag, const std::string &key, const std::string &help) {
        auto &slot = storage<T>().emplace_back();
        CLI::Option *opt = app_->add_option(flag, slot, help);
        keys_.push_back(key);
        merges_.push_back([opt, &slot, key](json &doc) {
            if (opt->count() > 0) {
                doc[key] = slot;
            }
        });
    }

    void add_flag(const std::string &flag, const std::string &key, const std::string &help) {
        auto &slot = bools_.emplace_back(false);
        CLI::Option *opt = app_->add_flag(flag, slot, help);
        keys_.push_back(key);
        merges_.push_back([opt, &slot, key](json &doc) {
            if (opt->count() > 0) {
                doc[key] = slot;
            }
        });
    }

    void merge(json &doc) const {
        for (const auto &m : merges_) {
            m(doc);
        }
    }

    const std::vector<std::string> &keys() const {
        return keys_;
    }

    CLI::App *app() const {
        return app_;
    }

  private:
    template <typename T>
    std::deque<T> &storage() {
        if constexpr (std::is_same_v<T, uint64_t>) {
            return u64s_;
        } else if constexpr (std::is_same_v<T, double>) {
            return doubles_;
        } else {
            return strings_;
        }
    }

    CLI::App *app_;
    std::deque<uint64_t> u64s_;
    std::deque<double> doubles_;
    std::deque<std::string> strings_;
    std::deque<bool> bools_;
    std::vector<std::string> keys_;
    std::vector<std::function<void(json &)>> merges_;
};

json load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open config file " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception &e) {
        throw Error(ErrorKind::Validation, "config " + path + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorKind::Validation, "config " + path + ": top level must be an object");
    }
    return doc;
}

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw Error(ErrorKind::Io, "write failed for " + path.string());
    }
}

std::filesystem::path prepare_out(const std::string &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorKind::Io, "cannot create output directory " + dir);
    }
    return std::filesystem::path(dir);
}

std::string real_str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------- estimator

void add_estimator_options(OptionSet &o) {
    o.add<uint64_t>("--L", "L", "Loop residues");
    o.add<uint64_t>("--N", "N", "Loop atoms (default 20 L)");
    o.add<uint64_t>("--b", "b", "Lookup-table index bits");
    o.add<uint64_t>("--bprime", "bprime", "Coordinate precision bits");
    o.add<std::string>("--mode", "mode", "serial or parallel");
    o.add<double>("--toffoli-time", "toffoli_time", "Seconds per Toffoli");
    o.add<double>("--Nc", "Nc", "Classical step count");
    o.add<double>("--t-classical", "t_classical", "Seconds per classical step");
    o.add<std::string>("--variant", "variant", "SN-NeRF input variant: angle or sincos");
    o.add<uint64_t>("--factories", "factories", "Distillation factories");
    o.add<uint64_t>("--physical-per-logical", "physical_per_logical", "Physical qubits per logical qubit");
    o.add<uint64_t>("--qubits-per-factory", "qubits_per_factory", "Physical qubits per factory");
    o.add_flag("--count-both-states", "count_both_states", "Price refold and energy for both x and x'");
}

CostParams cost_params(const Settings &s) {
    CostParams p;
    p.L = s.u64("L", p.L);
    p.N = s.u64("N", 20 * p.L);
    p.b = s.u64("b", p.b);
    p.bprime = s.u64("bprime", p.bprime);
    p.mode = parse_mode(s.str("mode", "parallel"));
    p.toffoli_time = s.real("toffoli_time", p.toffoli_time);
    p.Nc = s.u64("Nc", p.Nc);
    p.t_classical = s.real("t_classical", p.t_classical);
    p.variant = parse_variant(s.str("variant", "angle"));
    p.factories = s.u64("factories", p.factories);
    p.physical_per_logical = s.u64("physical_per_logical", p.physical_per_logical);
    p.qubits_per_factory = s.u64("qubits_per_factory", p.qubits_per_factory);
    p.count_both_states = s.flag("count_both_states", false);
    p.validate();
    return p;
}

void flatten(const json &j, const std::string &prefix, std::ostream &out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        }
    } else if (j.is_string()) {
        out << prefix << ',' << j.get<std::string>() << '\n';
    } else {
        out << prefix << ',' << j.dump() << '\n';
    }
}

int cmd_estimate(const Settings &s, std::ostream &out) {
    const CostParams p = cost_params(s);
    const std::string format = s.str("format", "json");
    const std::string report = report_json(estimate(p));
    const auto dir = prepare_out(s.str("out", "."));
    write_file(dir / "estimate.json", report);
    if (format == "csv") {
        out << "key,value\n";
        flatten(json::parse(report), "", out);
    } else {
        out << report;
    }
    return kExitOk;
}

int cmd_tables(const Settings &s, std::ostream &out) {
    const CostParams p = cost_params(s);
    const TableSet t = emit_tables(p);
    const auto dir = prepare_out(s.str("out", "."));
    const std::pair<const char *, const std::string *> files[] = {
        {"table2.csv", &t.table2_csv}, {"table3.csv", &t.table3_csv}, {"table4.csv", &t.table4_csv},
        {"table5.csv", &t.table5_csv}, {"table6.csv", &t.table6_csv}, {"report.json", &t.json}};
    for (const auto &[name, content] : files) {
        write_file(dir / name, *content);
        out << (dir / name).string() << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- geometry

void add_table_options(OptionSet &o) {
    o.add<uint64_t>("--L", "L", "Loop residues");
    o.add<uint64_t>("--b1", "b1", "Backbone table index bits (synthetic tables)");
    o.add<uint64_t>("--b2", "b2", "Side-chain table index bits (synthetic tables)");
    o.add<std::string>("--backbone-table", "backbone_table", "CSV of index,phi_deg,psi_deg");
    o.add<std::string>("--chi1-table", "chi1_table", "CSV of index,chi1_deg");
    o.add<uint64_t>("--side-chain-atoms", "side_chain_atoms", "Side-chain atoms per residue (>= 2)");
}

struct Model {
    size_t residues = 1;
    DihedralTables tables;
    BondGeometry geom;
    AtomModel atoms;
    Anchor anchor;

    LoopSpace space() const {
        return tables.space(residues);
    }
};

Model load_model(const Settings &s, uint64_t default_residues, uint64_t default_b1, uint64_t default_b2) {
    Model m;
    m.residues = s.u64("L", default_residues);
    if (m.residues < 1 || m.residues > 1000) {
        s.fail("L", "must be between 1 and 1000");
    }
    const bool bt = s.has("backbone_table");
    const bool ct = s.has("chi1_table");
    if (bt != ct) {
        s.fail(bt ? "chi1_table" : "backbone_table", "both table files must be given together");
    }
    if (bt) {
        m.tables = read_tables_files(s.str("backbone_table", ""), s.str("chi1_table", ""));
        if (s.has("b1") && s.u64("b1", 0) != m.tables.b1()) {
            s.fail("b1", "does not match the backbone table length");
        }
        if (s.has("b2") && s.u64("b2", 0) != m.tables.b2()) {
            s.fail("b2", "does not match the chi1 table length");
        }
    } else {
        const uint64_t b1 = s.u64("b1", default_b1);
        const uint64_t b2 = s.u64("b2", default_b2);
        if (b1 > 16) {
            s.fail("b1", "must be at most 16");
        }
        if (b2 > 16) {
            s.fail("b2", "must be at most 16");
        }
        m.tables = synthetic_tables(static_cast<unsigned>(b1), static_cast<unsigned>(b2));
    }
    const uint64_t sc = s.u64("side_chain_atoms", 2);
    if (sc < 2 || sc > 16) {
        s.fail("side_chain_atoms", "must be between 2 and 16");
    }
    m.atoms.side_chain_atoms = static_cast<unsigned>(sc);
    m.atoms.validate();
    m.geom.validate();
    m.anchor = default_anchor(m.geom);
    return m;
}

LoopState parse_state(const Settings &s, const std::string &text) {
    LoopState st;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            s.fail("state", "residues are written i1:i2 and separated by commas");
        }
        try {
            size_t used1 = 0, used2 = 0;
            const std::string a = item.substr(0, colon);
            const std::string b = item.substr(colon + 1);
            const unsigned long i1 = std::stoul(a, &used1);
            const unsigned long i2 = std::stoul(b, &used2);
            if (used1 != a.size() || used2 != b.size() || i1 > 0xffffffffUL || i2 > 0xffffffffUL) {
                throw std::invalid_argument(item);
            }
            st.residues.push_back({static_cast<uint32_t>(i1), static_cast<uint32_t>(i2)});
        } catch (const std::logic_error &) {
            s.fail("state", "cannot parse residue '" + item + "'");
        }
    }
    if (st.residues.empty()) {
        s.fail("state", "empty state");
    }
    return st;
}

// ---------------------------------------------------------------- refold

int cmd_refold(const Settings &s, std::ostream &out) {
    const bool random = s.flag("random", false);
    if (random == s.has("state")) {
        throw Error(ErrorKind::Validation, "refold: give exactly one of --state or --random");
    }
    LoopState state;
    Model m;
    if (random) {
        m = load_model(s, 4, 3, 2);
        Rng rng(s.seed());
        const LoopSpace space = m.space();
        state = space.zero_state();
        for (auto &r : state.residues) {
            r.i1 = static_cast<uint32_t>(std::uniform_int_distribution<uint64_t>(0, (1ULL << space.b1) - 1)(rng));
            r.i2 = static_cast<uint32_t>(std::uniform_int_distribution<uint64_t>(0, (1ULL << space.b2) - 1)(rng));
        }
    } else {
        state = parse_state(s, s.str("state", ""));
        if (s.has("L") && s.u64("L", 0) != state.size()) {
            s.fail("L", "does not match the number of residues in --state");
        }
        m = load_model(s, state.size(), 3, 2);
    }
    const LoopSpace space = m.space();
    space.validate(state);
    const bool report = s.flag("report", false);

    const Conformation conf = refold(state, m.tables, m.geom, m.anchor, m.atoms);
    const std::string xyz = to_xyz(conf, "qloop refold state=" + state_to_hex(state, space));

    json rep;
    if (report) {
        const auto torsions = torsion_atoms(state.size(), m.atoms);
        double max_err = 0;
        auto residues = json::array();
        auto measure = [&](const std::array<size_t, 4> &q) {
            return measure_dihedral(conf.atoms[q[0]].position, conf.atoms[q[1]].position, conf.atoms[q[2]].position,
                                    conf.atoms[q[3]].position);
        };
        auto diff = [](double a, double b) {
            double d = std::fmod(std::abs(a - b), kTwoPi);
            return d > kPi ? kTwoPi - d : d;
        };
        for (size_t r = 0; r < state.size(); ++r) {
            const auto &entry = m.tables.backbone()[state.residues[r].i1];
            const double chi = m.tables.chi1()[state.residues[r].i2];
            json j;
            j["residue"] = r + 1;
            const std::pair<const char *, std::pair<double, double>> rows[] = {
                {"phi", {entry.phi, measure(torsions[r].phi)}},
                {"psi", {entry.psi, measure(torsions[r].psi)}},
                {"chi1", {chi, measure(torsions[r].chi1)}},
            };
            for (const auto &[name, vals] : rows) {
                const double e = diff(vals.first, vals.second);
                max_err = std::max(max_err, e);
                j[name] = {{"target", vals.first}, {"measured", vals.second}, {"error", e}};
            }
            if (torsions[r].has_omega) {
                const double w = measure(torsions[r].omega);
                const double e = diff(kPi, w);
                max_err = std::max(max_err, e);
                j["omega"] = {{"target", kPi}, {"measured", w}, {"error", e}};
            }
            residues.push_back(j);
        }
        rep["state"] = state_to_hex(state, space);
        rep["residues"] = residues;
        rep["max_error"] = max_err;
    }

    const auto dir = prepare_out(s.str("out", "."));
    write_file(dir / "refold.xyz", xyz);
    out << (dir / "refold.xyz").string() << '\n';
    if (report) {
        write_file(dir / "dihedrals.json", rep.dump(2) + "\n");
        out << (dir / "dihedrals.json").string() << '\n';
        out << "max_dihedral_error " << real_str(rep["max_error"].get<double>()) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- fold

struct Energy {
    Model model;
    ForceFieldParams params;
    PairList pairs;
    bool flat = false;

    double operator()(const LoopState &s) const {
        if (flat) {
            return 0.0;
        }
        return energy_total(refold(s, model.tables, model.geom, model.anchor, model.atoms), params, pairs);
    }
};

Energy load_energy(const Settings &s, Model model) {
    Energy e;
    e.model = std::move(model);
    e.flat = s.flag("flat_energy", false);
    if (s.has("forcefield") && e.flat) {
        s.fail("forcefield", "cannot be combined with flat_energy");
    }
    const Conformation reference =
        refold(e.model.space().zero_state(), e.model.tables, e.model.geom, e.model.anchor, e.model.atoms);
    if (!e.flat) {
        e.params = s.has("forcefield") ? read_params_file(s.str("forcefield", "")) : default_params(reference);
        e.params.validate(reference.size());
        e.pairs = build_pairlist(reference, e.params);
    }
    return e;
}

int cmd_fold(const Settings &s, std::ostream &out) {
    ChainConfig base;
    base.seed = s.seed();
    base.temperature = s.real("temperature", 300.0 * 0.0019872041);
    base.steps = s.u64("steps", 10000);
    base.burn_in = s.u64("burn_in", 0);
    base.thin = s.u64("thin", 1);
    base.validate();
    const uint64_t chains = s.u64("chains", 1);
    if (chains < 1 || chains > 64) {
        s.fail("chains", "must be between 1 and 64");
    }
    const bool dump = s.flag("dump_states", false);
    const bool exact = s.flag("exact_check", false);
    const std::string format = s.str("format", "json");

    Model model = load_model(s, 2, 2, 1);
    const LoopSpace space = model.space();
    if (exact && space.num_states() > kDefaultStateCap) {
        throw Error(ErrorKind::StateSpaceTooLarge, "fold: exact_check needs at most " +
                                                       std::to_string(kDefaultStateCap) + " states");
    }
    const Energy energy = load_energy(s, std::move(model));
    const EnergyOracle oracle = std::cref(energy);

    std::vector<Trajectory> runs(chains);
    std::vector<std::exception_ptr> errors(chains);
    auto work = [&](size_t k) {
        try {
            ChainConfig cfg = base;
            cfg.seed = base.seed + k;
            runs[k] = run_chain(space.zero_state(), space, cfg, oracle);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };
    if (chains == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (size_t k = 0; k < chains; ++k) {
            threads.emplace_back(work, k);
        }
        for (auto &t : threads) {
            t.join();
        }
    }
    for (size_t k = 0; k < chains; ++k) {
        if (errors[k]) {
            try {
                std::rethrow_exception(errors[k]);
            } catch (const Error &e) {
                throw Error(e.kind(), "chain " + std::to_string(k) + ": " + e.detail());
            }
        }
    }

    json meta;
    meta["command"] = "fold";
    meta["seed"] = base.seed;
    json settings = s.doc();
    settings.erase("out");
    meta["settings"] = settings;
    meta["residues"] = space.residues;
    meta["b1"] = space.b1;
    meta["b2"] = space.b2;
    meta["temperature"] = base.temperature;
    meta["steps"] = base.steps;
    meta["burn_in"] = base.burn_in;
    meta["thin"] = base.thin;
    auto chain_meta = json::array();
    size_t best_chain = 0;
    for (size_t k = 0; k < chains; ++k) {
        const Trajectory &t = runs[k];
        chain_meta.push_back({{"chain", k},
                              {"seed", base.seed + k},
                              {"accepted", t.accepted},
                              {"acceptance_rate", t.acceptance_rate},
                              {"samples", t.samples.size()},
                              {"final_energy", t.final_energy},
                              {"final_state", state_to_hex(t.final_state, space)},
                              {"best_energy", t.best_energy},
                              {"best_state", state_to_hex(t.best_state, space)}});
        if (t.best_energy < runs[best_chain].best_energy) {
            best_chain = k;
        }
    }
    meta["chains"] = chain_meta;

    if (exact) {
        const auto energies = enumerate_energies(space, oracle);
        const TransitionMatrix p = build_transition_matrix(space, energies, base.temperature);
        const Eigen::VectorXd pi = stationary_exact(p.matrix);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(pi.size());
        double total = 0;
        for (const Trajectory &t : runs) {
            for (const auto &smp : t.samples) {
                counts(static_cast<Eigen::Index>(space.encode(smp.state))) += 1;
                total += 1;
            }
        }
        if (total == 0) {
            throw Error(ErrorKind::Validation, "fold: exact_check needs at least one recorded sample");
        }
        meta["exact_check"] = {{"states", space.num_states()},
                               {"samples", static_cast<uint64_t>(total)},
                               {"tv_distance", total_variation(counts / total, pi)}};
    }

    std::vector<std::pair<std::string, std::string>> files;
    for (size_t k = 0; k < chains; ++k) {
        std::ostringstream csv;
        csv << "step,energy,accepted" << (dump ? ",state" : "") << '\n';
        for (const auto &smp : runs[k].samples) {
            csv << smp.step << ',' << real_str(smp.energy) << ',' << (smp.accepted ? 1 : 0);
            if (dump) {
                csv << ',' << state_to_hex(smp.state, space);
            }
            csv << '\n';
        }
        files.emplace_back(chains == 1 ? "trajectory.csv" : "trajectory_" + std::to_string(k) + ".csv", csv.str());
    }
    auto conf_of = [&](const LoopState &st) {
        return refold(st, energy.model.tables, energy.model.geom, energy.model.anchor, energy.model.atoms);
    };
    files.emplace_back("final.xyz", to_xyz(conf_of(runs[0].final_state),
                                           "final chain=0 energy=" + real_str(runs[0].final_energy)));
    files.emplace_back("best.xyz", to_xyz(conf_of(runs[best_chain].best_state),
                                          "best chain=" + std::to_string(best_chain) +
                                              " energy=" + real_str(runs[best_chain].best_energy)));
    const std::string meta_text = meta.dump(2) + "\n";
    files.emplace_back("metadata.json", meta_text);

    const auto dir = prepare_out(s.str("out", "."));
    for (const auto &[name, content] : files) {
        write_file(dir / name, content);
    }
    if (format == "csv") {
        out << "chain,acceptance_rate,final_energy,best_energy\n";
        for (size_t k = 0; k < chains; ++k) {
            out << k << ',' << real_str(runs[k].acceptance_rate) << ',' << real_str(runs[k].final_energy) << ','
                << real_str(runs[k].best_energy) << '\n';
        }
    } else {
        out << meta_text;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- walk

int cmd_walk(const Settings &s, std::ostream &out) {
    const std::string instance = s.str("instance", "flat");
    const double temperature = s.real("temperature", 1.0);
    if (!(temperature > 0)) {
        s.fail("temperature", "must be positive");
    }
    const uint64_t seed = s.seed();
    const uint64_t shots = s.u64("shots", 1000);
    const uint64_t cap = s.u64("cap", kDefaultWalkCap);

    uint64_t def_l = 1, def_b1 = 1, def_b2 = 1;
    if (instance == "two-level") {
        def_b2 = 0;
    } else if (instance != "flat" && instance != "random" && instance != "forcefield") {
        s.fail("instance", "expected flat, two-level, random or forcefield");
    }
    const LoopSpace loop{static_cast<size_t>(s.u64("L", def_l)), static_cast<unsigned>(s.u64("b1", def_b1)),
                         static_cast<unsigned>(s.u64("b2", def_b2))};
    if (loop.residues < 1 || loop.b1 > 16 || loop.b2 > 16) {
        throw Error(ErrorKind::Validation, "walk: L must be >= 1 and b1, b2 at most 16");
    }
    if (instance == "two-level" && loop.num_states() != 2) {
        s.fail("instance", "two-level needs exactly two states (L=1, b1=1, b2=0)");
    }
    const WalkSpace space = WalkSpace::make(loop, cap);

    std::vector<double> energies(space.system_dim, 0.0);
    Rng rng(seed);
    if (instance == "two-level") {
        energies[1] = temperature * std::log(2.0);
    } else if (instance == "random") {
        std::uniform_real_distribution<double> u(0.0, 2.0 * temperature);
        for (auto &e : energies) {
            e = u(rng);
        }
    } else if (instance == "forcefield") {
        Model m;
        m.residues = loop.residues;
        m.tables = synthetic_tables(loop.b1, loop.b2);
        m.anchor = default_anchor(m.geom);
        const Conformation reference = refold(loop.zero_state(), m.tables, m.geom, m.anchor, m.atoms);
        const ForceFieldParams params = default_params(reference);
        const PairList pairs = build_pairlist(reference, params);
        for (uint64_t x = 0; x < space.system_dim; ++x) {
            energies[x] = energy_total(refold(loop.decode(x), m.tables, m.geom, m.anchor, m.atoms), params, pairs);
        }
    }

    const TransitionMatrix p = build_transition_matrix(loop, energies, temperature, cap);
    const WalkOperators ops = build_walk(space, energies, temperature);
    const SpectrumReport rep = analyze_walk(ops, p.matrix);
    const int sigma = rep.stationary_check.sigma;
    const double gap = walk_phase_gap(ops.W, sigma);
    const double resolution = s.real("resolution", 0.5 * gap);

    json doc = json::parse(spectrum_report_json(rep));
    doc["instance"] = instance;
    doc["temperature"] = temperature;
    doc["seed"] = seed;
    doc["energies"] = energies;
    doc["dimension"] = space.dim;
    double max_unitarity = 0;
    for (const auto *u : {&ops.V, &ops.B, &ops.F, &ops.R, &ops.W}) {
        max_unitarity = std::max(max_unitarity, unitarity_error(*u));
    }
    doc["max_unitarity_error"] = max_unitarity;

    json qpe;
    qpe["resolution"] = resolution;
    qpe["walk_phase_gap"] = gap;
    const std::pair<const char *, Eigen::VectorXd> inputs[] = {
        {"pi", coherent_stationary_state(space, rep.stationary)},
        {"uniform", uniform_system_state(space)},
    };
    for (const auto &[name, v] : inputs) {
        const QpeProjection proj = qpe_project(ops, v, resolution, sigma);
        Eigen::VectorXd hist = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.system_dim));
        uint64_t successes = 0;
        for (uint64_t k = 0; k < shots; ++k) {
            const QpeSample smp = qpe_sample(proj, rng);
            if (smp.success) {
                ++successes;
                hist(static_cast<Eigen::Index>(*smp.state)) += 1;
            }
        }
        json j;
        j["success_probability"] = proj.success_probability;
        j["tv_distance_exact"] = total_variation(proj.distribution, rep.stationary);
        j["shots"] = shots;
        j["successes"] = successes;
        if (successes > 0) {
            j["tv_distance_sampled"] = total_variation(hist / static_cast<double>(successes), rep.stationary);
        }
        qpe[name] = j;
    }
    doc["qpe"] = qpe;

    const std::string text = doc.dump(2) + "\n";
    const auto dir = prepare_out(s.str("out", "."));
    write_file(dir / "spectrum.json", text);
    if (s.str("format", "json") == "csv") {
        out << "lambda,literal_residual,signed_residual\n";
        for (size_t j = 0; j < rep.literal.matches.size(); ++j) {
            out << real_str(rep.literal.matches[j].lambda) << ',' << real_str(rep.literal.matches[j].residual())
                << ',' << real_str(rep.signed_match.matches[j].residual()) << '\n';
        }
    } else {
        out << text;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- dispatch

struct Command {
    CLI::App *app;
    std::unique_ptr<OptionSet> options;
    std::function<int(const Settings &, std::ostream &)> body;
};

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum-MCMC loop modelling: resource estimates, folding, refolding and walk checks", "qloop"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    uint64_t seed = 0;
    std::string out_dir;
    std::string format;
    CLI::Option *o_config = app.add_option("--config", config_path, "JSON config; flags override its keys");
    CLI::Option *o_seed = app.add_option("--seed", seed, "RNG seed");
    CLI::Option *o_out = app.add_option("--out", out_dir, "Output directory");
    CLI::Option *o_format = app.add_option("--format", format, "Standard output format")
                                ->check(CLI::IsMember({"json", "csv"}));

    std::map<std::string, Command> commands;
    auto make = [&](const std::string &name, const std::string &help, auto body) -> OptionSet & {
        CLI::App *sub = app.add_subcommand(name, help);
        Command &c = commands[name];
        c.app = sub;
        c.options = std::make_unique<OptionSet>(sub);
        c.body = body;
        return *c.options;
    };

    add_estimator_options(make("tables", "Write table2.csv .. table6.csv plus report.json", cmd_tables));
    add_estimator_options(make("estimate", "Resource estimate for one parameter set", cmd_estimate));

    {
        OptionSet &o = make("fold", "Run Metropolis-Hastings chains over a loop", cmd_fold);
        add_table_options(o);
        o.add<std::string>("--forcefield", "forcefield", "Force-field parameter JSON");
        o.add_flag("--flat-energy", "flat_energy", "Use E = 0 for every state");
        o.add<double>("--temperature", "temperature", "kT in energy units");
        o.add<uint64_t>("--steps", "steps", "Total steps, burn-in included");
        o.add<uint64_t>("--burn-in", "burn_in", "Steps discarded before recording");
        o.add<uint64_t>("--thin", "thin", "Record every thin-th step");
        o.add<uint64_t>("--chains", "chains", "Independent chains (one thread each)");
        o.add_flag("--dump-states", "dump_states", "Add the hex state column to trajectories");
        o.add_flag("--exact-check", "exact_check", "Compare samples with the exact stationary distribution");
    }
    {
        OptionSet &o = make("refold", "Convert a dihedral-index state to Cartesian XYZ", cmd_refold);
        add_table_options(o);
        o.add<std::string>("--state", "state", "Indices i1:i2 per residue, comma separated");
        o.add_flag("--random", "random", "Draw a random state (needs --seed)");
        o.add_flag("--report", "report", "Write dihedrals.json with re-measured torsions");
    }
    {
        OptionSet &o = make("walk", "Build the walk operator on a toy instance and check its spectrum", cmd_walk);
        o.add<std::string>("--instance", "instance", "flat, two-level, random or forcefield");
        o.add<uint64_t>("--L", "L", "Residues");
        o.add<uint64_t>("--b1", "b1", "Backbone index bits");
        o.add<uint64_t>("--b2", "b2", "Side-chain index bits");
        o.add<double>("--temperature", "temperature", "kT in energy units");
        o.add<double>("--resolution", "resolution", "Phase-estimation bin width (default half the phase gap)");
        o.add<uint64_t>("--shots", "shots", "Phase-estimation samples per input state");
        o.add<uint64_t>("--cap", "cap", "Maximum walk dimension");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        for (auto &[name, cmd] : commands) {
            if (!cmd.app->parsed()) {
                continue;
            }
            json doc = json::object();
            if (o_config->count() > 0) {
                doc = load_config(config_path);
            }
            std::set<std::string> allowed(cmd.options->keys().begin(), cmd.options->keys().end());
            allowed.insert({"seed", "out", "format"});
            for (auto it = doc.begin(); it != doc.end(); ++it) {
                if (!allowed.count(it.key())) {
                    throw Error(ErrorKind::Validation, name + ": unknown config key '" + it.key() + "'");
                }
            }
            cmd.options->merge(doc);
            if (o_seed->count() > 0) doc["seed"] = seed;
            if (o_out->count() > 0) doc["out"] = out_dir;
            if (o_format->count() > 0) doc["format"] = format;
            const Settings settings(doc, name);
            const std::string fmt = settings.str("format", "json");
            if (fmt != "json" && fmt != "csv") {
                settings.fail("format", "expected json or csv");
            }
            return cmd.body(settings, out);
        }
        throw Error(ErrorKind::Validation, "no subcommand given");
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error &e) {
        err << "error: Io: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace qloop::cli
