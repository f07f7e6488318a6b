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


#include "qloop/resources.h"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "qloop/error.h"

namespace qloop {

namespace {

uint64_t round_half_up(double x) {
    return static_cast<uint64_t>(std::floor(x + 0.5));
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

double time_of(uint64_t count, double toffoli_time) {
    return static_cast<double>(count) * toffoli_time;
}

}  // namespace

const std::vector<ArithOp> &all_arith_ops() {
    static const std::vector<ArithOp> ops = {ArithOp::ADD,     ArithOp::SQR, ArithOp::MUL,  ArithOp::SIN,
                                             ArithOp::INVSQRT, ArithOp::REC, ArithOp::SQRT, ArithOp::ARCSIN};
    return ops;
}

std::string_view op_code(ArithOp op) {
    switch (op) {
        case ArithOp::ADD:
            return "ADD";
        case ArithOp::SQR:
            return "SQR";
        case ArithOp::MUL:
            return "MUL";
        case ArithOp::SIN:
            return "SIN";
        case ArithOp::INVSQRT:
            return "INVSQRT";
        case ArithOp::REC:
            return "REC";
        case ArithOp::SQRT:
            return "SQRT";
        case ArithOp::ARCSIN:
            return "ARCSIN";
    }
    return "?";
}

ArithOp parse_op(std::string_view code) {
    for (ArithOp op : all_arith_ops()) {
        if (op_code(op) == code) {
            return op;
        }
    }
    throw Error(ErrorKind::UnknownOp, "unknown arithmetic operation '" + std::string(code) + "'");
}

double op_cost(ArithOp op, double b) {
    if (!(b >= 0)) {
        throw Error(ErrorKind::Validation, "operand width must be non-negative");
    }
    const double b2 = b * b;
    switch (op) {
        case ArithOp::ADD:
            return b;
        case ArithOp::SQR:
            return b2 / 2;
        case ArithOp::MUL:
            return 2 * b2;
        case ArithOp::SIN:
            return 9 * b2 / 2;
        case ArithOp::INVSQRT:
            return 18 * b2;
        case ArithOp::REC:
            return 37 * b2 / 2;
        case ArithOp::SQRT:
            return 20 * b2;
        case ArithOp::ARCSIN:
            return 101 * b2 / 2;
    }
    throw Error(ErrorKind::UnknownOp, "unknown arithmetic operation");
}

double op_cost(std::string_view code, double b) {
    return op_cost(parse_op(code), b);
}

double op_time(ArithOp op, double b, double toffoli_time) {
    return op_cost(op, b) * toffoli_time;
}

uint64_t qrom_cost(uint64_t k) {
    if (k == 0) {
        throw Error(ErrorKind::Validation, "lookup table length must be at least 1");
    }
    return k - 1;
}

double qrom_time(uint64_t k, double toffoli_time) {
    return time_of(qrom_cost(k), toffoli_time);
}

double cost_F_exact(double L, double b) {
    if (!(L >= 1) || !(b >= 0)) {
        throw Error(ErrorKind::Validation, "cost_F needs L >= 1 and b >= 0");
    }
    return 4 * L * (std::log2(L) + 1) + 2 * L * b;
}

uint64_t cost_F(double L, double b) {
    return round_half_up(cost_F_exact(L, b));
}

double cost_R_exact(double L, double b) {
    if (!(L >= 1) || !(b >= 0)) {
        throw Error(ErrorKind::Validation, "cost_R needs L >= 1 and b >= 0");
    }
    return 2 * (std::log2(L) + b + 1);
}

uint64_t cost_R(double L, double b) {
    return round_half_up(cost_R_exact(L, b));
}

std::string_view variant_name(QsnerfVariant v) {
    return v == QsnerfVariant::Angle ? "angle" : "sincos";
}

QsnerfVariant parse_variant(std::string_view name) {
    if (name == "angle") {
        return QsnerfVariant::Angle;
    }
    if (name == "sincos") {
        return QsnerfVariant::SinCos;
    }
    throw Error(ErrorKind::UnknownVariant, "unknown SN-NeRF variant '" + std::string(name) + "'");
}

uint64_t cost_qsnerf(uint64_t bprime, QsnerfVariant variant) {
    if (bprime < 1) {
        throw Error(ErrorKind::Validation, "bprime must be at least 1");
    }
    const uint64_t lead = variant == QsnerfVariant::Angle ? 91 : 77;
    return lead * bprime * bprime + 13 * bprime;
}

uint64_t cost_qsnerf_backbone(uint64_t L, uint64_t bprime, QsnerfVariant variant) {
    if (L < 1) {
        throw Error(ErrorKind::Validation, "L must be at least 1");
    }
    return L * cost_qsnerf(bprime, variant);
}

std::string_view mode_name(Mode m) {
    return m == Mode::Serial ? "serial" : "parallel";
}

Mode parse_mode(std::string_view name) {
    if (name == "serial") {
        return Mode::Serial;
    }
    if (name == "parallel") {
        return Mode::Parallel;
    }
    throw Error(ErrorKind::Validation, "mode must be serial or parallel, got '" + std::string(name) + "'");
}

uint64_t cost_nonbonded_pair(uint64_t bprime) {
    if (bprime < 1) {
        throw Error(ErrorKind::Validation, "bprime must be at least 1");
    }
    return 52 * bprime * bprime + 7 * bprime;
}

uint64_t cost_nonbonded_total(uint64_t N, uint64_t bprime, Mode mode) {
    if (N < 2) {
        throw Error(ErrorKind::Validation, "N must be at least 2");
    }
    const uint64_t pair = cost_nonbonded_pair(bprime);
    return mode == Mode::Serial ? pair * (N * (N - 1) / 2) : pair * (N - 1);
}

uint64_t steps_quantum(uint64_t Nc) {
    if (Nc < 1) {
        throw Error(ErrorKind::Validation, "Nc must be at least 1");
    }
    const uint64_t n = 2 * Nc;
    auto r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) {
        --r;
    }
    while (r * r < n) {
        ++r;
    }
    return r;
}

void CostParams::validate() const {
    auto fail = [](const std::string &field, const std::string &why) {
        throw Error(ErrorKind::Validation, field + ": " + why);
    };
    if (L < 1) fail("L", "must be at least 1");
    if (N < 2) fail("N", "must be at least 2");
    if (b < 1) fail("b", "must be at least 1");
    if (bprime < 1) fail("bprime", "must be at least 1");
    if (!(toffoli_time > 0) || !std::isfinite(toffoli_time)) fail("toffoli_time", "must be positive");
    if (Nc < 1) fail("Nc", "must be at least 1");
    if (Nc > (uint64_t{1} << 62)) fail("Nc", "too large");
    if (!(t_classical > 0) || !std::isfinite(t_classical)) fail("t_classical", "must be positive");
    if (factories < 1) fail("factories", "must be at least 1");
    if (physical_per_logical < 1) fail("physical_per_logical", "must be at least 1");
    if (qubits_per_factory < 1) fail("qubits_per_factory", "must be at least 1");
    if (L > 1000000 || N > 10000000 || b > 64 || bprime > 1024) fail("params", "outside supported range");
}

BCost cost_B(const CostParams &p) {
    p.validate();
    const uint64_t copies = p.count_both_states ? 2 : 1;
    BCost c;
    c.qsnerf.toffoli = copies * cost_qsnerf_backbone(p.L, p.bprime, p.variant);
    c.forcefield.toffoli = copies * cost_nonbonded_total(p.N, p.bprime, p.mode);
    c.total.toffoli = c.qsnerf.toffoli + c.forcefield.toffoli;
    c.qsnerf.seconds = time_of(c.qsnerf.toffoli, p.toffoli_time);
    c.forcefield.seconds = time_of(c.forcefield.toffoli, p.toffoli_time);
    c.total.seconds = time_of(c.total.toffoli, p.toffoli_time);
    return c;
}

WalkCost cost_walk(const CostParams &p) {
    WalkCost w;
    w.B = cost_B(p);
    const auto L = static_cast<double>(p.L);
    const auto b = static_cast<double>(p.b);
    w.F.toffoli = cost_F(L, b);
    w.F.seconds = time_of(w.F.toffoli, p.toffoli_time);
    w.R.toffoli = cost_R(L, b);
    w.R.seconds = time_of(w.R.toffoli, p.toffoli_time);
    w.total.toffoli = 2 * w.B.total.toffoli + w.F.toffoli + w.R.toffoli;
    w.total.seconds = time_of(w.total.toffoli, p.toffoli_time);
    return w;
}

Runtime total_runtime(const CostParams &p) {
    Runtime r;
    const WalkCost w = cost_walk(p);
    r.classical_s = static_cast<double>(p.Nc) * p.t_classical;
    r.steps = steps_quantum(p.Nc);
    r.quantum_s = static_cast<double>(r.steps) * w.total.seconds;
    return r;
}

QubitEstimate qubit_estimate(const CostParams &p) {
    p.validate();
    QubitEstimate q;
    const auto L = static_cast<double>(p.L);
    const auto b = static_cast<double>(p.b);
    const auto bp = static_cast<double>(p.bprime);
    q.state = 2 * L * b;
    q.move = b + std::log2(L) + 1;
    q.coin = 1;
    q.qsnerf = 3 * static_cast<double>(p.N) * bp;
    q.forcefield = (p.mode == Mode::Serial ? 19 : 1900) * bp;
    q.logical = static_cast<uint64_t>(std::ceil(q.state + q.move + q.coin + q.qsnerf + q.forcefield));
    q.physical = q.logical * p.physical_per_logical + p.factories * p.qubits_per_factory;
    return q;
}

ResourceEstimate estimate(const CostParams &p) {
    ResourceEstimate e;
    e.params = p;
    e.walk = cost_walk(p);
    e.runtime = total_runtime(p);
    e.qubits = qubit_estimate(p);
    return e;
}

namespace {

nlohmann::json params_json(const CostParams &p) {
    nlohmann::json j;
    j["L"] = p.L;
    j["N"] = p.N;
    j["b"] = p.b;
    j["bprime"] = p.bprime;
    j["toffoli_time"] = p.toffoli_time;
    j["mode"] = std::string(mode_name(p.mode));
    j["Nc"] = p.Nc;
    j["t_classical"] = p.t_classical;
    j["variant"] = std::string(variant_name(p.variant));
    j["count_both_states"] = p.count_both_states;
    j["factories"] = p.factories;
    j["physical_per_logical"] = p.physical_per_logical;
    j["qubits_per_factory"] = p.qubits_per_factory;
    return j;
}

nlohmann::json cost_json(const OperatorCost &c) {
    return {{"toffoli", c.toffoli}, {"seconds", c.seconds}, {"display", format_duration(c.seconds)}};
}

}  // namespace

std::string report_json(const ResourceEstimate &e) {
    nlohmann::json j;
    j["params"] = params_json(e.params);
    nlohmann::json ops;
    ops["V"] = cost_json(e.walk.V);
    ops["B"] = cost_json(e.walk.B.total);
    ops["B"]["qsnerf"] = cost_json(e.walk.B.qsnerf);
    ops["B"]["forcefield"] = cost_json(e.walk.B.forcefield);
    ops["F"] = cost_json(e.walk.F);
    ops["R"] = cost_json(e.walk.R);
    j["per_operator"] = ops;
    j["walk"] = cost_json(e.walk.total);
    j["steps"] = e.runtime.steps;
    j["totals"] = {{"classical_s", e.runtime.classical_s},
                   {"quantum_s", e.runtime.quantum_s},
                   {"classical_display", format_duration(e.runtime.classical_s)},
                   {"quantum_display", format_duration(e.runtime.quantum_s)}};
    j["qubits"] = {{"logical", e.qubits.logical},
                   {"physical", e.qubits.physical},
                   {"breakdown",
                    {{"state", e.qubits.state},
                     {"move", e.qubits.move},
                     {"coin", e.qubits.coin},
                     {"qsnerf", e.qubits.qsnerf},
                     {"forcefield", e.qubits.forcefield}}}};
    return j.dump(2) + "\n";
}

std::string format_duration(double s) {
    if (s == 0) {
        return "0";
    }
    if (s < 1) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1g s", s);
        return buf;
    }
    struct Unit {
        double seconds;
        double threshold;
        const char *name;
    };
    static const Unit units[] = {{kSecondsPerYear, kSecondsPerYear, "years"},
                                 {86400.0, 2 * 86400.0, "days"},
                                 {3600.0, 3600.0, "hours"},
                                 {60.0, 60.0, "mins"},
                                 {1.0, 1.0, "s"}};
    for (const Unit &u : units) {
        if (s >= u.threshold) {
            return fixed(s / u.seconds, 1) + " " + u.name;
        }
    }
    return fixed(s, 1) + " s";
}

TableSet emit_tables(const CostParams &p) {
    p.validate();
    TableSet t;
    nlohmann::json j;
    const double tt = p.toffoli_time;

    std::ostringstream t2;
    t2 << "code,toffoli_b16,time_b16_s,toffoli_b32,time_b32_s\n";
    auto j2 = nlohmann::json::array();
    for (ArithOp op : all_arith_ops()) {
        const double c16 = op_cost(op, 16);
        const double c32 = op_cost(op, 32);
        t2 << op_code(op) << ',' << num(c16) << ',' << num(c16 * tt) << ',' << num(c32) << ',' << num(c32 * tt)
           << '\n';
        j2.push_back({{"code", std::string(op_code(op))},
                      {"toffoli_b16", c16},
                      {"time_b16_s", c16 * tt},
                      {"toffoli_b32", c32},
                      {"time_b32_s", c32 * tt}});
    }
    t.table2_csv = t2.str();
    j["table2"] = j2;

    std::ostringstream t3;
    t3 << "k,toffoli,time_s\n";
    auto j3 = nlohmann::json::array();
    for (uint64_t k : {256, 512, 1024, 8192}) {
        t3 << k << ',' << qrom_cost(k) << ',' << num(qrom_time(k, tt)) << '\n';
        j3.push_back({{"k", k}, {"toffoli", qrom_cost(k)}, {"time_s", qrom_time(k, tt)}});
    }
    t.table3_csv = t3.str();
    j["table3"] = j3;

    CostParams serial = p;
    serial.mode = Mode::Serial;
    CostParams parallel = p;
    parallel.mode = Mode::Parallel;
    const QubitEstimate qs = qubit_estimate(serial);
    const QubitEstimate qp = qubit_estimate(parallel);
    const WalkCost ws = cost_walk(serial);
    const WalkCost wp = cost_walk(parallel);
    const uint64_t qsnerf_angle = cost_qsnerf_backbone(p.L, p.bprime, QsnerfVariant::Angle);
    const uint64_t qsnerf_sincos = cost_qsnerf_backbone(p.L, p.bprime, QsnerfVariant::SinCos);

    std::ostringstream t4;
    t4 << "component,logical_qubits_serial,logical_qubits_parallel,toffoli_serial,toffoli_parallel\n";
    t4 << "state_space," << num(qs.state) << ',' << num(qp.state) << ",,\n";
    t4 << "move_register," << num(qs.move) << ',' << num(qp.move) << ",,\n";
    t4 << "V,,,0,0\n";
    t4 << "F,,," << ws.F.toffoli << ',' << wp.F.toffoli << '\n';
    t4 << "R,,," << ws.R.toffoli << ',' << wp.R.toffoli << '\n';
    t4 << "qsnerf," << num(qs.qsnerf) << ',' << num(qp.qsnerf) << ',' << ws.B.qsnerf.toffoli << ','
       << wp.B.qsnerf.toffoli << '\n';
    t4 << "forcefield," << num(qs.forcefield) << ',' << num(qp.forcefield) << ',' << ws.B.forcefield.toffoli << ','
       << wp.B.forcefield.toffoli << '\n';
    t.table4_csv = t4.str();
    j["table4"] = {{"state_space", qs.state},
                   {"move_register", qs.move},
                   {"V", 0},
                   {"F", ws.F.toffoli},
                   {"R", ws.R.toffoli},
                   {"qsnerf", {{"qubits", qs.qsnerf}, {"toffoli_angle", qsnerf_angle}, {"toffoli_sincos", qsnerf_sincos}}},
                   {"forcefield",
                    {{"qubits_serial", qs.forcefield},
                     {"qubits_parallel", qp.forcefield},
                     {"toffoli_serial", ws.B.forcefield.toffoli},
                     {"toffoli_parallel", wp.B.forcefield.toffoli}}}};

    std::ostringstream t5;
    t5 << "mode,V_s,B_s,F_s,R_s,W_s,logical_qubits,B,F,R,W\n";
    auto j5 = nlohmann::json::array();
    for (const auto &[mode, w, q] : {std::tuple{Mode::Parallel, wp, qp}, std::tuple{Mode::Serial, ws, qs}}) {
        t5 << mode_name(mode) << ",0," << num(w.B.total.seconds) << ',' << num(w.F.seconds) << ',' << num(w.R.seconds)
           << ',' << num(w.total.seconds) << ',' << q.logical << ',' << format_duration(w.B.total.seconds) << ','
           << format_duration(w.F.seconds) << ',' << format_duration(w.R.seconds) << ','
           << format_duration(w.total.seconds) << '\n';
        j5.push_back({{"mode", std::string(mode_name(mode))},
                      {"V", cost_json(w.V)},
                      {"B", cost_json(w.B.total)},
                      {"F", cost_json(w.F)},
                      {"R", cost_json(w.R)},
                      {"W", cost_json(w.total)},
                      {"logical_qubits", q.logical}});
    }
    t.table5_csv = t5.str();
    j["table5"] = j5;

    const Runtime rs = total_runtime(serial);
    const Runtime rp = total_runtime(parallel);
    std::ostringstream t6;
    t6 << "row,n_steps,t_step_s,total_s,logical_qubits,t_step,total\n";
    t6 << "classical," << p.Nc << ',' << num(p.t_classical) << ',' << num(rs.classical_s) << ",,"
       << format_duration(p.t_classical) << ',' << format_duration(rs.classical_s) << '\n';
    t6 << "quantum_parallel," << rp.steps << ',' << num(wp.total.seconds) << ',' << num(rp.quantum_s) << ','
       << qp.logical << ',' << format_duration(wp.total.seconds) << ',' << format_duration(rp.quantum_s) << '\n';
    t6 << "quantum_serial," << rs.steps << ',' << num(ws.total.seconds) << ',' << num(rs.quantum_s) << ','
       << qs.logical << ',' << format_duration(ws.total.seconds) << ',' << format_duration(rs.quantum_s) << '\n';
    t.table6_csv = t6.str();
    j["table6"] = {
        {"classical", {{"n_steps", p.Nc}, {"t_step_s", p.t_classical}, {"total_s", rs.classical_s}}},
        {"quantum_parallel",
         {{"n_steps", rp.steps}, {"t_step_s", wp.total.seconds}, {"total_s", rp.quantum_s}, {"logical_qubits", qp.logical}}},
        {"quantum_serial",
         {{"n_steps", rs.steps}, {"t_step_s", ws.total.seconds}, {"total_s", rs.quantum_s}, {"logical_qubits", qs.logical}}}};
    j["params"] = params_json(p);
    t.json = j.dump(2) + "\n";
    return t;
}

}  // namespace qloop
