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


#ifndef QLOOP_RESOURCES_H
#define QLOOP_RESOURCES_H

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qloop {

inline constexpr double kToffoliTime = 1.7e-4;
inline constexpr double kSecondsPerYear = 365.25 * 86400.0;

enum class ArithOp { ADD, SQR, MUL, SIN, INVSQRT, REC, SQRT, ARCSIN };

const std::vector<ArithOp> &all_arith_ops();
std::string_view op_code(ArithOp op);
/// Throws UnknownOp.
ArithOp parse_op(std::string_view code);

/// Leading-order Toffoli count on b-bit operands.
double op_cost(ArithOp op, double b);
double op_cost(std::string_view code, double b);
double op_time(ArithOp op, double b, double toffoli_time = kToffoliTime);

/// k - 1 Toffolis for a k-entry lookup.
uint64_t qrom_cost(uint64_t k);
double qrom_time(uint64_t k, double toffoli_time = kToffoliTime);

/// 4L(lg L + 1) + 2Lb, rounded half-up.
double cost_F_exact(double L, double b);
uint64_t cost_F(double L, double b);
/// 2(lg L + b + 1), rounded half-up.
double cost_R_exact(double L, double b);
uint64_t cost_R(double L, double b);

enum class QsnerfVariant { Angle, SinCos };

std::string_view variant_name(QsnerfVariant v);
/// Throws UnknownVariant.
QsnerfVariant parse_variant(std::string_view name);

/// Per placement: 91b^2 + 13b (angle input) or 77b^2 + 13b (sin/cos input).
uint64_t cost_qsnerf(uint64_t bprime, QsnerfVariant variant = QsnerfVariant::Angle);
uint64_t cost_qsnerf_backbone(uint64_t L, uint64_t bprime, QsnerfVariant variant = QsnerfVariant::Angle);

enum class Mode { Serial, Parallel };

std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view name);

/// 52b^2 + 7b.
uint64_t cost_nonbonded_pair(uint64_t bprime);
/// Serial: pair * N(N-1)/2. Parallel over N/2 lanes: pair * (N-1).
uint64_t cost_nonbonded_total(uint64_t N, uint64_t bprime, Mode mode);

/// ceil(sqrt(2 Nc)), exact in integer arithmetic.
uint64_t steps_quantum(uint64_t Nc);

struct CostParams {
    uint64_t L = 10;
    uint64_t N = 200;
    uint64_t b = 8;
    uint64_t bprime = 16;
    double toffoli_time = kToffoliTime;
    Mode mode = Mode::Parallel;
    uint64_t Nc = 4000000000ULL;
    double t_classical = 2.3e-4;
    QsnerfVariant variant = QsnerfVariant::Angle;
    bool count_both_states = false;
    uint64_t factories = 100;
    uint64_t physical_per_logical = 1000;
    uint64_t qubits_per_factory = 150000;

    /// Throws Validation naming the offending field.
    void validate() const;
};

struct OperatorCost {
    uint64_t toffoli = 0;
    double seconds = 0;
};

struct BCost {
    OperatorCost total;
    OperatorCost qsnerf;
    OperatorCost forcefield;
};

BCost cost_B(const CostParams &p);

struct WalkCost {
    OperatorCost V;
    BCost B;
    OperatorCost F;
    OperatorCost R;
    /// 2B + F + R.
    OperatorCost total;
};

WalkCost cost_walk(const CostParams &p);

struct Runtime {
    double classical_s = 0;
    uint64_t steps = 0;
    double quantum_s = 0;
};

Runtime total_runtime(const CostParams &p);

struct QubitEstimate {
    double state = 0;
    double move = 0;
    double coin = 1;
    double qsnerf = 0;
    double forcefield = 0;
    uint64_t logical = 0;
    uint64_t physical = 0;
};

/// logical = ceil(2Lb + (b + lg L + 1) + 1 + 3Nb' + (19b' | 1900b')).
QubitEstimate qubit_estimate(const CostParams &p);

struct ResourceEstimate {
    CostParams params;
    WalkCost walk;
    Runtime runtime;
    QubitEstimate qubits;
};

ResourceEstimate estimate(const CostParams &p);

/// JSON with keys params, per_operator, walk, steps, totals, qubits.
std::string report_json(const ResourceEstimate &e);

/// Human-readable duration in the largest unit that keeps the value >= 1
/// (days start at 48 hours), e.g. "0.06 s", "8.2 mins", "25.2 hours", "2.8 years".
std::string format_duration(double seconds);

struct TableSet {
    std::string table2_csv;
    std::string table3_csv;
    std::string table4_csv;
    std::string table5_csv;
    std::string table6_csv;
    std::string json;
};

/// table2 (b = 16, 32) and table3 (k = 256 .. 8192) use only toffoli_time.
/// table4-table6 use every field of `p`; table5 and table6 report both modes.
TableSet emit_tables(const CostParams &p);

}  // namespace qloop

#endif  // QLOOP_RESOURCES_H
