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

#ifndef QLOOP_STRUCTURE_IO_H
#define QLOOP_STRUCTURE_IO_H

#include <iosfwd>
#include <string>

#include "qloop/geometry.h"

namespace qloop {

// Table files are CSV in degrees:
//   backbone: index,phi_deg,psi_deg
//   chi1:     index,chi1_deg
// Row count must be a power of two and the index column must run 0..n-1.

DihedralTables read_tables(std::istream &backbone_csv, std::istream &chi1_csv);
DihedralTables read_tables_files(const std::string &backbone_path, const std::string &chi1_path);

void write_backbone_table(std::ostream &out, const DihedralTables &tables);
void write_chi1_table(std::ostream &out, const DihedralTables &tables);

/// Standard XYZ: atom count, comment line, then `element x y z` with six
/// decimals.
void write_xyz(std::ostream &out, const Conformation &conf, const std::string &comment);
std::string to_xyz(const Conformation &conf, const std::string &comment);

/// Reads coordinates and element labels only; residue metadata and bonds are
/// not part of the format.
Conformation read_xyz(std::istream &in);

}  // namespace qloop

#endif  // QLOOP_STRUCTURE_IO_H
