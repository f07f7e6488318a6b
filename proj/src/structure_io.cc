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

#include "qloop/structure_io.h"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "qloop/error.h"

namespace qloop {

namespace {

std::string trim(const std::string &s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        fields.push_back(trim(field));
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_double(const std::string &text, const std::string &where) {
    try {
        size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::exception &) {
        throw Error(ErrorKind::Validation, where + ": cannot parse number '" + text + "'");
    }
}

/// Returns the numeric rows after validating the header and index column.
std::vector<std::vector<double>> read_indexed_csv(std::istream &in, const std::vector<std::string> &header,
                                                  const std::string &name) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::Validation, name + ": empty file");
    }
    if (split_csv(trim(line)) != header) {
        std::string expected;
        for (size_t i = 0; i < header.size(); ++i) {
            expected += (i ? "," : "") + header[i];
        }
        throw Error(ErrorKind::Validation, name + ": header must be '" + expected + "'");
    }
    std::vector<std::vector<double>> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        const std::string where = name + " line " + std::to_string(line_no);
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::Validation, where + ": expected " + std::to_string(header.size()) + " columns");
        }
        const double index = parse_double(fields[0], where);
        if (index != static_cast<double>(rows.size())) {
            throw Error(ErrorKind::Validation, where + ": index column must run 0..n-1 in order");
        }
        std::vector<double> values;
        for (size_t i = 1; i < fields.size(); ++i) {
            values.push_back(parse_double(fields[i], where));
        }
        rows.push_back(std::move(values));
    }
    return rows;
}

}  // namespace

DihedralTables read_tables(std::istream &backbone_csv, std::istream &chi1_csv) {
    const auto t1_rows = read_indexed_csv(backbone_csv, {"index", "phi_deg", "psi_deg"}, "backbone table");
    const auto t2_rows = read_indexed_csv(chi1_csv, {"index", "chi1_deg"}, "chi1 table");
    std::vector<DihedralTables::BackboneEntry> t1;
    for (const auto &r : t1_rows) {
        t1.push_back({deg_to_rad(r[0]), deg_to_rad(r[1])});
    }
    std::vector<double> t2;
    for (const auto &r : t2_rows) {
        t2.push_back(deg_to_rad(r[0]));
    }
    return DihedralTables(std::move(t1), std::move(t2));
}

DihedralTables read_tables_files(const std::string &backbone_path, const std::string &chi1_path) {
    std::ifstream t1(backbone_path);
    if (!t1) {
        throw Error(ErrorKind::Io, "cannot open " + backbone_path);
    }
    std::ifstream t2(chi1_path);
    if (!t2) {
        throw Error(ErrorKind::Io, "cannot open " + chi1_path);
    }
    return read_tables(t1, t2);
}

void write_backbone_table(std::ostream &out, const DihedralTables &tables) {
    out << "index,phi_deg,psi_deg\n";
    char buf[96];
    for (size_t i = 0; i < tables.backbone().size(); ++i) {
        const auto &e = tables.backbone()[i];
        std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", i, rad_to_deg(e.phi), rad_to_deg(e.psi));
        out << buf;
    }
}

void write_chi1_table(std::ostream &out, const DihedralTables &tables) {
    out << "index,chi1_deg\n";
    char buf[64];
    for (size_t i = 0; i < tables.chi1().size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", i, rad_to_deg(tables.chi1()[i]));
        out << buf;
    }
}

void write_xyz(std::ostream &out, const Conformation &conf, const std::string &comment) {
    out << conf.size() << "\n";
    out << comment << "\n";
    char buf[128];
    for (const auto &atom : conf.atoms) {
        const auto &p = atom.position;
        std::snprintf(buf, sizeof(buf), "%s %.6f %.6f %.6f\n", atom.element.c_str(), p.x(), p.y(), p.z());
        out << buf;
    }
}

std::string to_xyz(const Conformation &conf, const std::string &comment) {
    std::ostringstream ss;
    write_xyz(ss, conf, comment);
    return ss.str();
}

Conformation read_xyz(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::Validation, "xyz: missing atom count");
    }
    const double count = parse_double(trim(line), "xyz line 1");
    if (count < 0 || count != static_cast<double>(static_cast<size_t>(count))) {
        throw Error(ErrorKind::Validation, "xyz: bad atom count");
    }
    std::getline(in, line);  // comment
    Conformation conf;
    for (size_t i = 0; i < static_cast<size_t>(count); ++i) {
        if (!std::getline(in, line)) {
            throw Error(ErrorKind::Validation, "xyz: expected " + std::to_string(static_cast<size_t>(count)) + " atoms");
        }
        std::istringstream ss(line);
        Atom atom;
        double x, y, z;
        if (!(ss >> atom.element >> x >> y >> z)) {
            throw Error(ErrorKind::Validation, "xyz line " + std::to_string(i + 3) + ": expected 'element x y z'");
        }
        atom.position = Vec3(x, y, z);
        atom.name = atom.element;
        conf.atoms.push_back(std::move(atom));
    }
    return conf;
}

}  // namespace qloop
