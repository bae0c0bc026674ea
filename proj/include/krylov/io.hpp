// io.hpp — JSON coefficient files and CSV grids.
//
// Floats are serialized with 17 significant digits; coefficient arrays are
// written as decimal strings so round-trips preserve every bit. Every file
// carries a meta block.

#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "krylov/sequence.hpp"

namespace krylov::io {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline nlohmann::ordered_json sequence_to_json(const LanczosSequence& seq) {
    nlohmann::ordered_json j;
    auto& bj = j["b"] = nlohmann::ordered_json::array();
    for (double v : seq.b) bj.push_back(fmt17(v));
    j["norm2"] = fmt17(seq.norm2);
    j["meta"] = seq.meta;
    return j;
}

inline void write_sequence(const std::string& path, const LanczosSequence& seq) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << sequence_to_json(seq).dump(2) << "\n";
}

inline LanczosSequence read_sequence(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    is >> j;
    LanczosSequence seq;
    for (const auto& v : j.at("b"))
        seq.b.push_back(v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>());
    const auto& n2 = j.at("norm2");
    seq.norm2 = n2.is_string() ? std::stod(n2.get<std::string>()) : n2.get<double>();
    if (j.contains("meta"))
        for (auto& [k, v] : j["meta"].items())
            seq.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    seq.check();
    return seq;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }

    const std::vector<double>& col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return columns[i];
        throw std::runtime_error("CSV column not found: " + name);
    }
    bool has(const std::string& name) const {
        for (const auto& h : header)
            if (h == name) return true;
        return false;
    }
};

// meta lines are written as leading "# key: value" comments
inline void write_csv(const std::string& path, const CsvTable& t,
                      const std::map<std::string, std::string>& meta = {}) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& [k, v] : meta) os << "# " << k << ": " << v << "\n";
    for (std::size_t i = 0; i < t.header.size(); ++i)
        os << (i ? "," : "") << t.header[i];
    os << "\n";
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            os << (c ? "," : "") << fmt17(t.columns[c][r]);
        os << "\n";
    }
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (!have_header) {
            while (std::getline(ss, cell, ',')) t.header.push_back(cell);
            t.columns.resize(t.header.size());
            have_header = true;
            continue;
        }
        std::size_t c = 0;
        while (std::getline(ss, cell, ',') && c < t.columns.size())
            t.columns[c++].push_back(std::stod(cell));
    }
    return t;
}

}  // namespace krylov::io
